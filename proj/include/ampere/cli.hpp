#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "ampere/experiments.hpp"
#include "ampere/scene_file.hpp"

namespace ampere {

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitUsage = 2, kExitNumerical = 3 };

/// Result of one experiment entry, ready for serialization.
struct Outcome {
    std::string name;
    Table table;
    nlohmann::json record;
    bool passed = false;
    std::optional<std::string> output;
};

/// Runs one experiment of a parsed scene file. Errors propagate.
Outcome run_experiment(const SceneFile& file, const ExperimentSpec& experiment);

/// Scenes and experiments used when no --scene is given; the same document
/// ships as scenes/catalog.json.
const std::string& builtin_scene_text();
SceneFile builtin_scene_file();

/// Entry point of the `ampere` tool. Data goes to `out`, diagnostics to
/// `err`. Returns an ExitCode.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ampere
