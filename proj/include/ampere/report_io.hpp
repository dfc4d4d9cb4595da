#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "ampere/experiments.hpp"

namespace ampere {

/// CSV with a header row, %.17g reals, LF line endings. Strings containing a
/// comma, quote or newline are quoted.
std::string to_csv(const Table& table);

std::string format_real(double v);

nlohmann::json to_json(const Table& table);
nlohmann::json to_json(const ConvergenceReport& report);
nlohmann::json to_json(const CatalogReport& report);

/// `path` with its extension replaced by .json.
std::filesystem::path json_sibling(const std::filesystem::path& path);

/// Writes text to a file; throws IoError.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace ampere
