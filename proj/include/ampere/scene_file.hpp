#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ampere/fields.hpp"
#include "ampere/geometry.hpp"
#include "ampere/linking.hpp"
#include "ampere/quadrature.hpp"

namespace ampere {

struct CompositeRef {
    std::vector<std::string> parts;
    friend bool operator==(const CompositeRef&, const CompositeRef&) = default;
};

struct CurveSpec {
    std::string name;
    std::variant<CircleShape, PolyLineShape, RectLoopShape, CompositeRef> shape;
    bool reversed = false;
    friend bool operator==(const CurveSpec&, const CurveSpec&) = default;
};

struct SurfaceSpec {
    std::string name;
    std::variant<PlanarRectShape, DiskShape, DomeShape> shape;
    int m = 15;
    int n = 15;
    friend bool operator==(const SurfaceSpec&, const SurfaceSpec&) = default;
};

struct SceneSpec {
    std::string name;
    std::string curve_c;
    std::string curve_l;
    std::optional<std::string> spanning_surface;
    friend bool operator==(const SceneSpec&, const SceneSpec&) = default;
};

/// One experiment entry. `params` holds the kind-specific keys, already
/// checked against the kind's schema when the file was parsed.
struct ExperimentSpec {
    std::string kind;
    nlohmann::json params = nlohmann::json::object();
    std::optional<std::string> output;
    friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

struct SceneFile {
    int version = 1;
    FieldConstants constants;
    QuadratureSpec quadrature;
    std::vector<CurveSpec> curves;
    std::vector<SurfaceSpec> surfaces;
    std::vector<SceneSpec> scenes;
    std::vector<ExperimentSpec> experiments;
    friend bool operator==(const SceneFile&, const SceneFile&) = default;

    const CurveSpec* find_curve(const std::string& name) const;
    const SurfaceSpec* find_surface(const std::string& name) const;
    const SceneSpec* find_scene(const std::string& name) const;
};

/// Experiment kinds understood by the runner.
const std::vector<std::string>& experiment_kinds();

/// Parses and validates a scene document. Throws SceneError on schema
/// violations: unknown keys, wrong types, unresolved names, version != 1.
SceneFile parse_scene(const nlohmann::json& doc);
SceneFile parse_scene_text(const std::string& text);

/// Throws IoError when the file cannot be read.
SceneFile load_scene_file(const std::filesystem::path& path);

nlohmann::json to_json(const SceneFile& file);

Curve build_curve(const SceneFile& file, const std::string& name);
SurfacePatch build_surface(const SceneFile& file, const std::string& name);
SurfaceMesh build_mesh(const SceneFile& file, const std::string& name);
LinkScene build_link_scene(const SceneFile& file, const std::string& name);

/// Helpers shared with the experiment runner. All throw SceneError.
Vector3 json_vec3(const nlohmann::json& j, const std::string& what);
std::vector<Vector3> json_vec3_list(const nlohmann::json& j, const std::string& what);
double json_real(const nlohmann::json& j, const std::string& what);
int json_int(const nlohmann::json& j, const std::string& what);
std::vector<double> json_real_list(const nlohmann::json& j, const std::string& what);
std::vector<int> json_int_list(const nlohmann::json& j, const std::string& what);
std::string json_string(const nlohmann::json& j, const std::string& what);

}  // namespace ampere
