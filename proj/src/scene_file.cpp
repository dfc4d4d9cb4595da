#include "ampere/scene_file.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "ampere/error.hpp"

namespace ampere {

using nlohmann::json;

namespace {

[[noreturn]] void scene_error(const std::string& msg) { throw Error(ErrorKind::SceneError, msg); }

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) scene_error(where + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            scene_error("unknown key '" + key + "' in " + where);
    }
}

const json& require(const json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) scene_error(where + " is missing '" + key + "'");
    return *it;
}

json vec_json(const Vector3& v) { return json::array({v.x, v.y, v.z}); }

struct ParamSchema {
    std::vector<const char*> required;
    std::vector<const char*> optional;
};

const std::vector<std::pair<std::string, ParamSchema>>& schemas() {
    static const std::vector<std::pair<std::string, ParamSchema>> s = {
        {"field", {{"points"}, {"curve", "surface", "sigma", "h"}}},
        {"link", {{"scene"}, {}}},
        {"lk", {{"scene"}, {}}},
        {"ampere", {{}, {"scenes"}}},
        {"similitude_infinitesimal", {{"base", "a", "b", "r", "eps", "h"}, {"anchor"}}},
        {"similitude_general", {{"surface", "r", "h", "mesh_sizes"}, {"anchor"}}},
        {"curl", {{"curve", "points", "steps"}, {}}},
        {"maxwell", {{"surface", "points", "steps"}, {"sigma", "h"}}},
        {"lemma53", {{"n"}, {"disk_mesh"}}},
    };
    return s;
}

Orientation parse_orientation(const json& j, const std::string& where) {
    const std::string s = json_string(j, where + ".orientation");
    if (s == "ccw") return Orientation::ccw;
    if (s == "cw") return Orientation::cw;
    scene_error(where + ".orientation must be \"ccw\" or \"cw\"");
}

CurveSpec parse_curve(const json& j, std::size_t index) {
    const std::string where = "curves[" + std::to_string(index) + "]";
    if (!j.is_object()) scene_error(where + " must be an object");
    CurveSpec c;
    c.name = json_string(require(j, "name", where), where + ".name");
    const std::string kind = json_string(require(j, "kind", where), where + ".kind");
    const std::string at = "curve '" + c.name + "'";
    if (kind == "circle") {
        check_keys(j, {"name", "kind", "center", "radius", "axis", "orientation", "reversed"}, at);
        CircleShape s;
        s.center = json_vec3(require(j, "center", at), at + ".center");
        s.radius = json_real(require(j, "radius", at), at + ".radius");
        if (j.contains("axis")) s.axis = json_vec3(j["axis"], at + ".axis");
        if (j.contains("orientation")) s.orientation = parse_orientation(j["orientation"], at);
        c.shape = s;
    } else if (kind == "polyline") {
        check_keys(j, {"name", "kind", "vertices", "closed", "reversed"}, at);
        PolyLineShape s;
        s.vertices = json_vec3_list(require(j, "vertices", at), at + ".vertices");
        const json& closed = require(j, "closed", at);
        if (!closed.is_boolean()) scene_error(at + ".closed must be a boolean");
        s.closed = closed.get<bool>();
        c.shape = s;
    } else if (kind == "rect_loop_cn") {
        check_keys(j, {"name", "kind", "n", "reversed"}, at);
        c.shape = RectLoopShape{json_int(require(j, "n", at), at + ".n")};
    } else if (kind == "composite") {
        check_keys(j, {"name", "kind", "parts", "reversed"}, at);
        const json& parts = require(j, "parts", at);
        if (!parts.is_array() || parts.empty()) scene_error(at + ".parts must be a non-empty array of names");
        CompositeRef ref;
        for (const auto& p : parts) ref.parts.push_back(json_string(p, at + ".parts"));
        c.shape = ref;
    } else {
        scene_error(at + " has unknown kind '" + kind + "'");
    }
    if (j.contains("reversed")) {
        if (!j["reversed"].is_boolean()) scene_error(at + ".reversed must be a boolean");
        c.reversed = j["reversed"].get<bool>();
    }
    return c;
}

SurfaceSpec parse_surface(const json& j, std::size_t index) {
    const std::string where = "surfaces[" + std::to_string(index) + "]";
    if (!j.is_object()) scene_error(where + " must be an object");
    SurfaceSpec s;
    s.name = json_string(require(j, "name", where), where + ".name");
    const std::string kind = json_string(require(j, "kind", where), where + ".kind");
    const std::string at = "surface '" + s.name + "'";
    if (kind == "planar_rect") {
        check_keys(j, {"name", "kind", "corner", "edge_a", "edge_b", "mesh"}, at);
        PlanarRectShape p;
        p.corner = json_vec3(require(j, "corner", at), at + ".corner");
        p.edge_a = json_vec3(require(j, "edge_a", at), at + ".edge_a");
        p.edge_b = json_vec3(require(j, "edge_b", at), at + ".edge_b");
        s.shape = p;
    } else if (kind == "disk" || kind == "dome") {
        if (kind == "disk")
            check_keys(j, {"name", "kind", "center", "radius", "axis", "mesh"}, at);
        else
            check_keys(j, {"name", "kind", "center", "radius", "axis", "height", "mesh"}, at);
        const Vector3 center = json_vec3(require(j, "center", at), at + ".center");
        const double radius = json_real(require(j, "radius", at), at + ".radius");
        const Vector3 axis = j.contains("axis") ? json_vec3(j["axis"], at + ".axis") : Vector3{0, 0, 1};
        if (kind == "disk")
            s.shape = DiskShape{center, radius, axis};
        else
            s.shape = DomeShape{center, radius, axis, json_real(require(j, "height", at), at + ".height")};
    } else {
        scene_error(at + " has unknown kind '" + kind + "'");
    }
    if (j.contains("mesh")) {
        const auto mn = json_int_list(j["mesh"], at + ".mesh");
        if (mn.size() != 2 || mn[0] < 1 || mn[1] < 1) scene_error(at + ".mesh must be [M, N] with M, N >= 1");
        s.m = mn[0];
        s.n = mn[1];
    }
    return s;
}

SceneSpec parse_link_scene(const json& j, std::size_t index) {
    const std::string where = "scenes[" + std::to_string(index) + "]";
    check_keys(j, {"name", "curve_c", "curve_l", "spanning_surface"}, where);
    SceneSpec s;
    s.name = json_string(require(j, "name", where), where + ".name");
    s.curve_c = json_string(require(j, "curve_c", where), where + ".curve_c");
    s.curve_l = json_string(require(j, "curve_l", where), where + ".curve_l");
    if (j.contains("spanning_surface")) s.spanning_surface = json_string(j["spanning_surface"], where + ".spanning_surface");
    return s;
}

ExperimentSpec parse_experiment(const json& j, std::size_t index) {
    const std::string where = "experiments[" + std::to_string(index) + "]";
    if (!j.is_object()) scene_error(where + " must be an object");
    ExperimentSpec e;
    e.kind = json_string(require(j, "kind", where), where + ".kind");
    const auto& all = schemas();
    const auto it = std::find_if(all.begin(), all.end(), [&](const auto& p) { return p.first == e.kind; });
    if (it == all.end()) scene_error(where + " has unknown kind '" + e.kind + "'");
    const ParamSchema& schema = it->second;
    for (const auto& [key, value] : j.items()) {
        if (key == "kind") continue;
        if (key == "output") {
            e.output = json_string(value, where + ".output");
            continue;
        }
        const bool known = std::any_of(schema.required.begin(), schema.required.end(), [&](const char* k) { return key == k; }) ||
                           std::any_of(schema.optional.begin(), schema.optional.end(), [&](const char* k) { return key == k; });
        if (!known) scene_error("unknown key '" + key + "' in " + where + " (" + e.kind + ")");
        e.params[key] = value;
    }
    for (const char* k : schema.required)
        if (!e.params.contains(k)) scene_error(where + " (" + e.kind + ") is missing '" + k + "'");
    return e;
}

template <class T>
void check_unique(const std::vector<T>& items, const std::string& what) {
    std::set<std::string> seen;
    for (const auto& it : items)
        if (!seen.insert(it.name).second) scene_error("duplicate " + what + " name '" + it.name + "'");
}

Curve build_curve_rec(const SceneFile& file, const std::string& name, std::set<std::string>& active) {
    const CurveSpec* spec = file.find_curve(name);
    if (!spec) scene_error("unknown curve '" + name + "'");
    if (!active.insert(name).second) scene_error("composite curve '" + name + "' refers to itself");
    Curve c = std::visit(
        [&](const auto& sh) -> Curve {
            using S = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<S, CircleShape>)
                return Curve::circle(sh.center, sh.radius, sh.axis, sh.orientation);
            else if constexpr (std::is_same_v<S, PolyLineShape>)
                return Curve::polyline(sh.vertices, sh.closed);
            else if constexpr (std::is_same_v<S, RectLoopShape>)
                return Curve::rect_loop_cn(sh.n);
            else {
                std::vector<Curve> parts;
                for (const auto& p : sh.parts) parts.push_back(build_curve_rec(file, p, active));
                return Curve::composite(std::move(parts));
            }
        },
        spec->shape);
    active.erase(name);
    return spec->reversed ? c.reversed() : c;
}

// Wraps construction errors of shapes and meshes as scene errors.
template <class F>
auto as_scene_error(const std::string& what, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::SceneError) throw;
        scene_error(what + ": " + e.message());
    }
}

void validate_experiment(const SceneFile& file, const ExperimentSpec& e) {
    const json& p = e.params;
    const std::string at = "experiment '" + e.kind + "'";
    auto curve_ref = [&](const char* key) {
        const std::string n = json_string(p[key], at + "." + key);
        if (!file.find_curve(n)) scene_error(at + " refers to unknown curve '" + n + "'");
    };
    auto surface_ref = [&](const char* key) {
        const std::string n = json_string(p[key], at + "." + key);
        if (!file.find_surface(n)) scene_error(at + " refers to unknown surface '" + n + "'");
    };
    auto scene_ref = [&](const std::string& n) {
        if (!file.find_scene(n)) scene_error(at + " refers to unknown scene '" + n + "'");
    };
    auto anchor = [&] {
        if (!p.contains("anchor")) return;
        const std::string a = json_string(p["anchor"], at + ".anchor");
        if (a != "corner" && a != "centroid" && a != "cell") scene_error(at + ".anchor must be corner, centroid or cell");
    };
    if (e.kind == "field") {
        json_vec3_list(p["points"], at + ".points");
        if (p.contains("curve") == p.contains("surface")) scene_error(at + " needs exactly one of 'curve' or 'surface'");
        if (p.contains("curve")) {
            curve_ref("curve");
            if (p.contains("sigma") || p.contains("h")) scene_error(at + ": sigma and h only apply to surfaces");
        } else {
            surface_ref("surface");
        }
        if (p.contains("sigma")) json_real(p["sigma"], at + ".sigma");
        if (p.contains("h")) json_real(p["h"], at + ".h");
    } else if (e.kind == "link" || e.kind == "lk") {
        scene_ref(json_string(p["scene"], at + ".scene"));
    } else if (e.kind == "ampere") {
        if (p.contains("scenes")) {
            if (!p["scenes"].is_array()) scene_error(at + ".scenes must be an array of names");
            for (const auto& s : p["scenes"]) scene_ref(json_string(s, at + ".scenes"));
        }
    } else if (e.kind == "similitude_infinitesimal") {
        for (const char* k : {"base", "a", "b", "r"}) json_vec3(p[k], at + "." + k);
        json_real_list(p["eps"], at + ".eps");
        json_real(p["h"], at + ".h");
        anchor();
    } else if (e.kind == "similitude_general") {
        surface_ref("surface");
        json_vec3(p["r"], at + ".r");
        json_real(p["h"], at + ".h");
        json_int_list(p["mesh_sizes"], at + ".mesh_sizes");
        anchor();
    } else if (e.kind == "curl") {
        curve_ref("curve");
        json_vec3_list(p["points"], at + ".points");
        json_real_list(p["steps"], at + ".steps");
    } else if (e.kind == "maxwell") {
        surface_ref("surface");
        json_vec3_list(p["points"], at + ".points");
        json_real_list(p["steps"], at + ".steps");
        if (p.contains("sigma")) json_real(p["sigma"], at + ".sigma");
        if (p.contains("h")) json_real(p["h"], at + ".h");
    } else if (e.kind == "lemma53") {
        json_int_list(p["n"], at + ".n");
        if (p.contains("disk_mesh")) json_int(p["disk_mesh"], at + ".disk_mesh");
    }
}

}  // namespace

Vector3 json_vec3(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 3 || !std::all_of(j.begin(), j.end(), [](const json& x) { return x.is_number(); }))
        scene_error(what + " must be an array of 3 numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::vector<Vector3> json_vec3_list(const json& j, const std::string& what) {
    if (!j.is_array()) scene_error(what + " must be an array of points");
    std::vector<Vector3> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(json_vec3(j[i], what + "[" + std::to_string(i) + "]"));
    return out;
}

double json_real(const json& j, const std::string& what) {
    if (!j.is_number()) scene_error(what + " must be a number");
    return j.get<double>();
}

int json_int(const json& j, const std::string& what) {
    if (!j.is_number_integer()) scene_error(what + " must be an integer");
    return j.get<int>();
}

std::vector<double> json_real_list(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) scene_error(what + " must be a non-empty array of numbers");
    std::vector<double> out;
    for (const auto& x : j) out.push_back(json_real(x, what));
    return out;
}

std::vector<int> json_int_list(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) scene_error(what + " must be a non-empty array of integers");
    std::vector<int> out;
    for (const auto& x : j) out.push_back(json_int(x, what));
    return out;
}

std::string json_string(const json& j, const std::string& what) {
    if (!j.is_string()) scene_error(what + " must be a string");
    return j.get<std::string>();
}

const std::vector<std::string>& experiment_kinds() {
    static const std::vector<std::string> kinds = [] {
        std::vector<std::string> k;
        for (const auto& [name, schema] : schemas()) k.push_back(name);
        return k;
    }();
    return kinds;
}

const CurveSpec* SceneFile::find_curve(const std::string& name) const {
    for (const auto& c : curves)
        if (c.name == name) return &c;
    return nullptr;
}

const SurfaceSpec* SceneFile::find_surface(const std::string& name) const {
    for (const auto& s : surfaces)
        if (s.name == name) return &s;
    return nullptr;
}

const SceneSpec* SceneFile::find_scene(const std::string& name) const {
    for (const auto& s : scenes)
        if (s.name == name) return &s;
    return nullptr;
}

SceneFile parse_scene(const json& doc) {
    check_keys(doc, {"version", "constants", "quadrature", "curves", "surfaces", "scenes", "experiments"}, "scene file");
    SceneFile f;
    f.version = json_int(require(doc, "version", "scene file"), "version");
    if (f.version != 1) scene_error("unsupported scene file version " + std::to_string(f.version));

    if (doc.contains("constants")) {
        const json& c = doc["constants"];
        check_keys(c, {"k_E", "k_B"}, "constants");
        if (c.contains("k_E")) f.constants.k_E = json_real(c["k_E"], "constants.k_E");
        if (c.contains("k_B")) f.constants.k_B = json_real(c["k_B"], "constants.k_B");
        as_scene_error("constants", [&] { f.constants.validate(); });
    }
    if (doc.contains("quadrature")) {
        const json& q = doc["quadrature"];
        check_keys(q, {"nodes_per_cell", "abs_tol", "rel_tol", "max_depth", "min_distance_guard"}, "quadrature");
        auto& s = f.quadrature;
        if (q.contains("nodes_per_cell")) s.nodes_per_cell = json_int(q["nodes_per_cell"], "quadrature.nodes_per_cell");
        if (q.contains("abs_tol")) s.abs_tol = json_real(q["abs_tol"], "quadrature.abs_tol");
        if (q.contains("rel_tol")) s.rel_tol = json_real(q["rel_tol"], "quadrature.rel_tol");
        if (q.contains("max_depth")) s.max_depth = json_int(q["max_depth"], "quadrature.max_depth");
        if (q.contains("min_distance_guard"))
            s.min_distance_guard = json_real(q["min_distance_guard"], "quadrature.min_distance_guard");
        as_scene_error("quadrature", [&] { s.validate(); });
    }
    auto list = [&](const char* key) -> const json& {
        static const json empty = json::array();
        if (!doc.contains(key)) return empty;
        if (!doc[key].is_array()) scene_error(std::string(key) + " must be an array");
        return doc[key];
    };
    for (std::size_t i = 0; i < list("curves").size(); ++i) f.curves.push_back(parse_curve(list("curves")[i], i));
    for (std::size_t i = 0; i < list("surfaces").size(); ++i)
        f.surfaces.push_back(parse_surface(list("surfaces")[i], i));
    for (std::size_t i = 0; i < list("scenes").size(); ++i) f.scenes.push_back(parse_link_scene(list("scenes")[i], i));
    for (std::size_t i = 0; i < list("experiments").size(); ++i)
        f.experiments.push_back(parse_experiment(list("experiments")[i], i));

    check_unique(f.curves, "curve");
    check_unique(f.surfaces, "surface");
    check_unique(f.scenes, "scene");
    for (const auto& c : f.curves) build_curve(f, c.name);
    for (const auto& s : f.surfaces) build_mesh(f, s.name);
    for (const auto& s : f.scenes) {
        if (!f.find_curve(s.curve_c)) scene_error("scene '" + s.name + "' refers to unknown curve '" + s.curve_c + "'");
        if (!f.find_curve(s.curve_l)) scene_error("scene '" + s.name + "' refers to unknown curve '" + s.curve_l + "'");
        if (s.spanning_surface && !f.find_surface(*s.spanning_surface))
            scene_error("scene '" + s.name + "' refers to unknown surface '" + *s.spanning_surface + "'");
    }
    for (const auto& e : f.experiments) validate_experiment(f, e);
    return f;
}

SceneFile parse_scene_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        scene_error(std::string("malformed JSON: ") + e.what());
    }
    return parse_scene(doc);
}

SceneFile load_scene_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open scene file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_scene_text(ss.str());
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.message());
    }
}

json to_json(const SceneFile& f) {
    json doc = json::object();
    doc["version"] = f.version;
    doc["constants"] = {{"k_E", f.constants.k_E}, {"k_B", f.constants.k_B}};
    const auto& q = f.quadrature;
    doc["quadrature"] = {{"nodes_per_cell", q.nodes_per_cell},
                         {"abs_tol", q.abs_tol},
                         {"rel_tol", q.rel_tol},
                         {"max_depth", q.max_depth},
                         {"min_distance_guard", q.min_distance_guard}};
    json curves = json::array();
    for (const auto& c : f.curves) {
        json j = {{"name", c.name}};
        std::visit(
            [&](const auto& sh) {
                using S = std::decay_t<decltype(sh)>;
                if constexpr (std::is_same_v<S, CircleShape>) {
                    j["kind"] = "circle";
                    j["center"] = vec_json(sh.center);
                    j["radius"] = sh.radius;
                    j["axis"] = vec_json(sh.axis);
                    j["orientation"] = sh.orientation == Orientation::ccw ? "ccw" : "cw";
                } else if constexpr (std::is_same_v<S, PolyLineShape>) {
                    j["kind"] = "polyline";
                    json v = json::array();
                    for (const auto& p : sh.vertices) v.push_back(vec_json(p));
                    j["vertices"] = v;
                    j["closed"] = sh.closed;
                } else if constexpr (std::is_same_v<S, RectLoopShape>) {
                    j["kind"] = "rect_loop_cn";
                    j["n"] = sh.n;
                } else {
                    j["kind"] = "composite";
                    j["parts"] = sh.parts;
                }
            },
            c.shape);
        j["reversed"] = c.reversed;
        curves.push_back(std::move(j));
    }
    doc["curves"] = curves;
    json surfaces = json::array();
    for (const auto& s : f.surfaces) {
        json j = {{"name", s.name}};
        std::visit(
            [&](const auto& sh) {
                using S = std::decay_t<decltype(sh)>;
                if constexpr (std::is_same_v<S, PlanarRectShape>) {
                    j["kind"] = "planar_rect";
                    j["corner"] = vec_json(sh.corner);
                    j["edge_a"] = vec_json(sh.edge_a);
                    j["edge_b"] = vec_json(sh.edge_b);
                } else {
                    j["kind"] = std::is_same_v<S, DiskShape> ? "disk" : "dome";
                    j["center"] = vec_json(sh.center);
                    j["radius"] = sh.radius;
                    j["axis"] = vec_json(sh.axis);
                    if constexpr (std::is_same_v<S, DomeShape>) j["height"] = sh.height;
                }
            },
            s.shape);
        j["mesh"] = {s.m, s.n};
        surfaces.push_back(std::move(j));
    }
    doc["surfaces"] = surfaces;
    json scenes = json::array();
    for (const auto& s : f.scenes) {
        json j = {{"name", s.name}, {"curve_c", s.curve_c}, {"curve_l", s.curve_l}};
        if (s.spanning_surface) j["spanning_surface"] = *s.spanning_surface;
        scenes.push_back(std::move(j));
    }
    doc["scenes"] = scenes;
    json experiments = json::array();
    for (const auto& e : f.experiments) {
        json j = e.params;
        j["kind"] = e.kind;
        if (e.output) j["output"] = *e.output;
        experiments.push_back(std::move(j));
    }
    doc["experiments"] = experiments;
    return doc;
}

Curve build_curve(const SceneFile& file, const std::string& name) {
    std::set<std::string> active;
    return as_scene_error("curve '" + name + "'", [&] { return build_curve_rec(file, name, active); });
}

SurfacePatch build_surface(const SceneFile& file, const std::string& name) {
    const SurfaceSpec* spec = file.find_surface(name);
    if (!spec) scene_error("unknown surface '" + name + "'");
    return as_scene_error("surface '" + name + "'", [&] {
        return std::visit(
            [](const auto& sh) -> SurfacePatch {
                using S = std::decay_t<decltype(sh)>;
                if constexpr (std::is_same_v<S, PlanarRectShape>)
                    return SurfacePatch::planar_rect(sh.corner, sh.edge_a, sh.edge_b);
                else if constexpr (std::is_same_v<S, DiskShape>)
                    return SurfacePatch::disk(sh.center, sh.radius, sh.axis);
                else
                    return SurfacePatch::dome(sh.center, sh.radius, sh.axis, sh.height);
            },
            spec->shape);
    });
}

SurfaceMesh build_mesh(const SceneFile& file, const std::string& name) {
    const SurfacePatch patch = build_surface(file, name);
    const SurfaceSpec* spec = file.find_surface(name);
    return as_scene_error("surface '" + name + "'", [&] { return mesh_surface(patch, spec->m, spec->n); });
}

LinkScene build_link_scene(const SceneFile& file, const std::string& name) {
    const SceneSpec* spec = file.find_scene(name);
    if (!spec) scene_error("unknown scene '" + name + "'");
    LinkScene scene{build_curve(file, spec->curve_c), build_curve(file, spec->curve_l), std::nullopt};
    if (spec->spanning_surface) scene.spanning_mesh = build_mesh(file, *spec->spanning_surface);
    return scene;
}

}  // namespace ampere
