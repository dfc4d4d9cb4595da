#include "ampere/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <ostream>

#include "ampere/acceptance.hpp"
#include "ampere/error.hpp"
#include "ampere/parallel.hpp"
#include "ampere/report_io.hpp"

namespace ampere {

using nlohmann::json;

namespace {

DipoleAnchor parse_anchor(const json& params, DipoleAnchor fallback) {
    if (!params.contains("anchor")) return fallback;
    const std::string a = params["anchor"].get<std::string>();
    if (a == "corner") return DipoleAnchor::corner;
    if (a == "centroid") return DipoleAnchor::centroid;
    return DipoleAnchor::cell;
}

Outcome from_report(const ConvergenceReport& rep, std::string name) {
    return {std::move(name), rep.table, to_json(rep), rep.passed, std::nullopt};
}

double linking_unit(const FieldConstants& c) { return 4.0 * std::numbers::pi * c.k_B; }

Outcome run_field(const SceneFile& file, const json& p) {
    const auto points = json_vec3_list(p["points"], "field.points");
    Table t;
    t.columns = {"x", "y", "z", "F_x", "F_y", "F_z", "F_norm"};
    std::vector<Vector3> values;
    std::string source;
    if (p.contains("curve")) {
        source = p["curve"].get<std::string>();
        values = biot_savart_batch(build_curve(file, source), points, file.constants, file.quadrature);
    } else {
        source = p["surface"].get<std::string>();
        const SurfacePatch patch = build_surface(file, source);
        const double sigma = p.contains("sigma") ? p["sigma"].get<double>() : 1.0;
        for (const auto& x : points) {
            if (p.contains("h"))
                values.push_back(
                    dipole_sheet_field_exact(patch, {sigma, p["h"].get<double>()}, x, file.constants, file.quadrature));
            else
                values.push_back(coulomb_surface_field(patch, sigma, x, file.constants, file.quadrature));
        }
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& x = points[i];
        const auto& v = values[i];
        t.rows.push_back({x.x, x.y, x.z, v.x, v.y, v.z, norm(v)});
    }
    return {"field_" + source, t, {{"name", "field"}, {"source", source}, {"table", to_json(t)}}, true, std::nullopt};
}

Outcome run_link(const SceneFile& file, const std::string& scene_name) {
    const LinkScene scene = build_link_scene(file, scene_name);
    const LinkingValue a = gauss_linking(scene, file.constants, file.quadrature);
    const double unit = linking_unit(file.constants);
    const double normalized = a.value / unit;
    const double err = a.error_estimate / std::abs(unit);
    Table t;
    t.columns = {"scene", "A", "error_estimate", "Lk", "abs_gap", "pass"};
    bool pass;
    if (scene.spanning_mesh) {
        const int lk = combinatorial_lk(scene.curve_c, *scene.spanning_mesh, kDefaultTransversalityTol,
                                        file.quadrature.exec);
        const double gap = std::abs(normalized - lk);
        pass = gap <= 1e-4 + err;
        t.rows.push_back({scene_name, a.value, a.error_estimate, std::int64_t{lk}, gap, std::int64_t{pass}});
    } else {
        // Without a spanner only integrality can be checked.
        const double gap = std::abs(normalized - std::round(normalized));
        pass = gap <= 1e-4 + err;
        t.rows.push_back({scene_name, a.value, a.error_estimate, std::string{}, gap, std::int64_t{pass}});
    }
    return {"link_" + scene_name, t, {{"name", "link"}, {"scene", scene_name}, {"passed", pass}, {"table", to_json(t)}},
            pass, std::nullopt};
}

Outcome run_lk(const SceneFile& file, const std::string& scene_name) {
    const LinkScene scene = build_link_scene(file, scene_name);
    if (!scene.spanning_mesh) throw Error(ErrorKind::SceneError, "scene '" + scene_name + "' has no spanning surface");
    scene.validate(file.quadrature.min_distance_guard);
    const int lk = combinatorial_lk(scene.curve_c, *scene.spanning_mesh, kDefaultTransversalityTol, file.quadrature.exec);
    Table t;
    t.columns = {"scene", "Lk"};
    t.rows.push_back({scene_name, std::int64_t{lk}});
    return {"lk_" + scene_name, t, {{"name", "lk"}, {"scene", scene_name}, {"table", to_json(t)}}, true, std::nullopt};
}

Outcome run_ampere(const SceneFile& file, const json& p) {
    std::vector<std::string> names;
    if (p.contains("scenes"))
        for (const auto& s : p["scenes"]) names.push_back(s.get<std::string>());
    else
        for (const auto& s : file.scenes) names.push_back(s.name);
    if (names.empty()) throw Error(ErrorKind::SceneError, "ampere needs at least one scene");
    std::vector<CatalogEntry> entries;
    for (const auto& n : names) entries.push_back({n, build_link_scene(file, n)});
    const CatalogReport rep = ampere_catalog(entries, file.quadrature, file.constants);
    return {"ampere", rep.table, to_json(rep), rep.passed, std::nullopt};
}

std::vector<Outcome> run_all(const SceneFile& file, const std::vector<const ExperimentSpec*>& experiments) {
    std::vector<Outcome> out;
    for (const auto* e : experiments) out.push_back(run_experiment(file, *e));
    return out;
}

std::filesystem::path indexed_path(const std::filesystem::path& base, const std::string& name) {
    auto p = base;
    p.replace_filename(base.stem().string() + "_" + name + base.extension().string());
    return p;
}

void emit(const std::vector<Outcome>& outcomes, const std::optional<std::string>& out_path, std::ostream& out,
          std::ostream& err) {
    bool first_stdout = true;
    for (const auto& o : outcomes) {
        std::optional<std::filesystem::path> dest;
        if (out_path)
            dest = outcomes.size() == 1 ? std::filesystem::path(*out_path) : indexed_path(*out_path, o.name);
        else if (o.output)
            dest = *o.output;
        const std::string csv = to_csv(o.table);
        if (dest) {
            write_text(*dest, csv);
            write_text(json_sibling(*dest), o.record.dump(2) + "\n");
        } else {
            if (!first_stdout) out << '\n';
            out << csv;
            first_stdout = false;
        }
        err << o.name << ": " << (o.passed ? "PASS" : "FAIL") << '\n';
    }
}

int apply_thread_env(std::ostream& err) {
    const char* env = std::getenv("THREADS");
    if (!env) return kExitPass;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1 || n > 4096) {
        err << "error: THREADS must be a positive integer, got '" << env << "'\n";
        return kExitUsage;
    }
    set_thread_count(static_cast<int>(n));
    return kExitPass;
}

}  // namespace

Outcome run_experiment(const SceneFile& file, const ExperimentSpec& e) {
    const json& p = e.params;
    Outcome o;
    if (e.kind == "field") {
        o = run_field(file, p);
    } else if (e.kind == "link") {
        o = run_link(file, p["scene"].get<std::string>());
    } else if (e.kind == "lk") {
        o = run_lk(file, p["scene"].get<std::string>());
    } else if (e.kind == "ampere") {
        o = run_ampere(file, p);
    } else if (e.kind == "similitude_infinitesimal") {
        const auto rep = similitude_infinitesimal(
            json_vec3(p["base"], "base"), json_vec3(p["a"], "a"), json_vec3(p["b"], "b"), json_vec3(p["r"], "r"),
            json_real_list(p["eps"], "eps"), json_real(p["h"], "h"), kSimilitudeConstants, file.quadrature,
            parse_anchor(p, DipoleAnchor::corner));
        o = from_report(rep, "similitude_infinitesimal");
    } else if (e.kind == "similitude_general") {
        const std::string surface = p["surface"].get<std::string>();
        const auto rep = similitude_general(build_surface(file, surface), json_vec3(p["r"], "r"), json_real(p["h"], "h"),
                                            json_int_list(p["mesh_sizes"], "mesh_sizes"), kSimilitudeConstants,
                                            file.quadrature, parse_anchor(p, DipoleAnchor::cell));
        o = from_report(rep, "similitude_general_" + surface);
    } else if (e.kind == "curl") {
        const std::string curve = p["curve"].get<std::string>();
        const auto rep = curl_vanishing(build_curve(file, curve), json_vec3_list(p["points"], "points"),
                                        json_real_list(p["steps"], "steps"), file.constants, file.quadrature);
        o = from_report(rep, "curl_" + curve);
    } else if (e.kind == "maxwell") {
        const std::string surface = p["surface"].get<std::string>();
        std::optional<double> h;
        if (p.contains("h")) h = json_real(p["h"], "h");
        const double sigma = p.contains("sigma") ? json_real(p["sigma"], "sigma") : 1.0;
        const auto rep = maxwell_probe(build_surface(file, surface), sigma, h, json_vec3_list(p["points"], "points"),
                                       json_real_list(p["steps"], "steps"), file.constants, file.quadrature);
        o = from_report(rep, std::string(h ? "maxwell_dipole_" : "maxwell_") + surface);
    } else if (e.kind == "lemma53") {
        const int mesh = p.contains("disk_mesh") ? json_int(p["disk_mesh"], "disk_mesh") : 15;
        const auto rep = lemma53_convergence(json_int_list(p["n"], "n"), file.quadrature, file.constants, mesh);
        o = from_report(rep, "lemma53");
    } else {
        throw Error(ErrorKind::SceneError, "unknown experiment kind '" + e.kind + "'");
    }
    o.output = e.output;
    return o;
}

SceneFile builtin_scene_file() { return parse_scene_text(builtin_scene_text()); }

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Biot-Savart fields, linking integrals and similitude experiments"};
    app.require_subcommand(1);

    std::optional<std::string> scene_path, out_path, name, curve, surface;
    std::optional<double> sigma, h;
    std::vector<std::string> points;
    std::vector<int> n_list;
    std::string sim_kind = "all";

    auto add_io = [&](CLI::App* sub, bool scene_required) {
        auto* opt = sub->add_option("--scene", scene_path, "scene file (JSON)");
        if (scene_required) opt->required();
        sub->add_option("--out", out_path, "CSV output path; a .json record is written next to it");
    };
    auto* field = app.add_subcommand("field", "field values at points");
    add_io(field, false);
    field->add_option("--curve", curve, "curve name (Biot-Savart field)");
    field->add_option("--surface", surface, "surface name (sheet field)");
    field->add_option("--sigma", sigma, "surface charge density");
    field->add_option("--separation", h, "dipole sheet separation h");
    field->add_option("--point", points, "field point x,y,z (repeatable)");
    auto* link = app.add_subcommand("link", "Gauss linking integral and Lk of scenes");
    add_io(link, false);
    link->add_option("--name", name, "scene name (default: all scenes)");
    auto* lk = app.add_subcommand("lk", "combinatorial linking number of scenes");
    add_io(lk, false);
    lk->add_option("--name", name, "scene name (default: all scenes)");
    auto* sim = app.add_subcommand("similitude", "dipole sheet against current loop");
    add_io(sim, false);
    sim->add_option("--kind", sim_kind, "infinitesimal, general or all")
        ->check(CLI::IsMember({"infinitesimal", "general", "all"}));
    auto* ampere = app.add_subcommand("ampere", "A = Lk over a scene catalog");
    add_io(ampere, false);
    auto* lemma = app.add_subcommand("lemma53", "rectangular loop C_n against the unit circle");
    add_io(lemma, false);
    lemma->add_option("--n", n_list, "comma separated n values")->delimiter(',');
    auto* maxwell = app.add_subcommand("maxwell", "off-support div E and curl E");
    add_io(maxwell, false);
    auto* curl = app.add_subcommand("curl", "curl of the Biot-Savart field");
    add_io(curl, false);
    auto* selftest = app.add_subcommand("selftest", "run the acceptance suite");
    auto* run = app.add_subcommand("run", "run every experiment of a scene file");
    add_io(run, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitPass : kExitUsage;
    }

    if (const int rc = apply_thread_env(err); rc != kExitPass) return rc;

    try {
        if (selftest->parsed()) {
            const auto results = run_acceptance();
            out << format_results(results);
            return all_passed(results) ? kExitPass : kExitFail;
        }

        const SceneFile file = scene_path ? load_scene_file(*scene_path) : builtin_scene_file();
        auto of_kind = [&](std::initializer_list<const char*> kinds) {
            std::vector<const ExperimentSpec*> sel;
            for (const auto& e : file.experiments)
                for (const char* k : kinds)
                    if (e.kind == k) sel.push_back(&e);
            return sel;
        };
        auto scene_names = [&] {
            std::vector<std::string> names;
            if (name) {
                if (!file.find_scene(*name)) throw Error(ErrorKind::SceneError, "unknown scene '" + *name + "'");
                names.push_back(*name);
            } else {
                for (const auto& s : file.scenes) names.push_back(s.name);
            }
            if (names.empty()) throw Error(ErrorKind::SceneError, "scene file defines no scenes");
            return names;
        };

        std::vector<Outcome> outcomes;
        if (field->parsed()) {
            if (curve || surface || !points.empty()) {
                if (points.empty()) throw Error(ErrorKind::InvalidArgument, "field needs at least one --point");
                ExperimentSpec e{"field", json::object(), std::nullopt};
                json pts = json::array();
                for (const auto& s : points) {
                    Vector3 v;
                    char tail = 0;
                    if (std::sscanf(s.c_str(), "%lf,%lf,%lf%c", &v.x, &v.y, &v.z, &tail) != 3)
                        throw Error(ErrorKind::InvalidArgument, "--point expects x,y,z, got '" + s + "'");
                    pts.push_back({v.x, v.y, v.z});
                }
                e.params["points"] = pts;
                if (surface) {
                    e.params["surface"] = *surface;
                    if (sigma) e.params["sigma"] = *sigma;
                    if (h) e.params["h"] = *h;
                } else {
                    e.params["curve"] = curve.value_or("unit_circle");
                }
                SceneFile copy = file;
                copy.experiments = {e};
                outcomes = run_all(copy, {&copy.experiments.front()});
            } else {
                outcomes = run_all(file, of_kind({"field"}));
            }
        } else if (link->parsed() || lk->parsed()) {
            const char* kind = link->parsed() ? "link" : "lk";
            auto sel = of_kind({kind});
            if (name || sel.empty()) {
                for (const auto& n : scene_names())
                    outcomes.push_back(link->parsed() ? run_experiment(file, {"link", {{"scene", n}}, std::nullopt})
                                                      : run_experiment(file, {"lk", {{"scene", n}}, std::nullopt}));
            } else {
                outcomes = run_all(file, sel);
            }
        } else if (sim->parsed()) {
            if (sim_kind == "infinitesimal")
                outcomes = run_all(file, of_kind({"similitude_infinitesimal"}));
            else if (sim_kind == "general")
                outcomes = run_all(file, of_kind({"similitude_general"}));
            else
                outcomes = run_all(file, of_kind({"similitude_infinitesimal", "similitude_general"}));
        } else if (ampere->parsed()) {
            auto sel = of_kind({"ampere"});
            if (sel.empty()) outcomes.push_back(run_experiment(file, {"ampere", json::object(), std::nullopt}));
            else outcomes = run_all(file, sel);
        } else if (lemma->parsed()) {
            if (!n_list.empty()) outcomes.push_back(run_experiment(file, {"lemma53", {{"n", n_list}}, std::nullopt}));
            else outcomes = run_all(file, of_kind({"lemma53"}));
        } else if (maxwell->parsed()) {
            outcomes = run_all(file, of_kind({"maxwell"}));
        } else if (curl->parsed()) {
            outcomes = run_all(file, of_kind({"curl"}));
        } else if (run->parsed()) {
            std::vector<const ExperimentSpec*> sel;
            for (const auto& e : file.experiments) sel.push_back(&e);
            outcomes = run_all(file, sel);
        }
        if (outcomes.empty()) {
            err << "error: the scene file has no experiments for this subcommand\n";
            return kExitUsage;
        }
        emit(outcomes, out_path, out, err);
        const bool ok = std::all_of(outcomes.begin(), outcomes.end(), [](const Outcome& o) { return o.passed; });
        return ok ? kExitPass : kExitFail;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return is_numerical(e.kind()) ? kExitNumerical : kExitUsage;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace ampere
