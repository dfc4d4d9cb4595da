#include "ampere/experiments.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "ampere/error.hpp"

namespace ampere {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

void add_check(ConvergenceReport& rep, std::string name, bool ok, std::string detail) {
    rep.checks.push_back({std::move(name), ok, std::move(detail)});
}

bool all_checks(const std::vector<Check>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

void push_vec(std::vector<Cell>& row, const Vector3& v) {
    row.emplace_back(v.x);
    row.emplace_back(v.y);
    row.emplace_back(v.z);
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

// Shared by the two similitude studies once the field pairs are known.
void finish_similitude(ConvergenceReport& rep, const char* scale_column, bool integer_scale) {
    rep.table.columns = {scale_column, "E_x", "E_y", "E_z", "hB_x", "hB_y", "hB_z", "abs_err", "rel_err"};
    std::vector<double> scales, errors;
    for (const auto& row : rep.rows) {
        std::vector<Cell> cells;
        if (integer_scale)
            cells.emplace_back(static_cast<std::int64_t>(std::llround(1.0 / row.scale)));
        else
            cells.emplace_back(row.scale);
        push_vec(cells, std::get<Vector3>(row.measured));
        push_vec(cells, std::get<Vector3>(row.reference));
        cells.emplace_back(row.abs_error);
        cells.emplace_back(row.rel_error);
        rep.table.rows.push_back(std::move(cells));
        scales.push_back(row.scale);
        errors.push_back(row.rel_error);
    }
    rep.fitted_order = fitted_log_slope(scales, errors);
    add_check(rep, "errors_decrease", strictly_decreasing(errors), "relative error falls with every refinement");
    add_check(rep, "fitted_order", rep.fitted_order >= 0.9, "order " + fmt(rep.fitted_order) + " (need >= 0.9)");
}

ConvergenceRow field_row(double scale, const Vector3& measured, const Vector3& reference) {
    ConvergenceRow row;
    row.scale = scale;
    row.measured = measured;
    row.reference = reference;
    row.abs_error = norm(measured - reference);
    row.rel_error = row.abs_error / norm(reference);
    return row;
}

}  // namespace

double fitted_log_slope(const std::vector<double>& scales, const std::vector<double>& errors) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < std::min(scales.size(), errors.size()); ++i) {
        if (scales[i] > 0.0 && errors[i] > 0.0 && std::isfinite(scales[i]) && std::isfinite(errors[i])) {
            xs.push_back(std::log(scales[i]));
            ys.push_back(std::log(errors[i]));
        }
    }
    if (xs.size() < 3) return kNaN;
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxx > 0.0 ? sxy / sxx : kNaN;
}

ConvergenceReport similitude_infinitesimal(const Vector3& base, const Vector3& a, const Vector3& b, const Vector3& r,
                                           const std::vector<double>& eps_list, double h,
                                           const FieldConstants& consts, const QuadratureSpec& spec,
                                           DipoleAnchor anchor) {
    const double dist = norm(r - base);
    if (dist == 0.0) throw Error(ErrorKind::InvalidArgument, "field point coincides with the panel base");
    if (norm(cross(a, b)) == 0.0) throw Error(ErrorKind::DegeneratePatch, "panel edges are parallel");
    if (eps_list.empty()) throw Error(ErrorKind::InvalidArgument, "eps list is empty");
    std::vector<double> eps = eps_list;
    std::sort(eps.begin(), eps.end(), std::greater<>());
    for (double e : eps) {
        if (!(e > 0.0) || e * std::max(norm(a), norm(b)) > dist / 10.0)
            throw Error(ErrorKind::InvalidArgument, "each eps must satisfy 0 < eps max(|a|,|b|) <= |r - base| / 10");
    }

    ConvergenceReport rep;
    rep.name = "similitude_infinitesimal";
    const DipoleSheetSpec dp{1.0, h};
    for (double e : eps) {
        const Panel panel(base, e * a, e * b);
        const Curve loop = Curve::polyline({base, base + e * a, base + e * (a + b), base + e * b}, true);
        const Vector3 E = dipole_panel_field(panel, dp, r, consts, anchor, spec.min_distance_guard);
        const Vector3 hB = h * biot_savart(loop, r, consts, spec);
        rep.rows.push_back(field_row(e, E, hB));
    }
    finish_similitude(rep, "eps", false);
    rep.passed = all_checks(rep.checks);
    return rep;
}

ConvergenceReport similitude_general(const SurfacePatch& patch, const Vector3& r, double h,
                                     const std::vector<int>& mesh_sizes, const FieldConstants& consts,
                                     const QuadratureSpec& spec, DipoleAnchor anchor) {
    if (mesh_sizes.empty()) throw Error(ErrorKind::InvalidArgument, "mesh size list is empty");
    if (patch.distance_to(r) < 0.5 * patch.diameter())
        throw Error(ErrorKind::InvalidArgument, "field point must be at least half a patch diameter away");
    std::vector<int> sizes = mesh_sizes;
    std::sort(sizes.begin(), sizes.end());
    if (sizes.front() < 1) throw Error(ErrorKind::InvalidArgument, "mesh sizes must be positive");

    ConvergenceReport rep;
    rep.name = "similitude_general";
    const DipoleSheetSpec dp{1.0, h};
    for (int m : sizes) {
        const SurfaceMesh mesh = mesh_surface(patch, m, m);
        const Vector3 E = dipole_mesh_field(mesh, dp, r, consts, anchor, spec.min_distance_guard, spec.exec);
        const Vector3 hB = h * biot_savart(mesh_boundary(mesh), r, consts, spec);
        rep.rows.push_back(field_row(1.0 / m, E, hB));
    }
    finish_similitude(rep, "M", true);
    const double last = rep.rows.back().rel_error;
    add_check(rep, "finest_error", last <= 1e-3, "relative error " + fmt(last) + " at M=" + std::to_string(sizes.back()));
    rep.passed = all_checks(rep.checks);
    return rep;
}

namespace {

struct ProbeSample {
    std::size_t point = 0;
    double step = 0.0;
    double distance = 0.0;
    double field_norm = 0.0;
    DifferentialProbe probe;
    std::string error;
};

// Rows in scale-descending order, stable in the point index.
ConvergenceReport probe_study(const char* name, const VectorField& field, const std::vector<Vector3>& points,
                              const std::vector<double>& steps, const std::function<double(const Vector3&)>& distance,
                              bool require_ratio) {
    if (points.empty() || steps.empty()) throw Error(ErrorKind::InvalidArgument, "probe points and steps are required");
    std::vector<double> sorted_steps = steps;
    std::sort(sorted_steps.begin(), sorted_steps.end(), std::greater<>());
    for (double s : sorted_steps)
        if (!(s > 0.0)) throw Error(ErrorKind::InvalidArgument, "probe steps must be positive");

    std::vector<ProbeSample> samples;
    for (std::size_t p = 0; p < points.size(); ++p) {
        const double d = distance(points[p]);
        double field_norm = kNaN;
        for (double s : sorted_steps) {
            ProbeSample smp{p, s, d, 0.0, {}, {}};
            try {
                if (d < 100.0 * sorted_steps.front())
                    throw Error(ErrorKind::NearSingular, "probe point closer than 100 steps to the source");
                if (std::isnan(field_norm)) field_norm = norm(field(points[p]));
                smp.field_norm = field_norm;
                smp.probe = differential_probe(field, points[p], s);
            } catch (const Error& e) {
                smp.error = e.what();
            }
            samples.push_back(std::move(smp));
        }
    }
    std::stable_sort(samples.begin(), samples.end(),
                     [](const ProbeSample& x, const ProbeSample& y) { return x.step > y.step; });

    ConvergenceReport rep;
    rep.name = name;
    rep.table.columns = {"point", "x", "y", "z", "step", "curl_x", "curl_y", "curl_z", "curl_norm", "divergence",
                         "error"};
    bool thresholds_ok = true, rows_ok = true;
    std::size_t threshold_rows = 0;
    for (const auto& smp : samples) {
        ConvergenceRow row;
        row.scale = smp.step;
        row.measured = smp.probe.curl;
        row.reference = Vector3{};
        row.abs_error = smp.error.empty() ? norm(smp.probe.curl) : kNaN;
        row.rel_error = smp.error.empty() ? std::abs(smp.probe.divergence) : kNaN;
        row.error = smp.error;
        rep.rows.push_back(row);

        std::vector<Cell> cells;
        cells.emplace_back(static_cast<std::int64_t>(smp.point));
        push_vec(cells, points[smp.point]);
        cells.emplace_back(smp.step);
        push_vec(cells, smp.error.empty() ? smp.probe.curl : Vector3{kNaN, kNaN, kNaN});
        cells.emplace_back(row.abs_error);
        cells.emplace_back(smp.error.empty() ? smp.probe.divergence : kNaN);
        cells.emplace_back(smp.error);
        rep.table.rows.push_back(std::move(cells));

        if (!smp.error.empty()) {
            rows_ok = false;
            continue;
        }
        if (smp.step <= 1e-3 * std::max(1.0, smp.distance) * (1.0 + 1e-12)) {
            ++threshold_rows;
            if (norm(smp.probe.curl) > 1e-5 || std::abs(smp.probe.divergence) > 1e-5) thresholds_ok = false;
        }
    }
    add_check(rep, "all_rows_computed", rows_ok, rows_ok ? "every probe evaluated" : "some probes failed (see rows)");
    add_check(rep, "threshold", thresholds_ok && threshold_rows > 0,
              std::to_string(threshold_rows) + " rows at step <= 1e-3 x distance checked against 1e-5");

    // Step-halving ratios of |curl| per point, above the round-off floor
    // eps_mach * 1e3 * |F| / step.
    double min_order = kNaN;
    std::size_t ratios = 0;
    bool ratios_ok = true;
    std::string ratio_detail;
    for (std::size_t p = 0; p < points.size(); ++p) {
        std::vector<const ProbeSample*> mine;
        for (const auto& smp : samples)
            if (smp.point == p && smp.error.empty()) mine.push_back(&smp);
        std::vector<double> sc, er;
        for (const auto* smp : mine) {
            const double floor = 1e3 * DBL_EPSILON * smp->field_norm / smp->step;
            if (norm(smp->probe.curl) > floor) {
                sc.push_back(smp->step);
                er.push_back(norm(smp->probe.curl));
            }
        }
        const double order = fitted_log_slope(sc, er);
        if (!std::isnan(order)) min_order = std::isnan(min_order) ? order : std::min(min_order, order);
        for (std::size_t k = 0; k + 1 < mine.size(); ++k) {
            const auto* big = mine[k];
            const auto* small = mine[k + 1];
            if (std::abs(big->step - 2.0 * small->step) > 1e-12 * big->step) continue;
            const double floor = 1e3 * DBL_EPSILON * small->field_norm / small->step;
            const double e_small = norm(small->probe.curl);
            if (!(e_small > floor)) continue;
            const double ratio = norm(big->probe.curl) / e_small;
            ++ratios;
            if (ratio < 3.0 || ratio > 5.0) ratios_ok = false;
            if (!ratio_detail.empty()) ratio_detail += ", ";
            ratio_detail += fmt(ratio);
        }
    }
    rep.fitted_order = min_order;
    if (require_ratio)
        add_check(rep, "halving_ratio", ratios_ok && ratios > 0,
                  ratios > 0 ? "ratios " + ratio_detail + " (need [3, 5])" : "no halving pair above the floor");
    rep.passed = all_checks(rep.checks);
    return rep;
}

}  // namespace

ConvergenceReport curl_vanishing(const Curve& curve, const std::vector<Vector3>& probe_points,
                                 const std::vector<double>& steps, const FieldConstants& consts,
                                 const QuadratureSpec& spec) {
    const double max_step = steps.empty() ? 0.0 : *std::max_element(steps.begin(), steps.end());
    for (const auto& p : probe_points)
        if (curve.distance_to(p) < 100.0 * max_step)
            throw Error(ErrorKind::InvalidArgument, "probe points must be at least 100 steps from the curve");
    const VectorField field = [&](const Vector3& x) { return biot_savart(curve, x, consts, spec); };
    return probe_study("curl_vanishing", field, probe_points, steps,
                       [&](const Vector3& x) { return curve.distance_to(x); }, true);
}

ConvergenceReport maxwell_probe(const SurfacePatch& patch, double sigma, std::optional<double> h,
                                const std::vector<Vector3>& probe_points, const std::vector<double>& steps,
                                const FieldConstants& consts, const QuadratureSpec& spec) {
    VectorField field;
    if (h) {
        const DipoleSheetSpec dp{sigma, *h};
        dp.validate();
        field = [=, &patch](const Vector3& x) { return dipole_sheet_field_exact(patch, dp, x, consts, spec); };
    } else {
        field = [=, &patch](const Vector3& x) { return coulomb_surface_field(patch, sigma, x, consts, spec); };
    }
    const double half = h ? 0.5 * *h : 0.0;
    auto rep = probe_study(h ? "maxwell_dipole_sheet" : "maxwell_sheet", field, probe_points, steps,
                           [&](const Vector3& x) { return patch.distance_to(x) - half; }, false);
    return rep;
}

ConvergenceReport lemma53_convergence(const std::vector<int>& n_list, const QuadratureSpec& spec,
                                      const FieldConstants& consts, int disk_mesh) {
    if (n_list.empty()) throw Error(ErrorKind::InvalidArgument, "n list is empty");
    std::vector<int> ns = n_list;
    std::sort(ns.begin(), ns.end());
    if (ns.front() < 2) throw Error(ErrorKind::InvalidArgument, "n must be >= 2");

    const double unit = 4.0 * std::numbers::pi * consts.k_B;  // A of one unit of linking
    const Curve circle = Curve::circle({0, 0, 0}, 1.0, {0, 0, 1});
    const SurfaceMesh disk = mesh_surface(SurfacePatch::disk({0, 0, 0}, 1.0, {0, 0, 1}), disk_mesh, disk_mesh);

    ConvergenceReport rep;
    rep.name = "lemma53";
    rep.table.columns = {"n", "A_total", "A_c1", "A_c2", "abs_err", "A_c1_closed_form", "Lk"};
    std::vector<double> tails, legs, scales;
    bool leg_ok = true, lk_ok = true;
    double worst_leg = 0.0;
    for (int n : ns) {
        const double dn = n;
        const Curve cn = Curve::rect_loop_cn(n);
        const Curve c1 = Curve::polyline({{0, 0, -dn}, {0, 0, dn}}, false);
        const Curve c2 = Curve::polyline({{0, 0, dn}, {dn, 0, dn}, {dn, 0, -dn}, {0, 0, -dn}}, false);
        const LinkScene scene{cn, circle, disk};
        const LinkingValue total = gauss_linking(scene, consts, spec);
        const double a1 = gauss_integral(c1, circle, consts, spec).value;
        const double a2 = gauss_integral(c2, circle, consts, spec).value;
        const double closed = unit * dn / std::sqrt(1.0 + dn * dn);
        const int lk = combinatorial_lk(cn, disk, kDefaultTransversalityTol, spec.exec);

        ConvergenceRow row;
        row.scale = 1.0 / dn;
        row.measured = total.value;
        row.reference = unit;
        row.abs_error = std::abs(total.value - unit);
        row.rel_error = row.abs_error / std::abs(unit);
        rep.rows.push_back(row);
        rep.table.rows.push_back({std::int64_t{n}, total.value, a1, a2, row.abs_error, closed, std::int64_t{lk}});

        worst_leg = std::max(worst_leg, std::abs(a1 - closed));
        if (std::abs(a1 - closed) > 1e-8 * std::abs(unit)) leg_ok = false;
        if (lk != 1) lk_ok = false;
        tails.push_back(std::abs(a2));
        legs.push_back(a1);
        scales.push_back(1.0 / dn);
    }
    rep.fitted_order = fitted_log_slope(scales, tails);

    const double final_gap = std::abs(std::get<double>(rep.rows.back().measured) - unit);
    add_check(rep, "limit", final_gap <= 1e-2 * std::abs(unit),
              "|A - 1| = " + fmt(final_gap / std::abs(unit)) + " at n=" + std::to_string(ns.back()));
    add_check(rep, "tail_monotone", strictly_decreasing(tails), "far-leg contribution falls with n");
    bool legs_rise = true;
    for (std::size_t i = 1; i < legs.size(); ++i) legs_rise = legs_rise && legs[i] > legs[i - 1];
    add_check(rep, "leg_to_one", leg_ok && legs_rise,
              "z-axis leg matches n/sqrt(1+n^2) to " + fmt(worst_leg) + " and rises toward 1");

    // Infinite straight line through the unit circle: (1/2) int (1+t^2)^(-3/2) dt
    // against the antiderivative t / sqrt(1 + t^2).
    const double t_max = ns.back();
    const auto line =
        integrate_1d<double>([](double t) { return 0.5 * std::pow(1.0 + t * t, -1.5); }, {-t_max, t_max}, spec);
    const double anti = t_max / std::sqrt(1.0 + t_max * t_max);
    add_check(rep, "line_integral", std::abs(line.value - anti) <= 1e-10,
              "quadrature " + fmt(line.value) + " vs closed form " + fmt(anti) + " -> 1");
    add_check(rep, "lk_is_one", lk_ok, "combinatorial Lk = 1 for every n");
    rep.passed = all_checks(rep.checks);
    return rep;
}

CatalogReport ampere_catalog(const std::vector<CatalogEntry>& scenes, const QuadratureSpec& spec,
                             const FieldConstants& consts) {
    const double unit = 4.0 * std::numbers::pi * consts.k_B;
    CatalogReport rep;
    rep.table.columns = {"scene", "A", "error_estimate", "Lk", "abs_gap", "A_swapped", "symmetry_gap", "symmetric",
                         "pass", "error"};
    for (const auto& entry : scenes) {
        CatalogRow row;
        row.id = entry.id;
        try {
            if (!entry.scene.spanning_mesh) throw Error(ErrorKind::SceneError, "scene has no spanning mesh");
            const LinkingValue a = gauss_linking(entry.scene, consts, spec);
            const LinkingValue swapped = gauss_integral(entry.scene.curve_l, entry.scene.curve_c, consts, spec);
            row.lk = combinatorial_lk(entry.scene.curve_c, *entry.scene.spanning_mesh, kDefaultTransversalityTol,
                                      spec.exec);
            row.a = a.value / unit;
            row.error_estimate = a.error_estimate / std::abs(unit);
            row.a_swapped = swapped.value / unit;
            row.swapped_error_estimate = swapped.error_estimate / std::abs(unit);
            row.gap = std::abs(row.a - static_cast<double>(row.lk));
            row.symmetry_gap = std::abs(row.a - row.a_swapped);
            row.symmetric = row.symmetry_gap <= 2.0 * (row.error_estimate + row.swapped_error_estimate);
            row.passed = row.gap <= 1e-4 + row.error_estimate;
        } catch (const Error& e) {
            row.error = e.what();
            row.a = row.error_estimate = row.a_swapped = row.swapped_error_estimate = kNaN;
            row.gap = row.symmetry_gap = kNaN;
        }
        rep.table.rows.push_back({row.id, row.a, row.error_estimate, row.lk, row.gap, row.a_swapped,
                                  row.symmetry_gap, std::int64_t{row.symmetric}, std::int64_t{row.passed}, row.error});
        rep.rows.push_back(std::move(row));
    }
    rep.passed = !rep.rows.empty() && std::all_of(rep.rows.begin(), rep.rows.end(), [](const CatalogRow& r) {
        return r.passed && r.symmetric;
    });
    return rep;
}

LinkScene hopf_scene(int mesh_resolution) {
    return {Curve::circle({1, 0, 0}, 1.0, {0, 1, 0}), Curve::circle({0, 0, 0}, 1.0, {0, 0, 1}),
            mesh_surface(SurfacePatch::disk({0, 0, 0}, 1.0, {0, 0, 1}), mesh_resolution, mesh_resolution)};
}

std::vector<CatalogEntry> default_catalog(int m) {
    const Curve unit = Curve::circle({0, 0, 0}, 1.0, {0, 0, 1});
    const SurfaceMesh disk = mesh_surface(SurfacePatch::disk({0, 0, 0}, 1.0, {0, 0, 1}), m, m);
    const SurfaceMesh dome = mesh_surface(SurfacePatch::dome({0, 0, 0}, 1.0, {0, 0, 1}, 0.5), m, m);
    const Curve hopf_c = Curve::circle({1, 0, 0}, 1.0, {0, 1, 0});

    std::vector<CatalogEntry> out;
    out.push_back({"hopf", hopf_scene(m)});
    out.push_back({"hopf_reversed", {hopf_c.reversed(), unit, disk}});
    out.push_back({"hopf_dome", {hopf_c, unit, dome}});
    out.push_back({"unlinked_far", {Curve::circle({0, 0, 10}, 1.0, {0, 0, 1}), unit, disk}});
    out.push_back({"unlinked_near", {Curve::circle({2.5, 0, 0}, 1.0, {0, 1, 0}), unit, disk}});
    out.push_back({"double_wind",
                   {Curve::polyline({{0.3, 0, -3},
                                     {0.3, 0, 3},
                                     {4, 0, 3},
                                     {4, 0, -4},
                                     {-0.3, 0.2, -4},
                                     {-0.3, 0.2, 4},
                                     {-4, 0.2, 4},
                                     {-4, 0.2, -3}},
                                    true),
                    unit, disk}});
    out.push_back({"rect_loop_4", {Curve::rect_loop_cn(4), unit, disk}});
    out.push_back({"square_sheet",
                   {Curve::circle({1, 0, 0}, 1.0, {0, 1, 0}),
                    Curve::polyline({{-1, -1, 0}, {1, -1, 0}, {1, 1, 0}, {-1, 1, 0}}, true),
                    mesh_surface(SurfacePatch::planar_rect({-1, -1, 0}, {2, 0, 0}, {0, 2, 0}), m, m)}});
    return out;
}

}  // namespace ampere
