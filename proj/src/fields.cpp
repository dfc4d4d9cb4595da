#include "ampere/fields.hpp"

#include <cmath>
#include <sstream>

#include "ampere/error.hpp"

namespace ampere {

void FieldConstants::validate() const {
    if (!std::isfinite(k_E) || !std::isfinite(k_B) || k_E == 0.0 || k_B == 0.0)
        throw Error(ErrorKind::InvalidArgument, "field constants must be finite and non-zero");
}

void DipoleSheetSpec::validate() const {
    if (!std::isfinite(sigma) || !std::isfinite(h)) throw Error(ErrorKind::InvalidArgument, "sigma and h must be finite");
    if (h < 0.0) throw Error(ErrorKind::InvalidArgument, "sheet separation h must be >= 0");
}

namespace {

void require_point(const Vector3& x) {
    if (!is_finite(x)) throw Error(ErrorKind::InvalidArgument, "field point must be finite");
}

[[noreturn]] void near_singular(const Vector3& x, double distance, double guard) {
    std::ostringstream msg;
    msg << "field point " << x << " is " << distance << " from the source (guard " << guard << ")";
    throw Error(ErrorKind::NearSingular, msg.str());
}

// Inner integrals run serially when the caller already parallelises.
QuadratureSpec inner_spec(const QuadratureSpec& spec, bool outer_parallel) {
    QuadratureSpec s = spec;
    if (outer_parallel) s.exec = Exec::serial;
    return s;
}

}  // namespace

Vector3 point_dipole_field(const Vector3& origin, const Vector3& area, const DipoleSheetSpec& dp, const Vector3& x,
                           const FieldConstants& consts, double guard) {
    const Vector3 r = x - origin;
    const double d = norm(r);
    if (d <= guard) near_singular(x, d, guard);
    const Vector3 u = r / d;
    return (consts.k_E * dp.h * dp.sigma / (d * d * d)) * (3.0 * dot(u, area) * u - area);
}

Vector3 biot_savart(const Curve& curve, const Vector3& x, const FieldConstants& consts, const QuadratureSpec& spec) {
    require_point(x);
    consts.validate();
    spec.validate();
    const double dist = curve.distance_to(x);
    if (dist <= spec.min_distance_guard) near_singular(x, dist, spec.min_distance_guard);

    const auto pieces = curve.pieces();
    const bool outer = pieces.size() > 1 && spec.exec == Exec::parallel;
    const QuadratureSpec piece_spec = inner_spec(spec, outer);
    auto integrand = [&curve, &x](double t) {
        const CurvePoint p = curve.eval(t);
        const Vector3 r = x - p.position;
        const double d = norm(r);
        return cross(p.tangent, r) / (d * d * d);
    };
    const Vector3 total = ordered_sum(pieces.size(), outer ? Exec::parallel : Exec::serial, Vector3{},
                                      [&](std::size_t k) {
                                          return integrate_1d<Vector3>(integrand, pieces[k].interval, piece_spec).value;
                                      });
    return consts.k_B * total;
}

std::vector<Vector3> biot_savart_batch(const Curve& curve, std::span<const Vector3> points,
                                       const FieldConstants& consts, const QuadratureSpec& spec) {
    std::vector<Vector3> out(points.size());
    const QuadratureSpec s = inner_spec(spec, spec.exec == Exec::parallel);
    for_each_index(points.size(), spec.exec, [&](std::size_t i) { out[i] = biot_savart(curve, points[i], consts, s); });
    return out;
}

Vector3 coulomb_surface_field(const SurfacePatch& patch, double sigma, const Vector3& x, const FieldConstants& consts,
                              const QuadratureSpec& spec) {
    require_point(x);
    consts.validate();
    spec.validate();
    if (!std::isfinite(sigma)) throw Error(ErrorKind::InvalidArgument, "sigma must be finite");
    const double dist = patch.distance_to(x);
    if (dist <= spec.min_distance_guard) near_singular(x, dist, spec.min_distance_guard);

    const double scale = patch.bounds().diagonal();
    const double jacobian_floor = 1e-12 * scale * scale;
    auto integrand = [&](double u, double v) {
        const SurfaceFrame f = patch.eval(u, v);
        const double jac = norm(cross(f.du, f.dv));
        if (jac <= jacobian_floor) throw Error(ErrorKind::DegeneratePatch, "surface Jacobian vanishes at a node");
        const Vector3 r = x - f.point;
        const double d = norm(r);
        return (jac / (d * d * d)) * r;
    };
    const auto res = integrate_2d<Vector3>(integrand, Rect{{0, 1}, {0, 1}}, spec);
    return (consts.k_E * sigma) * res.value;
}

Vector3 dipole_sheet_field_exact(const SurfacePatch& patch, const DipoleSheetSpec& dp, const Vector3& x,
                                 const FieldConstants& consts, const QuadratureSpec& spec) {
    require_point(x);
    consts.validate();
    spec.validate();
    dp.validate();

    const double half = 0.5 * dp.h;
    double dist;
    if (patch.is_planar()) {
        const Vector3 n = patch.unit_normal(0.5, 0.5);
        dist = std::min(patch.distance_to(x - half * n), patch.distance_to(x + half * n));
    } else {
        dist = patch.distance_to(x) - half;
    }
    if (dist <= spec.min_distance_guard) near_singular(x, dist, spec.min_distance_guard);

    const double scale = patch.bounds().diagonal();
    const double jacobian_floor = 1e-12 * scale * scale;
    auto integrand = [&](double u, double v) {
        const SurfaceFrame f = patch.eval(u, v);
        const Vector3 area = cross(f.du, f.dv);
        const double jac = norm(area);
        if (jac <= jacobian_floor) throw Error(ErrorKind::DegeneratePatch, "surface Jacobian vanishes at a node");
        const Vector3 shift = (half / jac) * area;
        const Vector3 rp = x - (f.point + shift);
        const Vector3 rm = x - (f.point - shift);
        const double dpl = norm(rp), dmi = norm(rm);
        return jac * (rp / (dpl * dpl * dpl) - rm / (dmi * dmi * dmi));
    };
    const auto res = integrate_2d<Vector3>(integrand, Rect{{0, 1}, {0, 1}}, spec);
    return (consts.k_E * dp.sigma) * res.value;
}

Vector3 dipole_panel_field(const Panel& panel, const DipoleSheetSpec& dp, const Vector3& x,
                           const FieldConstants& consts, DipoleAnchor anchor, double guard) {
    require_point(x);
    dp.validate();
    const Vector3 origin = anchor == DipoleAnchor::corner ? panel.base() : panel.centroid();
    return point_dipole_field(origin, panel.area_vector(), dp, x, consts, guard);
}

Vector3 dipole_mesh_field(const SurfaceMesh& mesh, const DipoleSheetSpec& dp, const Vector3& x,
                          const FieldConstants& consts, DipoleAnchor anchor, double guard, Exec exec) {
    require_point(x);
    dp.validate();
    // One task per mesh row, folded in order; both policies group the same way.
    const int n = mesh.n();
    auto term = [&](int i, int j) {
        if (anchor != DipoleAnchor::cell) return dipole_panel_field(mesh.panel(i, j), dp, x, consts, anchor, guard);
        const auto c = mesh.cell(i, j);
        const Vector3 area = 0.5 * cross(c[2] - c[0], c[3] - c[1]);
        return point_dipole_field(0.25 * (c[0] + c[1] + c[2] + c[3]), area, dp, x, consts, guard);
    };
    return ordered_sum(std::size_t(mesh.m()), exec, Vector3{}, [&](std::size_t i) {
        Vector3 row;
        for (int j = 0; j < n; ++j) row += term(int(i), j);
        return row;
    });
}

DifferentialProbe differential_probe(const VectorField& field, const Vector3& x, double step) {
    require_point(x);
    if (!(step > 0.0) || !std::isfinite(step)) throw Error(ErrorKind::InvalidArgument, "probe step must be positive");
    const Vector3 axes[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    // jac[i][j] = d F_i / d x_j
    double jac[3][3];
    for (int j = 0; j < 3; ++j) {
        const Vector3 plus = field(x + step * axes[j]);
        const Vector3 minus = field(x - step * axes[j]);
        const Vector3 diff = (plus - minus) / (2.0 * step);
        jac[0][j] = diff.x;
        jac[1][j] = diff.y;
        jac[2][j] = diff.z;
    }
    return {{jac[2][1] - jac[1][2], jac[0][2] - jac[2][0], jac[1][0] - jac[0][1]}, jac[0][0] + jac[1][1] + jac[2][2]};
}

IdentitySides cross_projection_identity(const Vector3& a, const Vector3& b, const Vector3& r_hat) {
    if (!is_finite(a) || !is_finite(b) || !is_finite(r_hat))
        throw Error(ErrorKind::InvalidArgument, "identity inputs must be finite");
    if (std::abs(norm(r_hat) - 1.0) > 1e-12) throw Error(ErrorKind::NotUnit, "r_hat must be a unit vector");
    const Vector3 axb = cross(a, b);
    return {dot(axb, r_hat) * r_hat, axb + dot(r_hat, a) * cross(b, r_hat) - dot(r_hat, b) * cross(a, r_hat)};
}

TaylorProbe taylor_probe(const Vector3& x, const Vector3& a, std::span<const double> eps_list) {
    if (!is_finite(x) || !is_finite(a)) throw Error(ErrorKind::InvalidArgument, "probe inputs must be finite");
    const double rx = norm(x);
    if (rx == 0.0) throw Error(ErrorKind::DegenerateBase, "base point must be non-zero");
    TaylorProbe out;
    out.analytic = -3.0 * std::pow(rx, -5.0) * dot(x, a);
    const double base = std::pow(rx, -3.0);
    for (double eps : eps_list) {
        if (eps == 0.0 || !std::isfinite(eps) || std::abs(eps) * norm(a) >= 0.5 * rx)
            throw Error(ErrorKind::InvalidArgument, "eps must be non-zero with |eps a| < |x|/2");
        out.eps.push_back(eps);
        out.fd_slopes.push_back((std::pow(norm(x + eps * a), -3.0) - base) / eps);
    }
    return out;
}

}  // namespace ampere
