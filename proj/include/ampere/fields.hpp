#pragma once

#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "ampere/geometry.hpp"
#include "ampere/parallel.hpp"
#include "ampere/quadrature.hpp"
#include "ampere/vector3.hpp"

namespace ampere {

/// Prefactors of the Coulomb (k_E) and Biot-Savart (k_B) integrals.
struct FieldConstants {
    double k_E = 1.0;
    double k_B = 1.0 / (4.0 * std::numbers::pi);

    void validate() const;
    friend bool operator==(const FieldConstants&, const FieldConstants&) = default;
};

/// Prefactors with k_E = k_B = 1, under which E_dipole = h B exactly in the
/// infinitesimal limit.
inline constexpr FieldConstants kSimilitudeConstants{1.0, 1.0};

/// Two copies of a surface at +/- h/2 along its normal carrying +/- sigma.
struct DipoleSheetSpec {
    double sigma = 1.0;
    double h = 0.0;
    void validate() const;
};

/// Where a panel's dipole moment sits. `corner` is the panel base point,
/// exactly as in the closed-form parallelogram formula; `centroid` moves the
/// same moment to the panel centre, which turns a mesh sum into a midpoint
/// rule (second order instead of first). `cell` is only meaningful for
/// meshes: the moment of grid cell (i, j) is its exact vector area
/// (1/2) d1 x d2 placed at the mean of its four nodes. Cells tile the
/// surface, so the total moment matches the boundary polygon on curved maps
/// too; for a single panel it falls back to `centroid`.
enum class DipoleAnchor { corner, centroid, cell };

/// B(x) = k_B * closed-integral of dm/dt x (x - m(t)) / |x - m(t)|^3 dt.
///
/// Integrated piece by piece over the curve's smooth pieces. Throws
/// NearSingular if x is within spec.min_distance_guard of the curve.
Vector3 biot_savart(const Curve& curve, const Vector3& x, const FieldConstants& consts = {},
                    const QuadratureSpec& spec = {});

/// biot_savart at many points; parallel over points, results in input order.
std::vector<Vector3> biot_savart_batch(const Curve& curve, std::span<const Vector3> points,
                                       const FieldConstants& consts = {}, const QuadratureSpec& spec = {});

/// Coulomb field of a uniformly charged patch.
Vector3 coulomb_surface_field(const SurfacePatch& patch, double sigma, const Vector3& x,
                              const FieldConstants& consts = {}, const QuadratureSpec& spec = {});

/// Field of the two sheets obtained by shifting the patch by +/- (h/2) n_S
/// with densities +/- sigma. Both sheets are integrated in one pass over
/// the parameter square so the h = 0 case cancels exactly. Charge is
/// measured per unit area of the unshifted surface.
Vector3 dipole_sheet_field_exact(const SurfacePatch& patch, const DipoleSheetSpec& dp, const Vector3& x,
                                 const FieldConstants& consts = {}, const QuadratureSpec& spec = {});

/// Closed-form field of one parallelogram dipole panel:
///   k_E h sigma / |r - x|^3 (3 (u . A) u - A),  u = (r - x)/|r - x|, A = area vector.
/// Throws NearSingular when the field point is within `guard` of the anchor.
Vector3 dipole_panel_field(const Panel& panel, const DipoleSheetSpec& dp, const Vector3& x,
                           const FieldConstants& consts = {}, DipoleAnchor anchor = DipoleAnchor::corner,
                           double guard = 1e-6);

/// Point dipole of moment sigma h `area` at `origin`; the kernel shared by
/// the panel and mesh sums.
Vector3 point_dipole_field(const Vector3& origin, const Vector3& area, const DipoleSheetSpec& dp, const Vector3& x,
                           const FieldConstants& consts = {}, double guard = 1e-6);

/// Sum of dipole_panel_field over every panel (ordered reduction).
Vector3 dipole_mesh_field(const SurfaceMesh& mesh, const DipoleSheetSpec& dp, const Vector3& x,
                          const FieldConstants& consts = {}, DipoleAnchor anchor = DipoleAnchor::corner,
                          double guard = 1e-6, Exec exec = Exec::parallel);

using VectorField = std::function<Vector3(const Vector3&)>;

struct DifferentialProbe {
    Vector3 curl;
    double divergence = 0.0;
};

/// Second-order central-difference curl and divergence (6 field evaluations).
DifferentialProbe differential_probe(const VectorField& field, const Vector3& x, double step);

/// 1e-3 x the given distance to the nearest source.
inline double default_probe_step(double distance_to_source) { return 1e-3 * distance_to_source; }

struct IdentitySides {
    Vector3 lhs;
    Vector3 rhs;
};

/// ((a x b) . r) r  versus  a x b + (r . a) b x r - (r . b) a x r, for unit r.
/// Throws NotUnit when | |r| - 1 | > 1e-12.
IdentitySides cross_projection_identity(const Vector3& a, const Vector3& b, const Vector3& r_hat);

struct TaylorProbe {
    std::vector<double> eps;
    std::vector<double> fd_slopes;  // (|x + eps a|^-3 - |x|^-3) / eps
    double analytic = 0.0;          // -3 |x|^-5 (x . a)
};

/// First-order expansion of |x + eps a|^-3. Throws DegenerateBase for x = 0
/// and InvalidArgument when some eps is zero or |eps a| >= |x|/2.
TaylorProbe taylor_probe(const Vector3& x, const Vector3& a, std::span<const double> eps_list);

}  // namespace ampere
