#pragma once

#include <optional>

#include "ampere/fields.hpp"
#include "ampere/geometry.hpp"
#include "ampere/quadrature.hpp"

namespace ampere {

/// A current loop C, a test loop L and optionally an oriented surface
/// spanning L.
struct LinkScene {
    Curve curve_c;
    Curve curve_l;
    std::optional<SurfaceMesh> spanning_mesh;

    double scale() const;

    /// Throws SceneError for open curves or a mesh whose boundary does not
    /// follow curve_l (every boundary vertex within 1e-6 x scale of curve_l and
    /// the same sense of circulation), CurvesTooClose when the curves come
    /// within `guard` of each other.
    void validate(double guard) const;

    /// Same scene with C and L exchanged. The spanning mesh is dropped.
    LinkScene swapped() const { return {curve_l, curve_c, std::nullopt}; }
};

struct LinkingValue {
    double value = 0.0;
    double error_estimate = 0.0;
};

/// k_B times the double integral of ((m'(t) x (l(s) - m(t))) . l'(s)) / |l - m|^3
/// over every pair of smooth pieces. Open curves are accepted, which is how
/// partial contributions of a loop are measured. Throws CurvesTooClose when
/// the curves come within spec.min_distance_guard.
LinkingValue gauss_integral(const Curve& curve_c, const Curve& curve_l, const FieldConstants& consts = {},
                            const QuadratureSpec& spec = {});

/// Gauss linking integral of a validated scene.
LinkingValue gauss_linking(const LinkScene& scene, const FieldConstants& consts = {},
                           const QuadratureSpec& spec = {});

/// Signed count of the crossings of curve_c through the mesh. curve_c is
/// sampled with chords no longer than a quarter of the shortest mesh edge and
/// every segment is tested against every grid cell.
int combinatorial_lk(const Curve& curve_c, const SurfaceMesh& spanning_mesh,
                     double transversality_tol = kDefaultTransversalityTol, Exec exec = Exec::parallel);

/// Signed area vector (1/2) sum v_i x v_{i+1} of a closed polygon.
Vector3 polygon_area_vector(const std::vector<Vector3>& loop);

}  // namespace ampere
