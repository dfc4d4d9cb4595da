#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ampere/fields.hpp"
#include "ampere/linking.hpp"

namespace ampere {

/// Loosely typed table that the cli serializes to CSV and JSON.
using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

using Quantity = std::variant<double, Vector3>;

struct ConvergenceRow {
    double scale = 0.0;  // epsilon, 1/M, step or 1/n
    Quantity measured = 0.0;
    Quantity reference = 0.0;
    double abs_error = 0.0;
    double rel_error = 0.0;
    std::string error;  // non-empty when the row could not be computed
};

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ConvergenceReport {
    std::string name;
    std::vector<ConvergenceRow> rows;  // scale descending
    double fitted_order = 0.0;         // NaN with fewer than 3 usable rows
    bool passed = false;
    std::vector<Check> checks;
    Table table;
};

/// Least-squares slope of log(error) against log(scale); rows with a zero,
/// non-finite or missing error are skipped. NaN when fewer than 3 remain.
double fitted_log_slope(const std::vector<double>& scales, const std::vector<double>& errors);

/// Small parallelogram (base, eps a, eps b) against its boundary loop:
/// relative error |E_dipole - h B_loop| / |h B_loop| for each eps, with
/// k_E = k_B = 1 by default. Passes when the errors decrease and the fitted
/// order is >= 0.9.
ConvergenceReport similitude_infinitesimal(const Vector3& base, const Vector3& a, const Vector3& b, const Vector3& r,
                                           const std::vector<double>& eps_list, double h,
                                           const FieldConstants& consts = kSimilitudeConstants,
                                           const QuadratureSpec& spec = {},
                                           DipoleAnchor anchor = DipoleAnchor::corner);

/// Dipole mesh field against h B of the mesh boundary for each M = N.
/// Passes when the relative error at the finest mesh is <= 1e-3 and the
/// fitted order is >= 0.9.
ConvergenceReport similitude_general(const SurfacePatch& patch, const Vector3& r, double h,
                                     const std::vector<int>& mesh_sizes,
                                     const FieldConstants& consts = kSimilitudeConstants,
                                     const QuadratureSpec& spec = {}, DipoleAnchor anchor = DipoleAnchor::cell);

/// Central-difference curl and divergence of the Biot-Savart field. In the
/// rows, abs_error holds |curl| and rel_error holds |div|. Every row
/// with step <= 1e-3 x max(1, distance) must have |curl|, |div| <= 1e-5, and
/// each step halving above the round-off floor must shrink |curl| by a factor
/// in [3, 5].
ConvergenceReport curl_vanishing(const Curve& curve, const std::vector<Vector3>& probe_points,
                                 const std::vector<double>& steps, const FieldConstants& consts = {},
                                 const QuadratureSpec& spec = {});

/// Off-support div E and curl E of a charged sheet, or of a dipole sheet when
/// `h` is given. Guard violations are recorded in the row and fail the report.
ConvergenceReport maxwell_probe(const SurfacePatch& patch, double sigma, std::optional<double> h,
                                const std::vector<Vector3>& probe_points, const std::vector<double>& steps,
                                const FieldConstants& consts = {}, const QuadratureSpec& spec = {});

/// The rectangular loop C_n against the unit circle, split into the z-axis leg
/// and the three far legs. The leg integral is compared with its closed form
/// n / sqrt(1 + n^2); the far-leg remainder must fall monotonically.
ConvergenceReport lemma53_convergence(const std::vector<int>& n_list, const QuadratureSpec& spec = {},
                                      const FieldConstants& consts = {}, int disk_mesh = 15);

struct CatalogEntry {
    std::string id;
    LinkScene scene;
};

struct CatalogRow {
    std::string id;
    double a = 0.0;
    double error_estimate = 0.0;
    std::int64_t lk = 0;
    double gap = 0.0;  // |A - Lk|
    double a_swapped = 0.0;
    double swapped_error_estimate = 0.0;
    double symmetry_gap = 0.0;
    bool symmetric = false;
    bool passed = false;
    std::string error;
};

struct CatalogReport {
    std::vector<CatalogRow> rows;
    bool passed = false;
    Table table;
};

/// A versus Lk for every scene, plus the C/L swap. A failing scene is
/// recorded in its row and does not stop the batch.
CatalogReport ampere_catalog(const std::vector<CatalogEntry>& scenes, const QuadratureSpec& spec = {},
                             const FieldConstants& consts = {});

/// Built-in scenes covering Lk in {-1, 0, 1, 2} with disk, dome and
/// rectangle spanners.
std::vector<CatalogEntry> default_catalog(int mesh_resolution = 15);

/// Hopf link: unit circle in the xy-plane and unit circle about +y centred at
/// (1, 0, 0). Lk = +1.
LinkScene hopf_scene(int mesh_resolution = 15);

}  // namespace ampere
