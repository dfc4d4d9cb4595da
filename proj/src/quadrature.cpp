#include "ampere/quadrature.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <numbers>

namespace ampere {

void QuadratureSpec::validate() const {
    if (nodes_per_cell < 2 || nodes_per_cell > 64)
        throw Error(ErrorKind::InvalidArgument, "nodes_per_cell must be in [2, 64]");
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerances must be positive");
    if (max_depth < 1) throw Error(ErrorKind::InvalidArgument, "max_depth must be >= 1");
    if (!(min_distance_guard >= 0.0)) throw Error(ErrorKind::InvalidArgument, "min_distance_guard must be >= 0");
}

QuadratureSpec QuadratureSpec::for_scale(double scene_scale) {
    QuadratureSpec spec;
    if (scene_scale > 0.0) spec.min_distance_guard = 1e-6 * scene_scale;
    return spec;
}

namespace {

// Newton iteration on P_n from the Chebyshev-like initial guess.
GaussLegendreRule build_rule(int n) {
    GaussLegendreRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(n - 1 - i);
        rule.nodes[lo] = -x;
        rule.nodes[hi] = x;
        rule.weights[lo] = w;
        rule.weights[hi] = w;
    }
    if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    return rule;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int n) {
    if (n < 2 || n > 64) throw Error(ErrorKind::InvalidArgument, "Gauss-Legendre order must be in [2, 64]");
    static std::array<GaussLegendreRule, 65> rules;
    static std::array<std::once_flag, 65> flags;
    const auto idx = static_cast<std::size_t>(n);
    std::call_once(flags[idx], [&] { rules[idx] = build_rule(n); });
    return rules[idx];
}

}  // namespace ampere
