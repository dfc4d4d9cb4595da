#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <vector>

#include "ampere/error.hpp"
#include "ampere/geometry.hpp"
#include "ampere/parallel.hpp"
#include "ampere/vector3.hpp"

namespace ampere {

struct QuadratureSpec {
    int nodes_per_cell = 8;
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_depth = 18;
    /// Absolute distance below which field/linking evaluations are refused.
    /// Applied by the callers; the integrators never look at geometry.
    double min_distance_guard = 1e-6;
    Exec exec = Exec::parallel;

    /// Throws InvalidArgument when a field is out of range.
    void validate() const;

    /// Default spec with the guard set to 1e-6 x scene scale.
    static QuadratureSpec for_scale(double scene_scale);

    friend bool operator==(const QuadratureSpec&, const QuadratureSpec&) = default;
};

template <class V>
struct QuadResult {
    V value{};
    double error_estimate = 0.0;
    std::size_t cells = 0;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Cached rule of order n (2 <= n <= 64); safe to call concurrently.
const GaussLegendreRule& gauss_legendre(int n);

struct Rect {
    Interval s;
    Interval t;
    double area() const { return s.length() * t.length(); }
};

namespace detail {

inline constexpr int kInitialCells1d = 8;
inline constexpr int kInitialCells2d = 8;  // per side

template <class V, class F>
V gauss_cell_1d(F& f, Interval iv, const GaussLegendreRule& rule) {
    const double half = 0.5 * iv.length();
    const double mid = 0.5 * (iv.begin + iv.end);
    V sum{};
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
    return half * sum;
}

template <class V, class F>
V gauss_cell_2d(F& f, const Rect& r, const GaussLegendreRule& rule) {
    const double hs = 0.5 * r.s.length(), ms = 0.5 * (r.s.begin + r.s.end);
    const double ht = 0.5 * r.t.length(), mt = 0.5 * (r.t.begin + r.t.end);
    V sum{};
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double s = ms + hs * rule.nodes[i];
        V row{};
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) row += rule.weights[j] * f(s, mt + ht * rule.nodes[j]);
        sum += rule.weights[i] * row;
    }
    return (hs * ht) * sum;
}

// A cell is settled once its error estimate is at or below the tolerance
// share, or already at round-off level relative to the cell value.
inline bool settled(double err, double tol, double value_magnitude) {
    return err <= tol || err <= 64.0 * std::numeric_limits<double>::epsilon() * value_magnitude;
}

[[noreturn]] inline void throw_no_convergence(double err, double tol, int depth) {
    std::ostringstream msg;
    msg << "error estimate " << err << " above tolerance " << tol << " at depth " << depth;
    throw Error(ErrorKind::NoConvergence, msg.str());
}

template <class V, class F>
void adapt_1d(F& f, Interval iv, V coarse, double tol, int depth, const QuadratureSpec& spec,
              const GaussLegendreRule& rule, QuadResult<V>& out, std::vector<Interval>* cells) {
    const double mid = 0.5 * (iv.begin + iv.end);
    const Interval left{iv.begin, mid}, right{mid, iv.end};
    const V l = gauss_cell_1d<V>(f, left, rule);
    const V r = gauss_cell_1d<V>(f, right, rule);
    const V fine = l + r;
    const double err = magnitude(fine - coarse);
    if (settled(err, tol, magnitude(fine))) {
        out.value += fine;
        out.error_estimate += err;
        out.cells += 2;
        if (cells) {
            cells->push_back(left);
            cells->push_back(right);
        }
        return;
    }
    if (depth >= spec.max_depth) throw_no_convergence(err, tol, depth);
    adapt_1d(f, left, l, 0.5 * tol, depth + 1, spec, rule, out, cells);
    adapt_1d(f, right, r, 0.5 * tol, depth + 1, spec, rule, out, cells);
}

template <class V, class F>
void adapt_2d(F& f, const Rect& rect, V coarse, double tol, int depth, const QuadratureSpec& spec,
              const GaussLegendreRule& rule, QuadResult<V>& out, std::vector<Rect>* cells) {
    const double ms = 0.5 * (rect.s.begin + rect.s.end);
    const double mt = 0.5 * (rect.t.begin + rect.t.end);
    const Rect kids[4] = {{{rect.s.begin, ms}, {rect.t.begin, mt}},
                          {{ms, rect.s.end}, {rect.t.begin, mt}},
                          {{rect.s.begin, ms}, {mt, rect.t.end}},
                          {{ms, rect.s.end}, {mt, rect.t.end}}};
    V parts[4];
    V fine{};
    for (int k = 0; k < 4; ++k) {
        parts[k] = gauss_cell_2d<V>(f, kids[k], rule);
        fine += parts[k];
    }
    const double err = magnitude(fine - coarse);
    if (settled(err, tol, magnitude(fine))) {
        out.value += fine;
        out.error_estimate += err;
        out.cells += 4;
        if (cells)
            for (const auto& k : kids) cells->push_back(k);
        return;
    }
    if (depth >= spec.max_depth) throw_no_convergence(err, tol, depth);
    for (int k = 0; k < 4; ++k) adapt_2d(f, kids[k], parts[k], 0.25 * tol, depth + 1, spec, rule, out, cells);
}

template <class V, class F>
QuadResult<V> integrate_1d_impl(F& f, Interval iv, const QuadratureSpec& spec, std::vector<Interval>* cells_out) {
    spec.validate();
    if (!(iv.begin < iv.end) || !std::isfinite(iv.begin) || !std::isfinite(iv.end))
        throw Error(ErrorKind::InvalidArgument, "integration interval must satisfy a < b");
    const auto& rule = gauss_legendre(spec.nodes_per_cell);
    constexpr int K = kInitialCells1d;
    const double width = iv.length() / K;
    auto cell = [&](int k) {
        return Interval{iv.begin + width * k, k + 1 == K ? iv.end : iv.begin + width * (k + 1)};
    };

    std::vector<V> coarse(K);
    for_each_index(K, spec.exec, [&](std::size_t k) { coarse[k] = gauss_cell_1d<V>(f, cell(int(k)), rule); });
    V estimate{};
    for (const auto& c : coarse) estimate += c;
    const double tol = std::max(spec.abs_tol, spec.rel_tol * magnitude(estimate));

    std::vector<QuadResult<V>> parts(K);
    std::vector<std::vector<Interval>> part_cells(cells_out ? K : 0);
    for_each_index(K, spec.exec, [&](std::size_t k) {
        adapt_1d<V>(f, cell(int(k)), coarse[k], tol / K, 0, spec, rule, parts[k],
                    cells_out ? &part_cells[k] : nullptr);
    });
    QuadResult<V> out;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        out.value += parts[k].value;
        out.error_estimate += parts[k].error_estimate;
        out.cells += parts[k].cells;
        if (cells_out) cells_out->insert(cells_out->end(), part_cells[k].begin(), part_cells[k].end());
    }
    return out;
}

template <class V, class F>
QuadResult<V> integrate_2d_impl(F& f, const Rect& rect, const QuadratureSpec& spec, std::vector<Rect>* cells_out) {
    spec.validate();
    if (!(rect.s.begin < rect.s.end) || !(rect.t.begin < rect.t.end))
        throw Error(ErrorKind::InvalidArgument, "integration rectangle must be non-empty");
    const auto& rule = gauss_legendre(spec.nodes_per_cell);
    constexpr int K = kInitialCells2d;
    const double ws = rect.s.length() / K, wt = rect.t.length() / K;
    auto cell = [&](int k) {
        const int i = k / K, j = k % K;
        return Rect{{rect.s.begin + ws * i, i + 1 == K ? rect.s.end : rect.s.begin + ws * (i + 1)},
                    {rect.t.begin + wt * j, j + 1 == K ? rect.t.end : rect.t.begin + wt * (j + 1)}};
    };
    constexpr std::size_t N = std::size_t(K) * K;

    std::vector<V> coarse(N);
    for_each_index(N, spec.exec, [&](std::size_t k) { coarse[k] = gauss_cell_2d<V>(f, cell(int(k)), rule); });
    V estimate{};
    for (const auto& c : coarse) estimate += c;
    const double tol = std::max(spec.abs_tol, spec.rel_tol * magnitude(estimate));

    std::vector<QuadResult<V>> parts(N);
    std::vector<std::vector<Rect>> part_cells(cells_out ? N : 0);
    for_each_index(N, spec.exec, [&](std::size_t k) {
        adapt_2d<V>(f, cell(int(k)), coarse[k], tol / double(N), 0, spec, rule, parts[k],
                    cells_out ? &part_cells[k] : nullptr);
    });
    QuadResult<V> out;
    for (std::size_t k = 0; k < N; ++k) {
        out.value += parts[k].value;
        out.error_estimate += parts[k].error_estimate;
        out.cells += parts[k].cells;
        if (cells_out) cells_out->insert(cells_out->end(), part_cells[k].begin(), part_cells[k].end());
    }
    return out;
}

}  // namespace detail

/// Adaptive composite Gauss-Legendre integral of f over [a, b].
///
/// The interval is split into 8 cells; each cell is refined dyadically until
/// the difference between its one- and two-cell evaluations is below its
/// share of max(abs_tol, rel_tol |I|). The refinement tree depends only on f
/// and the spec, and cell results are folded in order, so the value is
/// bit-identical for every thread count. V is double or Vector3 (vector
/// integrands share one tree).
template <class V, class F>
QuadResult<V> integrate_1d(F&& f, Interval iv, const QuadratureSpec& spec = {}) {
    return detail::integrate_1d_impl<V>(f, iv, spec, nullptr);
}

/// 2D analogue of integrate_1d on an 8x8 grid with quadtree refinement.
template <class V, class F>
QuadResult<V> integrate_2d(F&& f, const Rect& rect, const QuadratureSpec& spec = {}) {
    return detail::integrate_2d_impl<V>(f, rect, spec, nullptr);
}

/// Leaf cells the adaptive integrator settles on for f.
template <class V, class F>
std::vector<Interval> adaptive_partition_1d(F&& f, Interval iv, const QuadratureSpec& spec = {}) {
    std::vector<Interval> cells;
    detail::integrate_1d_impl<V>(f, iv, spec, &cells);
    return cells;
}

template <class V, class F>
std::vector<Rect> adaptive_partition_2d(F&& f, const Rect& rect, const QuadratureSpec& spec = {}) {
    std::vector<Rect> cells;
    detail::integrate_2d_impl<V>(f, rect, spec, &cells);
    return cells;
}

/// Composite rule on a fixed partition (no adaptivity).
template <class V, class F>
V integrate_on_cells(F&& f, const std::vector<Interval>& cells, int nodes_per_cell = 8) {
    const auto& rule = gauss_legendre(nodes_per_cell);
    V sum{};
    for (const auto& c : cells) sum += detail::gauss_cell_1d<V>(f, c, rule);
    return sum;
}

template <class V, class F>
V integrate_on_cells(F&& f, const std::vector<Rect>& cells, int nodes_per_cell = 8) {
    const auto& rule = gauss_legendre(nodes_per_cell);
    V sum{};
    for (const auto& c : cells) sum += detail::gauss_cell_2d<V>(f, c, rule);
    return sum;
}

}  // namespace ampere
