#include "ampere/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "ampere/error.hpp"

namespace ampere {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_finite(const Vector3& v, const char* what) {
    if (!is_finite(v)) throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be finite");
}

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be finite");
}

double point_segment_distance(const Vector3& x, const Vector3& a, const Vector3& b) {
    const Vector3 d = b - a;
    const double len2 = norm2(d);
    if (len2 == 0.0) return norm(x - a);
    const double s = std::clamp(dot(x - a, d) / len2, 0.0, 1.0);
    return norm(x - (a + s * d));
}

std::vector<Vector3> rect_loop_vertices(int n) {
    const double h = n;
    return {{0, 0, -h}, {0, 0, h}, {h, 0, h}, {h, 0, -h}};
}

double circle_distance(const CircleShape& c, const Vector3& x) {
    const Vector3 a = normalized(c.axis);
    const Vector3 d = x - c.center;
    const double z = dot(d, a);
    const double rho = norm(d - z * a);
    return std::hypot(z, rho - c.radius);
}

// Golden-section minimisation of a unimodal-ish function on [lo, hi].
template <class F>
double golden_min(F&& f, double lo, double hi, int iterations = 80) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int k = 0; k < iterations; ++k) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - g * (b - a); fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + g * (b - a); fd = f(d);
        }
    }
    return std::min({fc, fd, f(lo), f(hi)});
}

}  // namespace

// ---------------------------------------------------------------------------
// BoundingBox

void BoundingBox::expand(const Vector3& p) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
}

void BoundingBox::expand(const BoundingBox& b) {
    if (b.empty()) return;
    expand(b.lo);
    expand(b.hi);
}

double BoundingBox::diagonal() const { return empty() ? 0.0 : norm(hi - lo); }

std::pair<Vector3, Vector3> plane_basis(const Vector3& axis) {
    const Vector3 a = normalized(axis);
    // Coordinate direction least aligned with the axis; first one wins ties.
    Vector3 e{1, 0, 0};
    if (std::abs(a.y) < std::abs(a.x) && std::abs(a.y) <= std::abs(a.z)) e = {0, 1, 0};
    else if (std::abs(a.z) < std::abs(a.x) && std::abs(a.z) < std::abs(a.y)) e = {0, 0, 1};
    const Vector3 e1 = normalized(e - dot(e, a) * a);
    return {e1, cross(a, e1)};
}

// ---------------------------------------------------------------------------
// SampledPolyline

std::size_t SampledPolyline::segment_count() const {
    if (vertices.size() < 2) return 0;
    return closed ? vertices.size() : vertices.size() - 1;
}

std::pair<Vector3, Vector3> SampledPolyline::segment(std::size_t i) const {
    return {vertices[i], vertices[(i + 1) % vertices.size()]};
}

// ---------------------------------------------------------------------------
// Curve construction

Curve Curve::circle(const Vector3& center, double radius, const Vector3& axis, Orientation orientation) {
    require_finite(center, "circle center");
    require_finite(axis, "circle axis");
    require_finite(radius, "circle radius");
    if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "circle radius must be positive");
    if (norm(axis) == 0.0) throw Error(ErrorKind::InvalidArgument, "circle axis must be non-zero");
    return Curve(CircleShape{center, radius, axis, orientation});
}

Curve Curve::polyline(std::vector<Vector3> vertices, bool closed) {
    if (vertices.size() < 2 || (closed && vertices.size() < 3))
        throw Error(ErrorKind::InvalidArgument, "polyline needs at least 2 vertices (3 if closed)");
    for (const auto& v : vertices) require_finite(v, "polyline vertex");
    return Curve(PolyLineShape{std::move(vertices), closed});
}

Curve Curve::rect_loop_cn(int n) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "rect_loop_cn needs n >= 1");
    return Curve(RectLoopShape{n});
}

Curve Curve::composite(std::vector<Curve> parts) {
    if (parts.empty()) throw Error(ErrorKind::InvalidArgument, "composite curve needs at least one part");
    return Curve(CompositeShape{std::make_shared<const std::vector<Curve>>(std::move(parts))});
}

Curve::Kind Curve::kind() const {
    switch (shape_.index()) {
        case 0: return Kind::circle;
        case 1: return Kind::polyline;
        case 2: return Kind::rect_loop_cn;
        default: return Kind::composite;
    }
}

const std::vector<Curve>* Curve::as_composite() const {
    const auto* c = std::get_if<CompositeShape>(&shape_);
    return c ? c->parts.get() : nullptr;
}

Curve Curve::reversed() const {
    Curve copy = *this;
    copy.reversed_ = !reversed_;
    return copy;
}

// ---------------------------------------------------------------------------
// Curve evaluation

namespace {

std::size_t polyline_segments(const std::vector<Vector3>& v, bool closed) {
    return closed ? v.size() : v.size() - 1;
}

CurvePoint eval_polyline(const std::vector<Vector3>& v, bool closed, double s, bool prefer_left) {
    const std::size_t nseg = polyline_segments(v, closed);
    const std::size_t nv = v.size();
    const double fl = std::floor(s);
    std::size_t k;
    if (s == fl) {
        // At a vertex: outgoing segment unless told otherwise or at the end.
        const auto idx = static_cast<std::size_t>(fl);
        if ((prefer_left && idx > 0) || idx == nseg) k = idx - 1;
        else k = idx;
        return {v[idx % nv], v[(k + 1) % nv] - v[k]};
    }
    k = std::min(static_cast<std::size_t>(fl), nseg - 1);
    const Vector3& a = v[k];
    const Vector3& b = v[(k + 1) % nv];
    const Vector3 d = b - a;
    return {a + (s - static_cast<double>(k)) * d, d};
}

}  // namespace

Interval Curve::param_interval() const {
    return std::visit(
        [](const auto& s) -> Interval {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, CircleShape>) {
                return {0.0, kTwoPi};
            } else if constexpr (std::is_same_v<S, PolyLineShape>) {
                return {0.0, static_cast<double>(polyline_segments(s.vertices, s.closed))};
            } else if constexpr (std::is_same_v<S, RectLoopShape>) {
                return {0.0, 4.0};
            } else {
                double total = 0.0;
                for (const auto& p : *s.parts) total += p.param_interval().length();
                return {0.0, total};
            }
        },
        shape_);
}

bool Curve::closed() const {
    return std::visit(
        [this](const auto& s) -> bool {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, CircleShape>) {
                return true;
            } else if constexpr (std::is_same_v<S, PolyLineShape>) {
                return s.closed;
            } else if constexpr (std::is_same_v<S, RectLoopShape>) {
                return true;
            } else {
                const bool all_closed =
                    std::all_of(s.parts->begin(), s.parts->end(), [](const Curve& c) { return c.closed(); });
                if (all_closed) return true;
                const Interval iv = param_interval();
                const double scale = std::max(1.0, bounds().diagonal());
                return norm(eval(iv.begin).position - eval(iv.end).position) <= 1e-12 * scale;
            }
        },
        shape_);
}

CurvePoint Curve::eval(double t) const {
    const Interval iv = param_interval();
    if (!(t >= iv.begin && t <= iv.end)) {
        std::ostringstream msg;
        msg << "t = " << t << " outside [" << iv.begin << ", " << iv.end << "]";
        throw Error(ErrorKind::ParamOutOfRange, msg.str());
    }
    return eval_side(t, false);
}

CurvePoint Curve::eval_side(double t, bool prefer_left) const {
    if (!reversed_) return eval_forward(t, prefer_left);
    const Interval iv = param_interval();
    CurvePoint p = eval_forward(iv.begin + iv.end - t, !prefer_left);
    p.tangent = -p.tangent;
    return p;
}

CurvePoint Curve::eval_forward(double s, bool prefer_left) const {
    return std::visit(
        [&](const auto& sh) -> CurvePoint {
            using S = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<S, CircleShape>) {
                const auto [e1, e2] = plane_basis(sh.axis);
                const double sign = sh.orientation == Orientation::ccw ? 1.0 : -1.0;
                double c = std::cos(s), sn = std::sin(s);
                if (s == kTwoPi) { c = 1.0; sn = 0.0; }
                return {sh.center + sh.radius * (c * e1 + sign * sn * e2),
                        sh.radius * (-sn * e1 + sign * c * e2)};
            } else if constexpr (std::is_same_v<S, PolyLineShape>) {
                return eval_polyline(sh.vertices, sh.closed, s, prefer_left);
            } else if constexpr (std::is_same_v<S, RectLoopShape>) {
                return eval_polyline(rect_loop_vertices(sh.n), true, s, prefer_left);
            } else {
                const auto& parts = *sh.parts;
                double offset = 0.0;
                for (std::size_t k = 0; k < parts.size(); ++k) {
                    const Interval piv = parts[k].param_interval();
                    const double end = offset + piv.length();
                    const bool last = k + 1 == parts.size();
                    const bool inside = prefer_left ? (s <= end && (s > offset || k == 0))
                                                    : (s < end || last);
                    if (inside) {
                        const double local = std::clamp(piv.begin + (s - offset), piv.begin, piv.end);
                        return parts[k].eval_side(local, prefer_left);
                    }
                    offset = end;
                }
                return parts.back().eval_side(parts.back().param_interval().end, prefer_left);
            }
        },
        shape_);
}

std::vector<CurvePiece> Curve::pieces_forward() const {
    return std::visit(
        [](const auto& sh) -> std::vector<CurvePiece> {
            using S = std::decay_t<decltype(sh)>;
            std::vector<CurvePiece> out;
            auto from_vertices = [&out](const std::vector<Vector3>& v, bool closed) {
                const std::size_t nseg = polyline_segments(v, closed);
                for (std::size_t k = 0; k < nseg; ++k) {
                    if (v[k] == v[(k + 1) % v.size()]) continue;  // zero-length segment contributes nothing
                    out.push_back({{static_cast<double>(k), static_cast<double>(k + 1)}, true});
                }
            };
            if constexpr (std::is_same_v<S, CircleShape>) {
                out.push_back({{0.0, kTwoPi}, false});
            } else if constexpr (std::is_same_v<S, PolyLineShape>) {
                from_vertices(sh.vertices, sh.closed);
            } else if constexpr (std::is_same_v<S, RectLoopShape>) {
                from_vertices(rect_loop_vertices(sh.n), true);
            } else {
                double offset = 0.0;
                for (const auto& part : *sh.parts) {
                    const Interval piv = part.param_interval();
                    for (auto p : part.pieces()) {
                        p.interval.begin += offset - piv.begin;
                        p.interval.end += offset - piv.begin;
                        out.push_back(p);
                    }
                    offset += piv.length();
                }
            }
            return out;
        },
        shape_);
}

std::vector<CurvePiece> Curve::pieces() const {
    auto out = pieces_forward();
    if (!reversed_) return out;
    const Interval iv = param_interval();
    std::reverse(out.begin(), out.end());
    for (auto& p : out) p.interval = {iv.begin + iv.end - p.interval.end, iv.begin + iv.end - p.interval.begin};
    return out;
}

double Curve::distance_to(const Vector3& x) const {
    return std::visit(
        [&x](const auto& sh) -> double {
            using S = std::decay_t<decltype(sh)>;
            auto polyline_distance = [&x](const std::vector<Vector3>& v, bool closed) {
                double best = std::numeric_limits<double>::infinity();
                const std::size_t nseg = polyline_segments(v, closed);
                for (std::size_t k = 0; k < nseg; ++k)
                    best = std::min(best, point_segment_distance(x, v[k], v[(k + 1) % v.size()]));
                return best;
            };
            if constexpr (std::is_same_v<S, CircleShape>) {
                return circle_distance(sh, x);
            } else if constexpr (std::is_same_v<S, PolyLineShape>) {
                return polyline_distance(sh.vertices, sh.closed);
            } else if constexpr (std::is_same_v<S, RectLoopShape>) {
                return polyline_distance(rect_loop_vertices(sh.n), true);
            } else {
                double best = std::numeric_limits<double>::infinity();
                for (const auto& p : *sh.parts) best = std::min(best, p.distance_to(x));
                return best;
            }
        },
        shape_);
}

std::vector<SampledPolyline> Curve::sample(double max_chord) const {
    if (!(max_chord > 0.0)) throw Error(ErrorKind::InvalidArgument, "max_chord must be positive");
    if (const auto* parts = as_composite()) {
        const bool all_closed =
            std::all_of(parts->begin(), parts->end(), [](const Curve& c) { return c.closed(); });
        if (all_closed) {
            std::vector<SampledPolyline> loops;
            auto ordered = *parts;
            if (reversed_) {
                std::reverse(ordered.begin(), ordered.end());
                for (auto& c : ordered) c = c.reversed();
            }
            for (const auto& c : ordered) {
                auto sub = c.sample(max_chord);
                loops.insert(loops.end(), sub.begin(), sub.end());
            }
            return loops;
        }
    }

    SampledPolyline out;
    out.closed = closed();
    for (const auto& piece : pieces()) {
        const Interval iv = piece.interval;
        std::size_t k = 1;
        if (!piece.straight) {
            double length = 0.0;
            constexpr int kProbe = 64;
            Vector3 prev = eval_side(iv.begin, false).position;
            for (int i = 1; i <= kProbe; ++i) {
                const Vector3 p = eval_side(iv.begin + iv.length() * i / kProbe, true).position;
                length += norm(p - prev);
                prev = p;
            }
            k = std::max<std::size_t>(9, static_cast<std::size_t>(std::ceil(length / max_chord)));
            // Odd counts keep the half-period point (often a symmetric crossing) off the vertex set.
            k |= 1;
        }
        for (std::size_t i = 0; i < k; ++i)
            out.vertices.push_back(eval_side(iv.begin + iv.length() * static_cast<double>(i) / static_cast<double>(k), false).position);
    }
    if (!out.closed) out.vertices.push_back(eval(param_interval().end).position);
    return {out};
}

BoundingBox Curve::bounds() const {
    return std::visit(
        [](const auto& sh) -> BoundingBox {
            using S = std::decay_t<decltype(sh)>;
            BoundingBox box;
            if constexpr (std::is_same_v<S, CircleShape>) {
                const Vector3 a = normalized(sh.axis);
                const Vector3 ext{sh.radius * std::sqrt(std::max(0.0, 1 - a.x * a.x)),
                                  sh.radius * std::sqrt(std::max(0.0, 1 - a.y * a.y)),
                                  sh.radius * std::sqrt(std::max(0.0, 1 - a.z * a.z))};
                box.expand(sh.center - ext);
                box.expand(sh.center + ext);
            } else if constexpr (std::is_same_v<S, PolyLineShape>) {
                for (const auto& v : sh.vertices) box.expand(v);
            } else if constexpr (std::is_same_v<S, RectLoopShape>) {
                for (const auto& v : rect_loop_vertices(sh.n)) box.expand(v);
            } else {
                for (const auto& p : *sh.parts) box.expand(p.bounds());
            }
            return box;
        },
        shape_);
}

double min_distance(const Curve& a, const Curve& b) {
    auto one_way = [](const Curve& from, const Curve& to) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& piece : from.pieces()) {
            const Interval iv = piece.interval;
            const int samples = piece.straight ? 64 : 256;
            const double h = iv.length() / samples;
            int best_i = 0;
            double best_piece = std::numeric_limits<double>::infinity();
            for (int i = 0; i <= samples; ++i) {
                const double t = std::min(iv.end, iv.begin + h * i);
                const double d = to.distance_to(from.eval(t).position);
                if (d < best_piece) { best_piece = d; best_i = i; }
            }
            const double lo = std::max(iv.begin, iv.begin + h * (best_i - 1));
            const double hi = std::min(iv.end, iv.begin + h * (best_i + 1));
            const double refined =
                golden_min([&](double t) { return to.distance_to(from.eval(t).position); }, lo, hi);
            best = std::min({best, best_piece, refined});
        }
        return best;
    };
    return std::min(one_way(a, b), one_way(b, a));
}

// ---------------------------------------------------------------------------
// SurfacePatch

SurfacePatch SurfacePatch::planar_rect(const Vector3& corner, const Vector3& edge_a, const Vector3& edge_b) {
    require_finite(corner, "rect corner");
    require_finite(edge_a, "rect edge_a");
    require_finite(edge_b, "rect edge_b");
    const double area = norm(cross(edge_a, edge_b));
    if (!(area > 1e-14 * norm(edge_a) * norm(edge_b)) || area == 0.0)
        throw Error(ErrorKind::DegeneratePatch, "rect edges are parallel or zero");
    return SurfacePatch(PlanarRectShape{corner, edge_a, edge_b});
}

SurfacePatch SurfacePatch::disk(const Vector3& center, double radius, const Vector3& axis) {
    require_finite(center, "disk center");
    require_finite(axis, "disk axis");
    require_finite(radius, "disk radius");
    if (!(radius > 0.0) || norm(axis) == 0.0)
        throw Error(ErrorKind::DegeneratePatch, "disk needs a positive radius and non-zero axis");
    return SurfacePatch(DiskShape{center, radius, axis});
}

SurfacePatch SurfacePatch::dome(const Vector3& center, double radius, const Vector3& axis, double height) {
    require_finite(center, "dome center");
    require_finite(axis, "dome axis");
    require_finite(radius, "dome radius");
    require_finite(height, "dome height");
    if (!(radius > 0.0) || norm(axis) == 0.0)
        throw Error(ErrorKind::DegeneratePatch, "dome needs a positive radius and non-zero axis");
    return SurfacePatch(DomeShape{center, radius, axis, height});
}

SurfacePatch::Kind SurfacePatch::kind() const {
    switch (shape_.index()) {
        case 0: return Kind::planar_rect;
        case 1: return Kind::disk;
        default: return Kind::dome;
    }
}

namespace {

// Elliptical square-to-disk map in the local (e1, e2) frame, unit radius.
struct DiskLocal {
    double x, y, x_u, x_v, y_u, y_v;
};

DiskLocal disk_local(double u, double v) {
    const double a = 2.0 * u - 1.0;
    const double b = 2.0 * v - 1.0;
    const double sa = std::sqrt(1.0 - 0.5 * a * a);
    const double sb = std::sqrt(1.0 - 0.5 * b * b);
    return {a * sb, b * sa, 2.0 * sb, -a * b / sb, -a * b / sa, 2.0 * sa};
}

}  // namespace

SurfaceFrame SurfacePatch::eval(double u, double v) const {
    return std::visit(
        [u, v](const auto& sh) -> SurfaceFrame {
            using S = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<S, PlanarRectShape>) {
                return {sh.corner + u * sh.edge_a + v * sh.edge_b, sh.edge_a, sh.edge_b};
            } else {
                const auto [e1, e2] = plane_basis(sh.axis);
                const DiskLocal d = disk_local(u, v);
                SurfaceFrame f{sh.center + sh.radius * (d.x * e1 + d.y * e2),
                               sh.radius * (d.x_u * e1 + d.y_u * e2),
                               sh.radius * (d.x_v * e1 + d.y_v * e2)};
                if constexpr (std::is_same_v<S, DomeShape>) {
                    const Vector3 a = normalized(sh.axis);
                    const double lift = sh.height * (1.0 - d.x * d.x - d.y * d.y);
                    const double lift_u = -2.0 * sh.height * (d.x * d.x_u + d.y * d.y_u);
                    const double lift_v = -2.0 * sh.height * (d.x * d.x_v + d.y * d.y_v);
                    f.point += lift * a;
                    f.du += lift_u * a;
                    f.dv += lift_v * a;
                }
                return f;
            }
        },
        shape_);
}

Vector3 SurfacePatch::unit_normal(double u, double v) const {
    const SurfaceFrame f = eval(u, v);
    return normalized(cross(f.du, f.dv));
}

double SurfacePatch::distance_to(const Vector3& x) const {
    return std::visit(
        [this, &x](const auto& sh) -> double {
            using S = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<S, PlanarRectShape>) {
                const Vector3 n = normalized(cross(sh.edge_a, sh.edge_b));
                const Vector3 w = x - sh.corner;
                const double h = dot(w, n);
                const Vector3 q = w - h * n;
                const double aa = dot(sh.edge_a, sh.edge_a), ab = dot(sh.edge_a, sh.edge_b),
                             bb = dot(sh.edge_b, sh.edge_b);
                const double qa = dot(q, sh.edge_a), qb = dot(q, sh.edge_b);
                const double det = aa * bb - ab * ab;
                const double s = (qa * bb - qb * ab) / det;
                const double t = (qb * aa - qa * ab) / det;
                if (s >= 0 && s <= 1 && t >= 0 && t <= 1) return std::abs(h);
                const Vector3 c0 = sh.corner, c1 = sh.corner + sh.edge_a,
                              c2 = sh.corner + sh.edge_a + sh.edge_b, c3 = sh.corner + sh.edge_b;
                return std::min({point_segment_distance(x, c0, c1), point_segment_distance(x, c1, c2),
                                 point_segment_distance(x, c2, c3), point_segment_distance(x, c3, c0)});
            } else if constexpr (std::is_same_v<S, DiskShape>) {
                const Vector3 a = normalized(sh.axis);
                const Vector3 d = x - sh.center;
                const double z = dot(d, a);
                const double rho = norm(d - z * a);
                return rho <= sh.radius ? std::abs(z) : std::hypot(z, rho - sh.radius);
            } else {
                // Grid search followed by a shrinking pattern search.
                constexpr int kGrid = 48;
                double best = std::numeric_limits<double>::infinity();
                double bu = 0.5, bv = 0.5;
                for (int i = 0; i <= kGrid; ++i)
                    for (int j = 0; j <= kGrid; ++j) {
                        const double u = double(i) / kGrid, v = double(j) / kGrid;
                        const double d = norm(x - point(u, v));
                        if (d < best) { best = d; bu = u; bv = v; }
                    }
                double step = 1.0 / kGrid;
                while (step > 1e-12) {
                    bool moved = false;
                    for (const auto& [du, dv] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
                        const double u = std::clamp(bu + du * step, 0.0, 1.0);
                        const double v = std::clamp(bv + dv * step, 0.0, 1.0);
                        const double d = norm(x - point(u, v));
                        if (d < best) { best = d; bu = u; bv = v; moved = true; }
                    }
                    if (!moved) step *= 0.5;
                }
                return best;
            }
        },
        shape_);
}

BoundingBox SurfacePatch::bounds() const {
    return std::visit(
        [](const auto& sh) -> BoundingBox {
            using S = std::decay_t<decltype(sh)>;
            BoundingBox box;
            if constexpr (std::is_same_v<S, PlanarRectShape>) {
                box.expand(sh.corner);
                box.expand(sh.corner + sh.edge_a);
                box.expand(sh.corner + sh.edge_b);
                box.expand(sh.corner + sh.edge_a + sh.edge_b);
            } else {
                const Vector3 a = normalized(sh.axis);
                const Vector3 ext{sh.radius * std::sqrt(std::max(0.0, 1 - a.x * a.x)),
                                  sh.radius * std::sqrt(std::max(0.0, 1 - a.y * a.y)),
                                  sh.radius * std::sqrt(std::max(0.0, 1 - a.z * a.z))};
                box.expand(sh.center - ext);
                box.expand(sh.center + ext);
                if constexpr (std::is_same_v<S, DomeShape>) box.expand(sh.center + sh.height * a);
            }
            return box;
        },
        shape_);
}

double SurfacePatch::diameter() const {
    return std::visit(
        [](const auto& sh) -> double {
            using S = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<S, PlanarRectShape>)
                return std::max(norm(sh.edge_a + sh.edge_b), norm(sh.edge_a - sh.edge_b));
            else
                return 2.0 * sh.radius;
        },
        shape_);
}

// ---------------------------------------------------------------------------
// Panels and meshes

Panel::Panel(const Vector3& base, const Vector3& edge_a, const Vector3& edge_b)
    : base_(base), edge_a_(edge_a), edge_b_(edge_b), area_vector_(cross(edge_a, edge_b)) {
    if (!is_finite(base) || !is_finite(edge_a) || !is_finite(edge_b))
        throw Error(ErrorKind::InvalidArgument, "panel coordinates must be finite");
    if (norm(area_vector_) == 0.0) throw Error(ErrorKind::DegeneratePatch, "panel has zero area");
}

std::array<Vector3, 4> Panel::corners() const {
    return {base_, base_ + edge_a_, base_ + edge_a_ + edge_b_, base_ + edge_b_};
}

SurfaceMesh::SurfaceMesh(SurfacePatch source, int m, int n, std::vector<Vector3> nodes, std::vector<Panel> panels)
    : source_(std::move(source)), m_(m), n_(n), nodes_(std::move(nodes)), panels_(std::move(panels)) {}

std::array<Vector3, 4> SurfaceMesh::cell(int i, int j) const {
    return {node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)};
}

double SurfaceMesh::min_edge_length() const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : panels_) best = std::min({best, norm(p.edge_a()), norm(p.edge_b())});
    return best;
}

Vector3 SurfaceMesh::total_area_vector() const {
    Vector3 sum;
    for (const auto& p : panels_) sum += p.area_vector();
    return sum;
}

SurfaceMesh mesh_surface(const SurfacePatch& patch, int m, int n) {
    if (m < 1 || n < 1) throw Error(ErrorKind::InvalidArgument, "mesh sizes must be >= 1");
    std::vector<Vector3> nodes;
    nodes.reserve(static_cast<std::size_t>((m + 1) * (n + 1)));
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= n; ++j)
            nodes.push_back(patch.point(static_cast<double>(i) / m, static_cast<double>(j) / n));
    auto node = [&](int i, int j) -> const Vector3& { return nodes[static_cast<std::size_t>(i * (n + 1) + j)]; };

    const double scale = std::max(patch.bounds().diagonal(), 1e-300);
    std::vector<Panel> panels;
    panels.reserve(static_cast<std::size_t>(m * n));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            const Vector3& base = node(i, j);
            Panel p(base, node(i + 1, j) - base, node(i, j + 1) - base);
            if (norm(p.area_vector()) <= 1e-24 * scale * scale)
                throw Error(ErrorKind::DegeneratePatch, "panel area vanishes relative to scene scale");
            panels.push_back(p);
        }
    return SurfaceMesh(patch, m, n, std::move(nodes), std::move(panels));
}

std::vector<MeshEdge> uncancelled_edges(const SurfaceMesh& mesh) {
    const int n = mesh.n();
    auto id = [n](int i, int j) { return i * (n + 1) + j; };
    std::map<std::pair<int, int>, int> live;
    auto add = [&live](int from, int to) {
        auto rev = live.find({to, from});
        if (rev != live.end()) {
            if (--rev->second == 0) live.erase(rev);
        } else {
            ++live[{from, to}];
        }
    };
    for (int i = 0; i < mesh.m(); ++i)
        for (int j = 0; j < n; ++j) {
            add(id(i, j), id(i + 1, j));
            add(id(i + 1, j), id(i + 1, j + 1));
            add(id(i + 1, j + 1), id(i, j + 1));
            add(id(i, j + 1), id(i, j));
        }
    std::vector<MeshEdge> out;
    for (const auto& [key, count] : live)
        for (int c = 0; c < count; ++c) out.push_back({key.first, key.second});
    return out;
}

Curve mesh_boundary(const SurfaceMesh& mesh) {
    const auto edges = uncancelled_edges(mesh);
    std::map<int, int> next;
    for (const auto& e : edges) {
        if (!next.emplace(e.from, e.to).second)
            throw Error(ErrorKind::InvalidArgument, "mesh boundary is not a simple loop");
    }
    const int n = mesh.n();
    std::vector<Vector3> vertices;
    int cur = 0;
    do {
        vertices.push_back(mesh.node(cur / (n + 1), cur % (n + 1)));
        const auto it = next.find(cur);
        if (it == next.end() || vertices.size() > edges.size())
            throw Error(ErrorKind::InvalidArgument, "mesh boundary is not a simple loop");
        cur = it->second;
    } while (cur != 0);
    if (vertices.size() != edges.size())
        throw Error(ErrorKind::InvalidArgument, "mesh boundary has more than one component");
    return Curve::polyline(std::move(vertices), true);
}

// ---------------------------------------------------------------------------
// Segment / panel crossings

namespace {

enum class Region { outside, inside, on_edge };

// Which edges of a triangle are interior to the enclosing cell (crossings on
// them are ordinary hits rather than degenerate ones).
struct TriangleEdges {
    bool alpha0_interior = false;  // alpha = 0
    bool beta0_interior = false;   // beta = 0
};

Region classify_parallelogram(double a, double b, double tol) {
    if (a < -tol || a > 1 + tol || b < -tol || b > 1 + tol) return Region::outside;
    if (std::min({a, 1 - a, b, 1 - b}) <= tol) return Region::on_edge;
    return Region::inside;
}

Region classify_triangle(double a, double b, double tol, TriangleEdges edges) {
    const double c = 1.0 - a - b;
    if (a < -tol || b < -tol || c < -tol) return Region::outside;
    if ((!edges.alpha0_interior && a <= tol) || (!edges.beta0_interior && b <= tol) || c <= tol)
        return Region::on_edge;
    return Region::inside;
}

template <class Classify>
std::optional<Crossing> crossing_with_plane_region(const Vector3& p0, const Vector3& p1, const Vector3& base,
                                                   const Vector3& e1, const Vector3& e2, double tol,
                                                   Classify&& classify) {
    const Vector3 d = p1 - p0;
    const double len = norm(d);
    if (!(len > 0.0)) throw Error(ErrorKind::InvalidArgument, "segment has zero length");
    const Vector3 n = cross(e1, e2);
    const Vector3 nhat = normalized(n);
    const double h0 = dot(p0 - base, nhat);
    const double h1 = dot(p1 - base, nhat);

    const double aa = dot(e1, e1), ab = dot(e1, e2), bb = dot(e2, e2);
    const double det = aa * bb - ab * ab;
    auto coords = [&](const Vector3& q) {
        const Vector3 w = q - base;
        const double wa = dot(w, e1), wb = dot(w, e2);
        return std::pair{(wa * bb - wb * ab) / det, (wb * aa - wa * ab) / det};
    };

    const double plane_tol = tol * len;
    const bool on0 = std::abs(h0) <= plane_tol;
    const bool on1 = std::abs(h1) <= plane_tol;
    if (on0 && on1) {
        // Segment lies in the plane: refuse if it touches the region at all.
        constexpr int kProbe = 64;
        for (int k = 0; k <= kProbe; ++k) {
            const auto [a, b] = coords(p0 + (double(k) / kProbe) * d);
            if (classify(a, b) != Region::outside)
                throw Error(ErrorKind::NonTransversal, "segment lies in the panel plane");
        }
        return std::nullopt;
    }
    if (on0 || on1) {
        const auto [a, b] = coords(on0 ? p0 : p1);
        if (classify(a, b) != Region::outside)
            throw Error(ErrorKind::DegenerateIntersection, "segment endpoint lies on the panel");
        return std::nullopt;
    }
    if ((h0 > 0) == (h1 > 0)) return std::nullopt;

    const double s = h0 / (h0 - h1);
    const Vector3 q = p0 + s * d;
    const auto [a, b] = coords(q);
    switch (classify(a, b)) {
        case Region::outside: return std::nullopt;
        case Region::on_edge:
            throw Error(ErrorKind::DegenerateIntersection, "crossing lies on a panel edge");
        case Region::inside: break;
    }
    if (std::abs(dot(d, nhat)) / len < tol)
        throw Error(ErrorKind::NonTransversal, "segment grazes the panel");
    return Crossing{dot(d, n) > 0 ? 1 : -1, q};
}

}  // namespace

std::optional<Crossing> segment_panel_intersection(const Vector3& seg_start, const Vector3& seg_end,
                                                   const Panel& panel, double transversality_tol) {
    return crossing_with_plane_region(seg_start, seg_end, panel.base(), panel.edge_a(), panel.edge_b(),
                                      transversality_tol, [transversality_tol](double a, double b) {
                                          return classify_parallelogram(a, b, transversality_tol);
                                      });
}

std::optional<Crossing> segment_cell_intersection(const Vector3& seg_start, const Vector3& seg_end,
                                                  const std::array<Vector3, 4>& cell, double transversality_tol) {
    const auto& [p00, p10, p11, p01] = cell;
    // Triangle (p00, p10, p11): alpha along p10-p00, beta along p11-p00; the
    // diagonal p00-p11 is alpha = 0.
    if (auto hit = crossing_with_plane_region(
            seg_start, seg_end, p00, p10 - p00, p11 - p00, transversality_tol,
            [transversality_tol](double a, double b) {
                return classify_triangle(a, b, transversality_tol, {.alpha0_interior = true});
            }))
        return hit;
    // Triangle (p00, p11, p01): the diagonal is beta = 0.
    return crossing_with_plane_region(
        seg_start, seg_end, p00, p11 - p00, p01 - p00, transversality_tol,
        [transversality_tol](double a, double b) {
            return classify_triangle(a, b, transversality_tol, {.beta0_interior = true});
        });
}

}  // namespace ampere
