#pragma once

#include <array>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "ampere/vector3.hpp"

namespace ampere {

enum class Orientation { ccw, cw };

struct Interval {
    double begin = 0.0;
    double end = 0.0;
    double length() const { return end - begin; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

struct CurvePoint {
    Vector3 position;
    Vector3 tangent;  // d position / dt
};

/// Axis-aligned box; `diagonal()` is the scene scale all relative tolerances use.
struct BoundingBox {
    Vector3 lo{+1e300, +1e300, +1e300};
    Vector3 hi{-1e300, -1e300, -1e300};

    void expand(const Vector3& p);
    void expand(const BoundingBox& b);
    bool empty() const { return lo.x > hi.x; }
    double diagonal() const;
};

/// Orthonormal pair (e1, e2) with e1 x e2 = axis / |axis|. For the z axis this
/// is (x, y); circles and disks sharing an axis share this frame.
std::pair<Vector3, Vector3> plane_basis(const Vector3& axis);

struct CircleShape {
    Vector3 center;
    double radius = 1.0;
    Vector3 axis{0, 0, 1};
    Orientation orientation = Orientation::ccw;
    friend bool operator==(const CircleShape&, const CircleShape&) = default;
};

struct PolyLineShape {
    std::vector<Vector3> vertices;
    bool closed = false;
    friend bool operator==(const PolyLineShape&, const PolyLineShape&) = default;
};

/// Rectangular loop through (0,0,-n) -> (0,0,n) -> (n,0,n) -> (n,0,-n).
struct RectLoopShape {
    int n = 2;
    friend bool operator==(const RectLoopShape&, const RectLoopShape&) = default;
};

class Curve;

struct CompositeShape {
    std::shared_ptr<const std::vector<Curve>> parts;
};

/// A smooth parameter sub-interval of a curve. Integrals are taken piecewise
/// so that no quadrature node ever sits on a corner.
struct CurvePiece {
    Interval interval;
    bool straight = false;
};

/// Sampled polygonal approximation; `closed` means the last vertex connects
/// back to the first (the first vertex is not repeated).
struct SampledPolyline {
    std::vector<Vector3> vertices;
    bool closed = false;
    std::size_t segment_count() const;
    std::pair<Vector3, Vector3> segment(std::size_t i) const;
};

/// Oriented curve in R^3, immutable after construction.
///
/// Parametrizations:
///  - circle: t in [0, 2pi], m(t) = c + R (cos t e1 +/- sin t e2)
///  - polyline: segment k occupies [k, k+1]
///  - rect_loop_cn: the closed 4-vertex polyline of RectLoopShape
///  - composite: parts concatenated, each keeping its own parameter length
/// At a polyline vertex, `eval` returns the outgoing segment's tangent.
class Curve {
public:
    enum class Kind { circle, polyline, rect_loop_cn, composite };

    static Curve circle(const Vector3& center, double radius, const Vector3& axis,
                        Orientation orientation = Orientation::ccw);
    static Curve polyline(std::vector<Vector3> vertices, bool closed);
    static Curve rect_loop_cn(int n);
    static Curve composite(std::vector<Curve> parts);

    Kind kind() const;
    bool is_reversed() const { return reversed_; }
    Curve reversed() const;

    Interval param_interval() const;
    bool closed() const;

    /// Throws ParamOutOfRange outside param_interval().
    CurvePoint eval(double t) const;

    std::vector<CurvePiece> pieces() const;

    /// Exact Euclidean distance from x to the curve.
    double distance_to(const Vector3& x) const;

    /// Straight pieces are kept as single segments; curved pieces are split so
    /// every chord is at most max_chord long. A composite made of closed parts
    /// yields one loop per part; anything else yields a single chain.
    std::vector<SampledPolyline> sample(double max_chord) const;

    BoundingBox bounds() const;

    const CircleShape* as_circle() const { return std::get_if<CircleShape>(&shape_); }
    const PolyLineShape* as_polyline() const { return std::get_if<PolyLineShape>(&shape_); }
    const RectLoopShape* as_rect_loop() const { return std::get_if<RectLoopShape>(&shape_); }
    const std::vector<Curve>* as_composite() const;

private:
    using Shape = std::variant<CircleShape, PolyLineShape, RectLoopShape, CompositeShape>;
    explicit Curve(Shape shape) : shape_(std::move(shape)) {}

    // Evaluation in the un-reversed parametrization; `prefer_left` picks the
    // incoming segment at a vertex.
    CurvePoint eval_forward(double s, bool prefer_left) const;
    CurvePoint eval_side(double t, bool prefer_left) const;
    std::vector<CurvePiece> pieces_forward() const;

    Shape shape_;
    bool reversed_ = false;
};

/// eval(curve, t) as a free function, matching the rest of the API.
inline CurvePoint eval_curve(const Curve& curve, double t) { return curve.eval(t); }

/// Closest approach between two curves: coarse sampling of `a` against the
/// exact distance to `b`, then golden-section refinement around the best
/// sample.
double min_distance(const Curve& a, const Curve& b);

struct PlanarRectShape {
    Vector3 corner;
    Vector3 edge_a{1, 0, 0};
    Vector3 edge_b{0, 1, 0};
    friend bool operator==(const PlanarRectShape&, const PlanarRectShape&) = default;
};

struct DiskShape {
    Vector3 center;
    double radius = 1.0;
    Vector3 axis{0, 0, 1};
    friend bool operator==(const DiskShape&, const DiskShape&) = default;
};

/// Paraboloid cap over a disk: same boundary circle, apex lifted by `height`
/// along the axis. Used as a second spanning surface for the same loop.
struct DomeShape {
    Vector3 center;
    double radius = 1.0;
    Vector3 axis{0, 0, 1};
    double height = 0.5;
    friend bool operator==(const DomeShape&, const DomeShape&) = default;
};

struct SurfaceFrame {
    Vector3 point;
    Vector3 du;
    Vector3 dv;
};

/// Oriented parametric patch over [0,1]^2. The orientation is du x dv.
///
/// Disks and domes use the elliptical square-to-disk map
///   x = a sqrt(1 - b^2/2),  y = b sqrt(1 - a^2/2),  (a, b) = (2u-1, 2v-1)
/// whose Jacobian only vanishes at the four corners of the parameter square,
/// so every interior quadrature node and every mesh panel is non-degenerate.
class SurfacePatch {
public:
    enum class Kind { planar_rect, disk, dome };

    static SurfacePatch planar_rect(const Vector3& corner, const Vector3& edge_a, const Vector3& edge_b);
    static SurfacePatch disk(const Vector3& center, double radius, const Vector3& axis);
    static SurfacePatch dome(const Vector3& center, double radius, const Vector3& axis, double height);

    Kind kind() const;
    SurfaceFrame eval(double u, double v) const;
    Vector3 point(double u, double v) const { return eval(u, v).point; }
    Vector3 unit_normal(double u, double v) const;
    bool is_planar() const { return kind() != Kind::dome; }

    /// Exact for planar kinds; sampled and refined for domes.
    double distance_to(const Vector3& x) const;
    BoundingBox bounds() const;

    /// Characteristic length (diameter) of the patch.
    double diameter() const;

    const PlanarRectShape* as_planar_rect() const { return std::get_if<PlanarRectShape>(&shape_); }
    const DiskShape* as_disk() const { return std::get_if<DiskShape>(&shape_); }
    const DomeShape* as_dome() const { return std::get_if<DomeShape>(&shape_); }

private:
    using Shape = std::variant<PlanarRectShape, DiskShape, DomeShape>;
    explicit SurfacePatch(Shape shape) : shape_(std::move(shape)) {}
    Shape shape_;
};

/// Flat oriented parallelogram {base + s edge_a + t edge_b : s, t in [0,1]}.
class Panel {
public:
    /// Throws DegeneratePatch when edge_a x edge_b vanishes.
    Panel(const Vector3& base, const Vector3& edge_a, const Vector3& edge_b);

    const Vector3& base() const { return base_; }
    const Vector3& edge_a() const { return edge_a_; }
    const Vector3& edge_b() const { return edge_b_; }
    const Vector3& area_vector() const { return area_vector_; }
    Vector3 centroid() const { return base_ + 0.5 * (edge_a_ + edge_b_); }
    std::array<Vector3, 4> corners() const;

    /// Same parallelogram with the opposite orientation.
    Panel flipped() const { return Panel(base_, edge_b_, edge_a_); }

private:
    Vector3 base_, edge_a_, edge_b_, area_vector_;
};

/// M x N panelization. Node (i, j) is Φ(i/M, j/N); panel (i, j) has
/// base node(i, j), edge_a = node(i+1, j) - node(i, j) and
/// edge_b = node(i, j+1) - node(i, j).
class SurfaceMesh {
public:
    SurfaceMesh(SurfacePatch source, int m, int n, std::vector<Vector3> nodes, std::vector<Panel> panels);

    const SurfacePatch& source() const { return source_; }
    int m() const { return m_; }
    int n() const { return n_; }
    const std::vector<Panel>& panels() const { return panels_; }
    const Panel& panel(int i, int j) const { return panels_[static_cast<std::size_t>(i * n_ + j)]; }
    const Vector3& node(int i, int j) const { return nodes_[static_cast<std::size_t>(i * (n_ + 1) + j)]; }

    /// Grid cell (i, j) as the corner loop node(i,j), node(i+1,j),
    /// node(i+1,j+1), node(i,j+1). Unlike the panels, cells tile exactly.
    std::array<Vector3, 4> cell(int i, int j) const;

    /// Length of the shortest panel edge.
    double min_edge_length() const;
    Vector3 total_area_vector() const;

private:
    SurfacePatch source_;
    int m_, n_;
    std::vector<Vector3> nodes_;
    std::vector<Panel> panels_;
};

SurfaceMesh mesh_surface(const SurfacePatch& patch, int m, int n);

/// Directed node-index edge of a panel loop, used for boundary extraction.
struct MeshEdge {
    int from = 0;  // linear node index i * (N+1) + j
    int to = 0;
    friend bool operator==(const MeshEdge&, const MeshEdge&) = default;
};

/// Directed edges surviving cancellation of every panel loop
/// (i,j)->(i+1,j)->(i+1,j+1)->(i,j+1)->(i,j): an edge meets its reverse and
/// both disappear.
std::vector<MeshEdge> uncancelled_edges(const SurfaceMesh& mesh);

/// Closed polyline along the outer boundary in the induced orientation,
/// starting at node (0, 0).
Curve mesh_boundary(const SurfaceMesh& mesh);

struct Crossing {
    int sign = 0;
    Vector3 point;
};

inline constexpr double kDefaultTransversalityTol = 1e-9;

/// Transversal crossing of the open segment with the panel interior.
/// Returns nullopt when there is no crossing. Throws NonTransversal when the
/// segment crosses at a grazing angle (|cos| < tol) and
/// DegenerateIntersection when the crossing lies within tol (in panel
/// coordinates) of a panel edge or at a segment endpoint.
std::optional<Crossing> segment_panel_intersection(const Vector3& seg_start, const Vector3& seg_end,
                                                   const Panel& panel,
                                                   double transversality_tol = kDefaultTransversalityTol);

/// Same test against a (possibly non-planar) grid cell, split along the
/// node(i,j)-node(i+1,j+1) diagonal into two triangles. The diagonal is
/// interior to the cell, so crossings on it count once.
std::optional<Crossing> segment_cell_intersection(const Vector3& seg_start, const Vector3& seg_end,
                                                  const std::array<Vector3, 4>& cell,
                                                  double transversality_tol = kDefaultTransversalityTol);

}  // namespace ampere
