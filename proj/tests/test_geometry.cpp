#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <numbers>

#include "ampere/error.hpp"
#include "ampere/geometry.hpp"
#include "test_support.hpp"

using namespace ampere;
using namespace ampere::testing;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an ampere::Error");
    return ErrorKind::InvalidArgument;
}

// Brute-force directed edge multiset of all panel loops, by node index.
std::map<std::pair<int, int>, int> edge_multiset(int m, int n) {
    std::map<std::pair<int, int>, int> count;
    auto id = [n](int i, int j) { return i * (n + 1) + j; };
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            const int loop[4] = {id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)};
            for (int k = 0; k < 4; ++k) ++count[{loop[k], loop[(k + 1) % 4]}];
        }
    return count;
}

}  // namespace

TEST_CASE("circle parametrization") {
    const Curve c = Curve::circle({0, 0, 0}, 1.0, {0, 0, 1});
    const auto p = c.eval(0.0);
    CHECK(max_abs_diff(p.position, {1, 0, 0}) <= 1e-15);
    CHECK(max_abs_diff(p.tangent, {0, 1, 0}) <= 1e-15);
    CHECK(c.param_interval() == Interval{0.0, 2 * kPi});
    CHECK(c.closed());
    const auto q = c.eval(kPi / 2);
    CHECK(max_abs_diff(q.position, {0, 1, 0}) <= 1e-15);
    const Curve cw = Curve::circle({0, 0, 0}, 1.0, {0, 0, 1}, Orientation::cw);
    CHECK(max_abs_diff(cw.eval(0.0).tangent, {0, -1, 0}) <= 1e-15);
}

TEST_CASE("rectangular loop: first leg passes the origin going up") {
    const Curve c = Curve::rect_loop_cn(4);
    CHECK(c.param_interval() == Interval{0.0, 4.0});
    const auto p = c.eval(0.5);
    CHECK(max_abs_diff(p.position, {0, 0, 0}) <= 1e-15);
    // leg length 8 over a parameter share of 1
    CHECK(max_abs_diff(p.tangent, {0, 0, 8}) <= 1e-15);
    CHECK(c.pieces().size() == 4);
}

TEST_CASE("polyline interpolation and vertex tangent") {
    const Curve seg = Curve::polyline({{0, 0, 0}, {1, 0, 0}}, false);
    const auto p = seg.eval(0.5);
    CHECK(p.position == Vector3{0.5, 0, 0});
    CHECK(p.tangent == Vector3{1, 0, 0});
    CHECK_FALSE(seg.closed());

    const Curve bent = Curve::polyline({{0, 0, 0}, {1, 0, 0}, {1, 2, 0}}, false);
    CHECK(bent.eval(1.0).tangent == Vector3{0, 2, 0});  // outgoing segment
    CHECK(kind_of([&] { (void)bent.eval(2.5); }) == ErrorKind::ParamOutOfRange);
    CHECK(kind_of([&] { (void)bent.eval(-0.1); }) == ErrorKind::ParamOutOfRange);
}

TEST_CASE("reversal negates the tangent at matching points") {
    std::mt19937_64 rng(kSeed);
    const std::vector<Curve> curves = {
        Curve::circle({0.3, -0.2, 1}, 1.7, {1, 2, 3}),
        Curve::rect_loop_cn(3),
        Curve::polyline({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 1}}, true),
        Curve::composite({Curve::polyline({{0, 0, 0}, {1, 0, 0}}, false),
                          Curve::polyline({{1, 0, 0}, {1, 1, 0}, {0, 0, 0}}, false)}),
    };
    for (const auto& c : curves) {
        const Curve r = c.reversed();
        CHECK(r.is_reversed());
        CHECK_FALSE(r.reversed().is_reversed());
        const Interval iv = c.param_interval();
        CHECK(r.param_interval() == iv);
        for (int k = 0; k < 50; ++k) {
            const double t = uniform(rng, iv.begin, iv.end);
            // stay off polyline vertices where the tangent is one-sided
            if (c.kind() != Curve::Kind::circle && std::abs(t - std::round(t)) < 1e-6) continue;
            const auto a = c.eval(t);
            const auto b = r.eval(iv.begin + iv.end - t);
            CHECK(max_abs_diff(a.position, b.position) <= 1e-12);
            CHECK(max_abs_diff(a.tangent, -b.tangent) <= 1e-12);
        }
    }
}

TEST_CASE("distances") {
    const Curve c = Curve::circle({0, 0, 0}, 1.0, {0, 0, 1});
    CHECK(c.distance_to({0, 0, 0}) == doctest::Approx(1.0));
    CHECK(c.distance_to({3, 0, 0}) == doctest::Approx(2.0));
    CHECK(c.distance_to({0, 0, 2}) == doctest::Approx(std::sqrt(5.0)));
    const Curve far = Curve::circle({0, 0, 10}, 1.0, {0, 0, 1});
    CHECK(min_distance(c, far) == doctest::Approx(10.0).epsilon(1e-9));
    // every point (1 + cos s, 0, sin s) of the partner is at distance 1
    const Curve hopf = Curve::circle({1, 0, 0}, 1.0, {0, 1, 0});
    CHECK(min_distance(c, hopf) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(min_distance(hopf, c) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("curve sampling respects the chord bound and keeps corners") {
    const Curve c = Curve::circle({0, 0, 0}, 2.0, {0, 1, 0});
    for (double chord : {0.5, 0.1, 0.013}) {
        const auto loops = c.sample(chord);
        REQUIRE(loops.size() == 1);
        const auto& pl = loops[0];
        CHECK(pl.closed);
        CHECK(pl.vertices.size() % 2 == 1);
        for (std::size_t i = 0; i < pl.segment_count(); ++i) {
            const auto [a, b] = pl.segment(i);
            CHECK(norm(b - a) <= chord * (1 + 1e-12));
            CHECK(std::abs(norm(a) - 2.0) <= 1e-12);
        }
    }
    const auto rect = Curve::rect_loop_cn(5).sample(0.1);
    REQUIRE(rect.size() == 1);
    CHECK(rect[0].vertices.size() == 4);  // straight legs stay single segments
}

TEST_CASE("mesh of a planar rectangle") {
    const SurfacePatch sq = SurfacePatch::planar_rect({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
    const SurfaceMesh one = mesh_surface(sq, 1, 1);
    REQUIRE(one.panels().size() == 1);
    CHECK(one.panels()[0].area_vector() == Vector3{0, 0, 1});

    const SurfaceMesh two = mesh_surface(sq, 2, 2);
    REQUIRE(two.panels().size() == 4);
    for (const auto& p : two.panels()) CHECK(max_abs_diff(p.area_vector(), {0, 0, 0.25}) <= 1e-15);
    CHECK(max_abs_diff(two.total_area_vector(), {0, 0, 1}) <= 1e-15);

    const SurfacePatch skew = SurfacePatch::planar_rect({1, 2, 3}, {2, 0.5, 0}, {0.3, 1, 1});
    for (int m : {1, 3, 7})
        CHECK(max_abs_diff(mesh_surface(skew, m, m + 1).total_area_vector(), cross(Vector3{2, 0.5, 0}, {0.3, 1, 1})) <=
              1e-13);
}

TEST_CASE("disk mesh area converges to pi") {
    const SurfacePatch disk = SurfacePatch::disk({0, 0, 0}, 1.0, {0, 0, 1});
    double prev = INFINITY;
    for (int m : {8, 16, 32, 64, 128}) {
        const SurfaceMesh mesh = mesh_surface(disk, m, m);
        CHECK(mesh.panels().size() == std::size_t(m * m));
        const Vector3 a = mesh.total_area_vector();
        CHECK(std::abs(a.x) + std::abs(a.y) <= 1e-12);
        // exact cell areas: polygon inscribed in the circle
        Vector3 cells;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                const auto c = mesh.cell(i, j);
                cells += 0.5 * cross(c[2] - c[0], c[3] - c[1]);
            }
        CHECK(cells.z < kPi);
        const double gap = kPi - cells.z;
        CHECK(gap < prev);
        prev = gap;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("surface patches: normals, Jacobians and distances") {
    const SurfacePatch disk = SurfacePatch::disk({0, 0, 0}, 2.0, {0, 0, 1});
    CHECK(max_abs_diff(disk.point(0.5, 0.5), {0, 0, 0}) <= 1e-15);
    CHECK(max_abs_diff(disk.unit_normal(0.3, 0.6), {0, 0, 1}) <= 1e-12);
    CHECK(disk.distance_to({0.5, 0.5, 3}) == doctest::Approx(3.0));
    CHECK(disk.distance_to({4, 0, 0}) == doctest::Approx(2.0));
    CHECK(disk.diameter() == doctest::Approx(4.0));

    const SurfacePatch dome = SurfacePatch::dome({0, 0, 0}, 1.0, {0, 0, 1}, 0.5);
    CHECK(max_abs_diff(dome.point(0.5, 0.5), {0, 0, 0.5}) <= 1e-15);
    CHECK(dome.unit_normal(0.5, 0.5).z > 0.99);
    CHECK(dome.distance_to({0, 0, 2}) == doctest::Approx(1.5).epsilon(1e-6));
    CHECK_FALSE(dome.is_planar());

    // boundary of the parameter square lands on the unit circle
    std::mt19937_64 rng(kSeed);
    for (int k = 0; k < 100; ++k) {
        const double s = uniform(rng, 0, 1);
        for (const auto& p : {dome.point(s, 0), dome.point(s, 1), dome.point(0, s), dome.point(1, s)}) {
            CHECK(std::hypot(p.x, p.y) == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(std::abs(p.z) <= 1e-15);
        }
    }
    CHECK(kind_of([] { (void)SurfacePatch::planar_rect({0, 0, 0}, {1, 0, 0}, {2, 0, 0}); }) ==
          ErrorKind::DegeneratePatch);
    CHECK(kind_of([] { (void)Panel({0, 0, 0}, {1, 1, 1}, {2, 2, 2}); }) == ErrorKind::DegeneratePatch);
}

TEST_CASE("interior edges cancel in pairs for every mesh size") {
    const SurfacePatch sq = SurfacePatch::planar_rect({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
    for (int m = 1; m <= 6; ++m)
        for (int n = 1; n <= 6; ++n) {
            const auto count = edge_multiset(m, n);
            std::size_t boundary = 0;
            for (const auto& [e, c] : count) {
                CHECK(c == 1);
                const auto rev = count.find({e.second, e.first});
                if (rev == count.end()) ++boundary;
            }
            CHECK(boundary == std::size_t(2 * (m + n)));
            const auto edges = uncancelled_edges(mesh_surface(sq, m, n));
            CHECK(edges.size() == boundary);
            for (const auto& e : edges) CHECK(count.find({e.to, e.from}) == count.end());
        }
}

TEST_CASE("mesh boundary") {
    const SurfacePatch sq = SurfacePatch::planar_rect({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
    const Curve b1 = mesh_boundary(mesh_surface(sq, 1, 1));
    REQUIRE(b1.as_polyline());
    CHECK(b1.closed());
    const std::vector<Vector3> expect = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
    CHECK(b1.as_polyline()->vertices == expect);

    const Curve b2 = mesh_boundary(mesh_surface(sq, 2, 2));
    REQUIRE(b2.as_polyline());
    const auto& v = b2.as_polyline()->vertices;
    CHECK(v.size() == 8);
    for (const auto& p : v) CHECK_FALSE((p.x == 0.5 && p.y == 0.5));  // no interior node

    const SurfaceMesh disk = mesh_surface(SurfacePatch::disk({0, 0, 0}, 1.0, {0, 0, 1}), 16, 16);
    const Curve bd = mesh_boundary(disk);
    double worst = 0;
    const Interval iv = bd.param_interval();
    for (int k = 0; k <= 2000; ++k) {
        const double t = std::min(iv.begin + iv.length() * k / 2000.0, iv.end - 1e-12);
        worst = std::max(worst, std::abs(norm(bd.eval(t).position) - 1.0));
    }
    CHECK(worst < 0.02);
    // the induced orientation is ccw about +z
    CHECK(bd.eval(0.5).position.y < 0);
    CHECK(cross(bd.eval(0.5).position, bd.eval(0.5).tangent).z > 0);
}

TEST_CASE("segment against panel") {
    const Panel sq({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
    const auto up = segment_panel_intersection({0.5, 0.5, -1}, {0.5, 0.5, 1}, sq);
    REQUIRE(up);
    CHECK(up->sign == 1);
    CHECK(max_abs_diff(up->point, {0.5, 0.5, 0}) <= 1e-15);

    const auto down = segment_panel_intersection({0.5, 0.5, 1}, {0.5, 0.5, -1}, sq);
    REQUIRE(down);
    CHECK(down->sign == -1);

    const auto flipped = segment_panel_intersection({0.5, 0.5, -1}, {0.5, 0.5, 1}, sq.flipped());
    REQUIRE(flipped);
    CHECK(flipped->sign == -1);

    CHECK_FALSE(segment_panel_intersection({0, 0, 1}, {1, 1, 1}, sq));
    CHECK_FALSE(segment_panel_intersection({2, 2, -1}, {2, 2, 1}, sq));
    CHECK_FALSE(segment_panel_intersection({0.5, 0.5, 0.1}, {0.5, 0.5, 1}, sq));

    CHECK(kind_of([&] { (void)segment_panel_intersection({1, 0.5, -1}, {1, 0.5, 1}, sq); }) ==
          ErrorKind::DegenerateIntersection);
    CHECK(kind_of([&] { (void)segment_panel_intersection({0.5, 0.5, 0}, {0.5, 0.5, 1}, sq); }) ==
          ErrorKind::DegenerateIntersection);
    CHECK(kind_of([&] { (void)segment_panel_intersection({-10, 0.5, -1e-11}, {10, 0.5, 1e-11}, sq); }) ==
          ErrorKind::NonTransversal);
    CHECK(kind_of([&] { (void)segment_panel_intersection({0.2, 0.2, 0}, {0.8, 0.2, 0}, sq); }) ==
          ErrorKind::NonTransversal);
}

TEST_CASE("crossing sign flips with segment or panel orientation on random geometry") {
    std::mt19937_64 rng(kSeed + 7);
    int crossings = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        const Panel p(random_vector(rng), random_vector(rng), random_vector(rng));
        const Vector3 a = random_vector(rng, 2), b = random_vector(rng, 2);
        std::optional<Crossing> fwd, rev, flip;
        try {
            fwd = segment_panel_intersection(a, b, p);
            rev = segment_panel_intersection(b, a, p);
            flip = segment_panel_intersection(a, b, p.flipped());
        } catch (const Error&) {
            continue;
        }
        CHECK(fwd.has_value() == rev.has_value());
        CHECK(fwd.has_value() == flip.has_value());
        if (!fwd) continue;
        ++crossings;
        CHECK(rev->sign == -fwd->sign);
        CHECK(flip->sign == -fwd->sign);
        CHECK(fwd->sign == (dot(b - a, p.area_vector()) > 0 ? 1 : -1));
        CHECK(max_abs_diff(fwd->point, rev->point) <= 1e-10);
    }
    CHECK(crossings > 40);
}

TEST_CASE("cell crossings count once on the diagonal") {
    const std::array<Vector3, 4> cell = {Vector3{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
    const auto hit = segment_cell_intersection({0.5, 0.5, -1}, {0.5, 0.5, 1}, cell);
    REQUIRE(hit);
    CHECK(hit->sign == 1);
    const auto off = segment_cell_intersection({0.25, 0.6, 1}, {0.25, 0.6, -1}, cell);
    REQUIRE(off);
    CHECK(off->sign == -1);
    CHECK_FALSE(segment_cell_intersection({1.5, 0.5, -1}, {1.5, 0.5, 1}, cell));
}

TEST_CASE("bounding boxes") {
    BoundingBox b;
    CHECK(b.empty());
    b.expand({0, 0, 0});
    b.expand({3, 4, 0});
    CHECK(b.diagonal() == doctest::Approx(5.0));
    const auto box = Curve::circle({0, 0, 0}, 1.0, {0, 0, 1}).bounds();
    CHECK(box.hi.x >= 1.0 - 1e-12);
    CHECK(box.lo.y <= -1.0 + 1e-12);
    const auto [e1, e2] = plane_basis({0, 0, 1});
    CHECK(e1 == Vector3{1, 0, 0});
    CHECK(e2 == Vector3{0, 1, 0});
}
