#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "ampere/error.hpp"
#include "ampere/experiments.hpp"
#include "ampere/fields.hpp"
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
    return ErrorKind::IoError;  // sentinel: nothing thrown
}

// Field of a finite straight segment a -> b from the perpendicular foot p of x:
// |B| = k / d (s2 / hypot(s2, d) - s1 / hypot(s1, d)) along u x (x - p).
Vector3 segment_field(const Vector3& a, const Vector3& b, const Vector3& x, double k) {
    const Vector3 u = normalized(b - a);
    const Vector3 p = a + dot(x - a, u) * u;
    const Vector3 r = x - p;
    const double d = norm(r);
    const double s1 = dot(a - p, u), s2 = dot(b - p, u);
    return k / d * (s2 / std::hypot(s2, d) - s1 / std::hypot(s1, d)) * cross(u, r / d);
}

// E_z on the axis of a uniformly charged square of half-side a at height z.
double square_axis_field(double a, double z, double sigma, double k) {
    return 4 * k * sigma * std::atan(a * a / (z * std::sqrt(2 * a * a + z * z)));
}

double rel(const Vector3& got, const Vector3& want) { return norm(got - want) / norm(want); }

}  // namespace

TEST_CASE("field of a circular loop") {
    const Curve loop = Curve::circle({0, 0, 0}, 1.0, {0, 0, 1});
    CHECK(max_abs_diff(biot_savart(loop, {0, 0, 0}), {0, 0, 0.5}) <= 1e-12);
    CHECK(max_abs_diff(biot_savart(loop.reversed(), {0, 0, 0}), {0, 0, -0.5}) <= 1e-12);
    for (double z : {0.3, 1.0, 2.5, -4.0}) {
        // on-axis value R^2 / (2 (R^2 + z^2)^(3/2)) for k_B = 1/(4 pi)
        const double bz = 0.5 / std::pow(1 + z * z, 1.5);
        CHECK(max_abs_diff(biot_savart(loop, {0, 0, z}), {0, 0, bz}) <= 1e-12);
    }
    const Curve big = Curve::circle({1, 2, 3}, 2.5, {0, 1, 0});
    CHECK(max_abs_diff(biot_savart(big, {1, 2, 3}), {0, 0.5 / 2.5, 0}) <= 1e-12);
    CHECK(kind_of([&] { (void)biot_savart(loop, {1, 0, 0}); }) == ErrorKind::NearSingular);
    CHECK(kind_of([&] { (void)biot_savart(loop, {0, 1 + 1e-7, 0}); }) == ErrorKind::NearSingular);
}

TEST_CASE("straight segments match the closed form") {
    std::mt19937_64 rng(kSeed);
    const double k = 1.0 / (4 * kPi);
    for (int trial = 0; trial < 100; ++trial) {
        const Vector3 a = random_vector(rng, 2), b = random_vector(rng, 2);
        Vector3 x = random_vector(rng, 3);
        const Curve seg = Curve::polyline({a, b}, false);
        if (seg.distance_to(x) < 0.05) continue;
        const Vector3 want = segment_field(a, b, x, k);
        CHECK(norm(biot_savart(seg, x) - want) <= 1e-9 * (norm(want) + 1e-3));
    }
    // closed square loop as four segments
    const std::vector<Vector3> sq = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
    const Vector3 x{0.2, 0.7, 0.4};
    Vector3 want;
    for (int i = 0; i < 4; ++i) want += segment_field(sq[i], sq[(i + 1) % 4], x, k);
    CHECK(rel(biot_savart(Curve::polyline(sq, true), x), want) <= 1e-10);
}

TEST_CASE("linearity in k_B, reversal and resampling") {
    const Curve c = Curve::polyline({{0, 0, 0}, {2, 0, 0}, {2, 1, 0.5}, {0, 1, 0}}, true);
    const Curve fine = Curve::polyline(
        {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {2, 0.5, 0.25}, {2, 1, 0.5}, {1, 1, 0.25}, {0, 1, 0}, {0, 0.5, 0}}, true);
    const Vector3 x{0.7, 0.4, -0.6};
    const Vector3 base = biot_savart(c, x);
    CHECK(max_abs_diff(biot_savart(c, x, {1.0, 3.0 / (4 * kPi)}), 3.0 * base) <= 1e-14);
    CHECK(max_abs_diff(biot_savart(c.reversed(), x), -base) <= 1e-13);
    CHECK(rel(biot_savart(fine, x), base) <= 1e-10);
}

TEST_CASE("rigid motion equivariance") {
    std::mt19937_64 rng(kSeed + 3);
    const Vector3 center{0.1, -0.2, 0.3}, axis{0.2, 0.5, 1.0};
    const Curve c = Curve::circle(center, 1.2, axis);
    for (int trial = 0; trial < 20; ++trial) {
        const Rotation r = random_rotation(rng);
        const Vector3 tau = random_vector(rng, 5);
        const Curve moved = Curve::circle(r(center) + tau, 1.2, r(axis));
        const Vector3 x = random_vector(rng, 2);
        if (c.distance_to(x) < 0.1) continue;
        const Vector3 want = r(biot_savart(c, x));
        CHECK(norm(biot_savart(moved, r(x) + tau) - want) <= 1e-10 * (1 + norm(want)));
    }
}

TEST_CASE("batch evaluation keeps input order") {
    const Curve loop = Curve::circle({0, 0, 0}, 1.0, {0, 0, 1});
    std::vector<Vector3> pts;
    for (int i = 0; i < 17; ++i) pts.push_back({0.1 * i - 0.8, 0.05 * i, 0.5});
    const auto all = biot_savart_batch(loop, pts);
    REQUIRE(all.size() == pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) CHECK(all[i] == biot_savart(loop, pts[i]));
}

TEST_CASE("charged square") {
    const SurfacePatch sq = SurfacePatch::planar_rect({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
    const Vector3 far = coulomb_surface_field(sq, 1.0, {0.5, 0.5, 100});
    CHECK(far.z == doctest::Approx(1e-4).epsilon(1e-3));
    CHECK(std::abs(far.x) + std::abs(far.y) <= 1e-10);

    for (double z : {0.05, 0.5, 2.0}) {
        const Vector3 e = coulomb_surface_field(sq, 2.0, {0.5, 0.5, z});
        CHECK(std::abs(e.x) <= 1e-10);
        CHECK(std::abs(e.y) <= 1e-10);
        CHECK(e.z == doctest::Approx(square_axis_field(0.5, z, 2.0, 1.0)).epsilon(1e-8));
        const Vector3 below = coulomb_surface_field(sq, 2.0, {0.5, 0.5, -z});
        CHECK(below.z == doctest::Approx(-e.z).epsilon(1e-12));
    }
    CHECK(coulomb_surface_field(sq, 1.0, {0.5, 0.5, 1}, {3.0, 0.1}).z ==
          doctest::Approx(3.0 * square_axis_field(0.5, 1.0, 1.0, 1.0)).epsilon(1e-8));
}

TEST_CASE("growing square approaches the infinite-sheet field") {
    double prev = 0;
    for (double side : {1.0, 4.0, 16.0, 64.0}) {
        const SurfacePatch sq = SurfacePatch::planar_rect({-side / 2, -side / 2, 0}, {side, 0, 0}, {0, side, 0});
        const double ez = coulomb_surface_field(sq, 1.0, {0, 0, 0.01}).z;
        CHECK(ez == doctest::Approx(square_axis_field(side / 2, 0.01, 1.0, 1.0)).epsilon(1e-7));
        CHECK(ez > prev);
        CHECK(ez < 2 * kPi);
        prev = ez;
    }
    CHECK(prev == doctest::Approx(2 * kPi).epsilon(1e-3));
}

TEST_CASE("closed-form dipole panel") {
    const Panel unit({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
    const DipoleSheetSpec dp{1.0, 1.0};
    CHECK(max_abs_diff(dipole_panel_field(unit, dp, {0, 0, 2}), {0, 0, 0.25}) <= 1e-15);
    CHECK(max_abs_diff(dipole_panel_field(unit, dp, {1, 0, 0}), {0, 0, -1}) <= 1e-15);
    CHECK(dipole_panel_field(unit, {0.0, 1.0}, {0, 0, 2}) == Vector3{});
    CHECK(kind_of([&] { (void)dipole_panel_field(unit, dp, {0, 0, 0}); }) == ErrorKind::NearSingular);
    CHECK(max_abs_diff(dipole_panel_field(unit, dp, {0.5, 0.5, 2}, {}, DipoleAnchor::centroid), {0, 0, 0.25}) <=
          1e-15);

    std::mt19937_64 rng(kSeed + 5);
    for (int trial = 0; trial < 100; ++trial) {
        const Panel p(random_vector(rng), random_vector(rng), random_vector(rng));
        const Vector3 x = random_vector(rng, 4) + Vector3{0, 0, 6};
        const Vector3 e = dipole_panel_field(p, dp, x);
        const double s = norm(e);
        CHECK(max_abs_diff(dipole_panel_field(p, {2.5, 1.0}, x), 2.5 * e) <= 1e-14 * s);
        CHECK(max_abs_diff(dipole_panel_field(p, {1.0, 0.3}, x), 0.3 * e) <= 1e-14 * s);
        const Panel doubled(p.base(), 2.0 * p.edge_a(), p.edge_b());
        CHECK(max_abs_diff(dipole_panel_field(doubled, dp, x), 2.0 * e) <= 1e-14 * s);
        CHECK(max_abs_diff(dipole_panel_field(p.flipped(), dp, x), -e) <= 1e-14 * s);
        const Rotation r = random_rotation(rng);
        const Panel rp(r(p.base()), r(p.edge_a()), r(p.edge_b()));
        CHECK(norm(dipole_panel_field(rp, dp, r(x)) - r(e)) <= 1e-12 * s);
    }
}

TEST_CASE("dipole sheet") {
    const SurfacePatch small = SurfacePatch::planar_rect({0, 0, 0}, {0.01, 0, 0}, {0, 0.01, 0});
    CHECK(dipole_sheet_field_exact(small, {1.0, 0.0}, {0, 0, 2}) == Vector3{});
    CHECK(dipole_sheet_field_exact(small, {0.0, 1e-3}, {0, 0, 2}) == Vector3{});

    const Panel panel({0, 0, 0}, {0.01, 0, 0}, {0, 0.01, 0});
    const DipoleSheetSpec dp{1.0, 1e-3};
    const Vector3 want = dipole_panel_field(panel, dp, {0, 0, 2}, {}, DipoleAnchor::centroid);
    CHECK(rel(dipole_sheet_field_exact(small, dp, {0, 0, 2}), want) <= 1e-3);

    CHECK(kind_of([] { DipoleSheetSpec{1.0, -1.0}.validate(); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("sheet converges to the panel formula as panel and h shrink") {
    const Vector3 x{0.3, 0.2, 2.0};
    std::vector<double> scales, errors;
    for (double side : {0.4, 0.2, 0.1, 0.05, 0.025}) {
        const SurfacePatch patch = SurfacePatch::planar_rect({0, 0, 0}, {side, 0, 0}, {0, side, 0});
        const Panel panel({0, 0, 0}, {side, 0, 0}, {0, side, 0});
        const DipoleSheetSpec dp{1.0, side / 4};
        const Vector3 exact = dipole_sheet_field_exact(patch, dp, x, kSimilitudeConstants);
        const Vector3 approx = dipole_panel_field(panel, dp, x, kSimilitudeConstants);
        scales.push_back(side);
        errors.push_back(rel(approx, exact));
    }
    for (std::size_t i = 1; i < errors.size(); ++i) CHECK(errors[i] < errors[i - 1]);
    CHECK(fitted_log_slope(scales, errors) >= 1.0 - 0.05);
}

TEST_CASE("dipole meshes") {
    const SurfacePatch sq = SurfacePatch::planar_rect({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
    const DipoleSheetSpec dp{1.0, 1e-2};
    const Vector3 x{0.3, 0.6, 1.5};
    const SurfaceMesh one = mesh_surface(sq, 1, 1);
    for (auto anchor : {DipoleAnchor::corner, DipoleAnchor::centroid})
        CHECK(dipole_mesh_field(one, dp, x, {}, anchor) == dipole_panel_field(one.panels()[0], dp, x, {}, anchor));
    CHECK(dipole_mesh_field(one, dp, x, {}, DipoleAnchor::cell) ==
          dipole_panel_field(one.panels()[0], dp, x, {}, DipoleAnchor::centroid));

    // moments add up: four quarter panels around the same centre, seen from afar
    const Vector3 far{0.5, 0.5, 1000};
    const SurfaceMesh two = mesh_surface(sq, 2, 2);
    CHECK(rel(dipole_mesh_field(two, dp, far, {}, DipoleAnchor::centroid),
              dipole_mesh_field(one, dp, far, {}, DipoleAnchor::centroid)) <= 1e-6);

    // second order with cell anchors: differences shrink at least 4x per doubling
    const Vector3 probe{0.5, 0.5, 2};
    std::vector<Vector3> values;
    for (int m : {8, 16, 32, 64}) values.push_back(dipole_mesh_field(mesh_surface(sq, m, m), dp, probe, {},
                                                                       DipoleAnchor::cell));
    for (std::size_t i = 2; i < values.size(); ++i) {
        const double ratio = norm(values[i - 1] - values[i - 2]) / norm(values[i] - values[i - 1]);
        CHECK(ratio >= 4.0);
    }
    // serial reference
    const SurfaceMesh disk = mesh_surface(SurfacePatch::disk({0, 0, 0}, 1.0, {0, 0, 1}), 40, 40);
    for (auto anchor : {DipoleAnchor::corner, DipoleAnchor::centroid, DipoleAnchor::cell})
        CHECK(dipole_mesh_field(disk, dp, x, {}, anchor, 1e-6, Exec::serial) ==
              dipole_mesh_field(disk, dp, x, {}, anchor, 1e-6, Exec::parallel));
}

TEST_CASE("differential probe on linear fields") {
    std::mt19937_64 rng(kSeed + 9);
    for (int trial = 0; trial < 20; ++trial) {
        const Vector3 x = random_vector(rng, 10);
        const auto rot = differential_probe([](const Vector3& p) { return Vector3{-p.y, p.x, 0}; }, x, 1e-3);
        CHECK(max_abs_diff(rot.curl, {0, 0, 2}) <= 1e-9);
        CHECK(std::abs(rot.divergence) <= 1e-9);
        const auto id = differential_probe([](const Vector3& p) { return p; }, x, 1e-3);
        CHECK(std::abs(id.divergence - 3) <= 1e-9);
        CHECK(norm(id.curl) <= 1e-9);
    }
    CHECK(default_probe_step(2.0) == doctest::Approx(2e-3));
}

TEST_CASE("loop field is curl and divergence free off the wire") {
    const Curve loop = Curve::circle({0, 0, 0}, 1.0, {0, 0, 1});
    const VectorField b = [&](const Vector3& p) { return biot_savart(loop, p); };
    const auto probe = differential_probe(b, {0, 0, 1.5}, 1e-3);
    CHECK(norm(probe.curl) <= 1e-5);
    CHECK(std::abs(probe.divergence) <= 1e-5);
}

TEST_CASE("charged and dipole sheets satisfy the source-free equations off support") {
    const SurfacePatch sq = SurfacePatch::planar_rect({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
    const VectorField e = [&](const Vector3& p) { return coulomb_surface_field(sq, 1.0, p); };
    const VectorField d = [&](const Vector3& p) { return dipole_sheet_field_exact(sq, {1.0, 0.05}, p); };
    for (const Vector3 x : {Vector3{0.5, 0.5, 1}, Vector3{1.5, -0.3, 0.8}}) {
        for (const auto& f : {e, d}) {
            const auto probe = differential_probe(f, x, 1e-3);
            CHECK(norm(probe.curl) <= 1e-5);
            CHECK(std::abs(probe.divergence) <= 1e-5);
        }
    }
}

TEST_CASE("cross projection identity") {
    std::mt19937_64 rng(kSeed + 11);
    for (int trial = 0; trial < 100; ++trial) {
        const Vector3 r = random_unit(rng);
        const auto ij = cross_projection_identity({1, 0, 0}, {0, 1, 0}, r);
        const Vector3 want{r.z * r.x, r.z * r.y, r.z * r.z};
        CHECK(max_abs_diff(ij.lhs, want) <= 1e-15);
        CHECK(max_abs_diff(ij.rhs, want) <= 1e-15);
        const Vector3 a = random_vector(rng, 3);
        const auto same = cross_projection_identity(a, a, r);
        CHECK(norm(same.lhs) == 0.0);
        CHECK(norm(same.rhs) <= 1e-14 * norm2(a));
    }
    for (int trial = 0; trial < 10000; ++trial) {
        const Vector3 a = random_vector(rng, 10), b = random_vector(rng, 10), r = random_unit(rng);
        const auto s = cross_projection_identity(a, b, r);
        CHECK(norm(s.lhs - s.rhs) <= 1e-12 * norm(a) * norm(b));
    }
    CHECK(kind_of([] { (void)cross_projection_identity({1, 0, 0}, {0, 1, 0}, {0, 0, 1.001}); }) == ErrorKind::NotUnit);
}

TEST_CASE("Taylor probe") {
    const double eps[] = {1e-4};
    const auto t = taylor_probe({1, 0, 0}, {1, 0, 0}, eps);
    CHECK(t.analytic == -3.0);
    CHECK(t.fd_slopes[0] == doctest::Approx(-3.0).epsilon(1e-3));

    const double sweep[] = {0.1, 0.05, 0.025, 0.0125};
    const auto perp = taylor_probe({1, 2, 0}, {0, 0, 1}, sweep);
    CHECK(perp.analytic == 0.0);
    for (std::size_t i = 1; i < perp.eps.size(); ++i)
        CHECK(std::abs(perp.fd_slopes[i - 1] / perp.fd_slopes[i]) == doctest::Approx(2.0).epsilon(0.02));

    const auto g = taylor_probe({0.4, -1.1, 0.7}, {0.3, 0.2, -0.5}, sweep);
    CHECK(g.analytic == doctest::Approx(-3 * std::pow(norm(Vector3{0.4, -1.1, 0.7}), -5) *
                                        dot(Vector3{0.4, -1.1, 0.7}, {0.3, 0.2, -0.5})));
    for (std::size_t i = 1; i < g.eps.size(); ++i) {
        const double ratio = std::abs(g.fd_slopes[i - 1] - g.analytic) / std::abs(g.fd_slopes[i] - g.analytic);
        CHECK(ratio >= 1.8);
        CHECK(ratio <= 2.2);
    }

    CHECK(kind_of([&] { (void)taylor_probe({0, 0, 0}, {1, 0, 0}, eps); }) == ErrorKind::DegenerateBase);
    const double zero[] = {0.0};
    CHECK(kind_of([&] { (void)taylor_probe({1, 0, 0}, {1, 0, 0}, zero); }) == ErrorKind::InvalidArgument);
    const double big[] = {0.6};
    CHECK(kind_of([&] { (void)taylor_probe({1, 0, 0}, {1, 0, 0}, big); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("constants validation") {
    CHECK(kind_of([] { FieldConstants{0.0, 1.0}.validate(); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { FieldConstants{1.0, std::nan("")}.validate(); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { FieldConstants{}.validate(); }) == ErrorKind::IoError);
}
