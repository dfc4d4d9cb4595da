// Serial reference path against the OpenMP path for the hot kernels.
// Arg 0 = Exec::serial, 1 = Exec::parallel.
#include <benchmark/benchmark.h>

#include "ampere/experiments.hpp"
#include "ampere/fields.hpp"
#include "ampere/linking.hpp"

namespace {

using namespace ampere;

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

void BM_GaussLinking(benchmark::State& state) {
    const LinkScene scene = hopf_scene();
    QuadratureSpec spec;
    spec.exec = exec_of(state);
    for (auto _ : state) benchmark::DoNotOptimize(gauss_integral(scene.curve_c, scene.curve_l, {}, spec));
}
BENCHMARK(BM_GaussLinking)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_DipoleMesh(benchmark::State& state) {
    const SurfaceMesh mesh = mesh_surface(SurfacePatch::disk({0, 0, 0}, 1.0, {0, 0, 1}), 256, 256);
    const DipoleSheetSpec dp{1.0, 1e-4};
    for (auto _ : state)
        benchmark::DoNotOptimize(
            dipole_mesh_field(mesh, dp, {0.1, 0.2, 3.0}, kSimilitudeConstants, DipoleAnchor::cell, 1e-6, exec_of(state)));
}
BENCHMARK(BM_DipoleMesh)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_BiotSavartBatch(benchmark::State& state) {
    const Curve loop = Curve::circle({0, 0, 0}, 1.0, {0, 0, 1});
    std::vector<Vector3> points;
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) points.push_back({-2.0 + 0.25 * i, -2.0 + 0.25 * j, 0.75});
    QuadratureSpec spec;
    spec.exec = exec_of(state);
    for (auto _ : state) benchmark::DoNotOptimize(biot_savart_batch(loop, points, {}, spec));
}
BENCHMARK(BM_BiotSavartBatch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CombinatorialLk(benchmark::State& state) {
    const auto catalog = default_catalog(31);
    const auto& scene = catalog.front().scene;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            combinatorial_lk(scene.curve_c, *scene.spanning_mesh, kDefaultTransversalityTol, exec_of(state)));
}
BENCHMARK(BM_CombinatorialLk)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
