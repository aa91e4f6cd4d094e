// Serial reference against the OpenMP kernel for each parallel loop.
#include "conevex/body.hpp"
#include "conevex/convex.hpp"
#include "conevex/covolume.hpp"
#include "conevex/invariant.hpp"
#include "conevex/sphere.hpp"

#include <benchmark/benchmark.h>

using namespace conevex;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::Parallel : Exec::Serial; }

const Body& quad_body() {
  static const Body b = [] {
    auto sphere = std::make_shared<const AffineSphere>(closed_form_sphere(ConeModel::quadratic(2), 129));
    Vec v = Vec::Zero(3);
    return offset_body(sphere, v, 0.5);
  }();
  return b;
}

const TauBody& tau_body() {
  static const TauBody b = [] {
    const ConeModel cone = ConeModel::simplicial(2);
    Vec e1(3), e2(3), v(3);
    e1 << 2, 1, 0.5;
    e2 << 1, 2, 0.5;
    v << 1, 0, 0;
    const GroupAction act =
        coboundary_cocycle(cone, {diagonal_in_ray_basis(cone, e1), diagonal_in_ray_basis(cone, e2)}, v, 6);
    auto dom = std::make_shared<const FundamentalDomain>(cone, act, 64);
    auto dmax = std::make_shared<const MaximalDomain>(maximal_domain(act, cone, 33));
    return sigma_offset(dom, dmax, 0.5);
  }();
  return b;
}

void BM_Legendre(benchmark::State& st) {
  const GridFn f = sample_on(GridSpec::box(Vec::Constant(2, -1.0), Vec::Constant(2, 1.0), 65),
                             std::vector<std::uint8_t>(65 * 65, 1), [](const Vec& y) { return 0.5 * y.squaredNorm(); });
  const GridSpec target = default_slope_grid(f);
  for (auto _ : st) benchmark::DoNotOptimize(legendre_transform(f, target, exec_of(st)));
}

void BM_AreaMeasure(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(area_measure(quad_body(), exec_of(st)));
}

void BM_ParallelVolume(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(parallel_volume(quad_body(), 0.2, exec_of(st)));
}

void BM_TorusArea(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(torus_area(tau_body(), true, exec_of(st)));
}

void BM_CovolumeMc(benchmark::State& st) {
  const TauBody& b = tau_body();
  for (auto _ : st) benchmark::DoNotOptimize(covolume_mc(b, b.dom->y(b.dom->size() / 2), 20000, 11, exec_of(st)));
}

}  // namespace

BENCHMARK(BM_Legendre)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AreaMeasure)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ParallelVolume)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TorusArea)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CovolumeMc)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
