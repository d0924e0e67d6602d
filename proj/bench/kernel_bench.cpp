// Kernel timings, serial path (workers=1) against the parallel path
// (workers=0, the runtime default), on the reference production sizes.
#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>

#include "fene/besov.hpp"
#include "fene/fluid.hpp"
#include "fene/fokker_planck.hpp"
#include "fene/parallel.hpp"

namespace {

using namespace fene;

constexpr int kN = 64;
constexpr double kDt = 1e-3;

std::shared_ptr<const ConfigGrid> bench_grid() {
  static auto grid = std::make_shared<const ConfigGrid>(32, 16, 2.0);
  return grid;
}

Distribution bench_density() {
  auto grid = bench_grid();
  Distribution g(kN, grid, 1.0);
  for (std::int64_t node = 0; node < g.planes(); ++node) {
    const int i = static_cast<int>(node) / grid->n_theta();
    const int m = static_cast<int>(node) % grid->n_theta();
    const double h = 0.2 * grid->r(i) * grid->cos_th(m);
    double* plane = g.plane(node);
    for (std::int64_t x = 0; x < g.plane_size(); ++x)
      plane[x] += h * std::cos(2.0 * 3.14159265358979 * x / g.plane_size());
  }
  return g;
}

void BM_FpStep(benchmark::State& state) {
  set_worker_count(static_cast<int>(state.range(0)));
  auto grid = bench_grid();
  const FpPropagator half(grid, 0.5 * kDt);
  const DragField sigma =
      DragField::from_velocity(taylor_green(kN, 0.5, 0.0, 0.0),
                               DragType::kCorotational);
  Distribution g = bench_density();
  for (auto _ : state) {
    fp_step(g, sigma, half, kDt);
    benchmark::DoNotOptimize(g.plane(0));
  }
  set_worker_count(0);
}

void BM_Advect(benchmark::State& state) {
  set_worker_count(static_cast<int>(state.range(0)));
  const SpectralField u = taylor_green(kN, 0.5, 0.0, 0.0);
  Distribution g = bench_density();
  for (auto _ : state) {
    advect(g, u, kDt);
    benchmark::DoNotOptimize(g.plane(0));
  }
  set_worker_count(0);
}

void BM_AssembleStress(benchmark::State& state) {
  set_worker_count(static_cast<int>(state.range(0)));
  const Distribution g = bench_density();
  for (auto _ : state) {
    SpectralField tau = assemble_stress(g, 0.5);
    benchmark::DoNotOptimize(tau.comp(0).data());
  }
  set_worker_count(0);
}

void BM_NsStep(benchmark::State& state) {
  set_worker_count(static_cast<int>(state.range(0)));
  SpectralField u = taylor_green(kN, 0.5, 0.0, 0.0);
  const SpectralField tau = assemble_stress(bench_density(), 0.5);
  PolymerParams params;
  for (auto _ : state) {
    u = ns_step(u, tau, kDt, params);
    benchmark::DoNotOptimize(u.comp(0).data());
  }
  set_worker_count(0);
}

void BM_BesovNorm(benchmark::State& state) {
  set_worker_count(static_cast<int>(state.range(0)));
  const Distribution g = bench_density();
  const BesovParams bp(1.5, 2.0, 2.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(besov_lp_norm(g, bp));
  }
  set_worker_count(0);
}

}  // namespace

BENCHMARK(BM_FpStep)->ArgName("workers")->Arg(1)->Arg(0)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Advect)->ArgName("workers")->Arg(1)->Arg(0)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleStress)->ArgName("workers")->Arg(1)->Arg(0)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NsStep)->ArgName("workers")->Arg(1)->Arg(0)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BesovNorm)->ArgName("workers")->Arg(1)->Arg(0)
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
