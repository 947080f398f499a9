// Microbenchmarks for the per-step hot paths: the stencil, the recorded
// norms, and the field generator.  Items processed = grid cells, so the
// items/s column reads as cell throughput.

#include <benchmark/benchmark.h>

#include <cmath>

#include "hwave/grid_field.hpp"
#include "hwave/solver.hpp"
#include "hwave/threading.hpp"

using namespace hwave;

namespace {

GridSpec cube_grid(int n_xy) {
  GridSpec g;
  g.n = 1;
  g.half_widths = {4.0, 4.0, 16.0};
  g.points = {n_xy, n_xy, 4 * (n_xy - 1) + 1};
  return g;
}

Field gaussian_field(const GridSpec& g) {
  return sample(g, [](double x, double y, double tau) {
    return std::exp(-(x * x + y * y) - std::abs(tau));
  });
}

}  // namespace

static void BM_sublaplacian(benchmark::State& state) {
  const GridSpec g = cube_grid(static_cast<int>(state.range(0)));
  const Field u = gaussian_field(g);
  Field out(g);
  for (auto _ : state) {
    apply_sublaplacian_into(u, out);
    benchmark::DoNotOptimize(out.values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}
BENCHMARK(BM_sublaplacian)->Arg(17)->Arg(33)->Arg(65);

static void BM_sublaplacian_composed(benchmark::State& state) {
  const GridSpec g = cube_grid(static_cast<int>(state.range(0)));
  const Field u = gaussian_field(g);
  for (auto _ : state) {
    Field out = apply_sublaplacian_composed(u);
    benchmark::DoNotOptimize(out.values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}
BENCHMARK(BM_sublaplacian_composed)->Arg(33);

static void BM_solver_step(benchmark::State& state) {
  const GridSpec g = cube_grid(static_cast<int>(state.range(0)));
  const Field u0 = gaussian_field(g);
  SolverConfig cfg;
  cfg.p = 1.5;
  cfg.t_end = 1e6;  // never reached; dt comes from the CFL limit
  SolverState s = init_state(u0, u0, cfg);
  for (auto _ : state) {
    step(s, cfg);
    benchmark::DoNotOptimize(s.u_curr.values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}
BENCHMARK(BM_solver_step)->Arg(17)->Arg(33)->Arg(65);

static void BM_lq_norm(benchmark::State& state) {
  const GridSpec g = cube_grid(33);
  const Field u = gaussian_field(g);
  for (auto _ : state) benchmark::DoNotOptimize(lq_norm(u, 2.0));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}
BENCHMARK(BM_lq_norm);

static void BM_weighted_l2(benchmark::State& state) {
  const GridSpec g = cube_grid(33);
  const Field u = gaussian_field(g);
  for (auto _ : state) benchmark::DoNotOptimize(weighted_l2(u, 1.0, 0.0));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}
BENCHMARK(BM_weighted_l2);

static void BM_horizontal_gradient(benchmark::State& state) {
  const GridSpec g = cube_grid(33);
  const Field u = gaussian_field(g);
  for (auto _ : state) {
    auto grad = apply_horizontal_gradient(u);
    benchmark::DoNotOptimize(grad.first.values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}
BENCHMARK(BM_horizontal_gradient);

static void BM_random_field(benchmark::State& state) {
  const GridSpec g = cube_grid(33);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    Field u = random_field(g, seed++);
    benchmark::DoNotOptimize(u.values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}
BENCHMARK(BM_random_field);

int main(int argc, char** argv) {
  set_thread_count(1);  // single-threaded kernels; parallel speedup is measured elsewhere
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  return 0;
}
