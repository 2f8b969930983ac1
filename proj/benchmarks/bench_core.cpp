#include <numbers>
#include <random>

#include <benchmark/benchmark.h>

#include "fracsurf/attractor.hpp"

using namespace fracsurf;

namespace {

CifsSystem demo(double r) {
  const Rect unit{0, 1, 0, 1};
  const double pi = std::numbers::pi;
  return CifsSystem::build(make_partition({unit, AxisGenerator::geometric(r), AxisGenerator::geometric(r)}),
                           ScaleField::constant(0.3), Germ::trig_product(1, pi, 0, pi, 0),
                           ParameterMap::corner_bilinear());
}

void BM_apply_T(benchmark::State& state) {
  const CifsSystem sys = demo(0.6);
  SolveSettings st;
  st.nx = st.ny = static_cast<std::size_t>(state.range(0));
  const FifGrid h = initial_grid(sys, st.nx, st.ny);
  for (auto _ : state) benchmark::DoNotOptimize(apply_T(sys, h, st));
}
BENCHMARK(BM_apply_T)->Arg(65)->Arg(129)->Arg(257);

void BM_solve(benchmark::State& state) {
  const CifsSystem sys = demo(state.range(1) ? 0.6 : 0.5);
  SolveSettings st;
  st.nx = st.ny = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_fif(sys, st));
}
BENCHMARK(BM_solve)->Args({129, 0})->Args({129, 1})->Args({257, 0});

void BM_point_eval(benchmark::State& state) {
  const CifsSystem sys = demo(0.6);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(eval_fif_point(sys, u(rng), u(rng), 40));
}
BENCHMARK(BM_point_eval);

void BM_hausdorff(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PointCloud3 a, b;
  for (std::int64_t k = 0; k < state.range(0); ++k) {
    a.points.push_back({u(rng), u(rng), u(rng)});
    b.points.push_back({u(rng), u(rng), u(rng)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(hausdorff_distance(a, b));
}
BENCHMARK(BM_hausdorff)->Arg(10000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
