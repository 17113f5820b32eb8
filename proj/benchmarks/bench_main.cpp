#include <benchmark/benchmark.h>

#include <cmath>

#include "momlab/convexlab.hpp"
#include "momlab/functionals.hpp"
#include "momlab/measures.hpp"
#include "momlab/momsolve.hpp"
#include "momlab/transport.hpp"

namespace {

using namespace momlab;

Potential quadratic(std::size_t n) {
  return Potential(Field::sample(Grid::line(-10, 10, n), [](double x) { return 0.5 * x * x; }));
}

void BM_LegendreTransform(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Potential phi = quadratic(n);
  const Grid dual = Grid::line(-10, 10, n);
  for (auto _ : state) benchmark::DoNotOptimize(legendre_transform(phi, dual));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LegendreTransform)->RangeMultiplier(4)->Range(256, 65536)->Complexity();

void BM_Convexify(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Field f = Field::sample(Grid::line(-10, 10, n), [](double x) { return 0.5 * x * x + std::cos(3 * x); });
  for (auto _ : state) benchmark::DoNotOptimize(convexify(f));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Convexify)->RangeMultiplier(4)->Range(256, 65536)->Complexity();

void BM_SupConvolution(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Potential phi = quadratic(n);
  const Field f = Field::sample(phi.grid(), [](double x) { return x * x; });
  const SupConvolutionOptions opts{state.range(1) != 0, 10.0};
  for (auto _ : state) benchmark::DoNotOptimize(sup_convolution_fdelta(f, phi, 1e-2, opts));
}
BENCHMARK(BM_SupConvolution)->Args({1001, 0})->Args({1001, 1})->Args({4001, 0})->Args({4001, 1});

void BM_Wasserstein(benchmark::State& state) {
  const Grid g = Grid::line(-8, 8, static_cast<std::size_t>(state.range(0)));
  const Measure mu = Density::normalized(Field::sample(g, [](double x) { return std::exp(-0.5 * x * x); }));
  const Measure nu =
      Density::normalized(Field::sample(g, [](double x) { return std::exp(-std::abs(x - 0.5)); }));
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein_1d(mu, nu, 1.0));
}
BENCHMARK(BM_Wasserstein)->Arg(1001)->Arg(16001);

void BM_SolveGaussian(benchmark::State& state) {
  const Measure mu = Density::normalized(
      Field::sample(Grid::line(-8, 8, 801), [](double x) { return std::exp(-0.5 * x * x); }));
  const Grid grid = Grid::line(-10, 10, static_cast<std::size_t>(state.range(0)));
  SolverOptions opts;
  opts.backend = state.range(1) != 0 ? SolverBackend::gradient_ascent : SolverBackend::fixed_point;
  for (auto _ : state) benchmark::DoNotOptimize(solve_moment_measure(mu, 0.0, grid, opts));
}
BENCHMARK(BM_SolveGaussian)->Args({2001, 0})->Args({8001, 0})->Args({2001, 1})->Unit(benchmark::kMillisecond);

void BM_BlDeficit(benchmark::State& state) {
  const Potential phi = quadratic(static_cast<std::size_t>(state.range(0)));
  const Field f = Field::sample(phi.grid(), [](double x) { return x * x; });
  for (auto _ : state) benchmark::DoNotOptimize(bl_deficit(f, phi));
}
BENCHMARK(BM_BlDeficit)->Arg(4001)->Arg(64001);

}  // namespace
BENCHMARK_MAIN();
