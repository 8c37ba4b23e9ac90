#include <benchmark/benchmark.h>

#include <liequant/besov.hpp>
#include <liequant/fourier.hpp>
#include <liequant/group.hpp>
#include <liequant/quantization.hpp>
#include <liequant/symbol_calculus.hpp>

using namespace liequant;

namespace {

void BM_grid_build(benchmark::State& state) {
  const double band = static_cast<double>(state.range(0));
  for (auto _ : state) {
    QuadratureGrid grid = haar_grid(GroupId::su2(), band);
    benchmark::DoNotOptimize(grid.size());
  }
}
BENCHMARK(BM_grid_build)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_forward(benchmark::State& state) {
  const double band = static_cast<double>(state.range(0));
  const QuadratureGrid grid = haar_grid(GroupId::su2(), band);
  const GridFunction f = random_band_limited(grid, 1, band);
  for (auto _ : state) {
    SpectralCoefficients c = forward(f, band);
    benchmark::DoNotOptimize(c.blocks.data());
  }
}
BENCHMARK(BM_forward)->Arg(2)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_inverse(benchmark::State& state) {
  const double band = static_cast<double>(state.range(0));
  const QuadratureGrid grid = haar_grid(GroupId::su2(), band);
  const GridFunction f = random_band_limited(grid, 1, band);
  const SpectralCoefficients c = forward(f, band);
  for (auto _ : state) {
    GridFunction g = inverse(c, grid);
    benchmark::DoNotOptimize(g.values.data());
  }
}
BENCHMARK(BM_inverse)->Arg(2)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_op_apply_multiplier(benchmark::State& state) {
  const double band = static_cast<double>(state.range(0));
  const QuadratureGrid grid = haar_grid(GroupId::su2(), band);
  const GridFunction f = random_band_limited(grid, 1, band);
  const Symbol a = builtin_symbol("bessel_potential:-1", grid.group(), band);
  for (auto _ : state) {
    GridFunction g = op_apply(a, f);
    benchmark::DoNotOptimize(g.values.data());
  }
}
BENCHMARK(BM_op_apply_multiplier)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_op_apply_full_symbol(benchmark::State& state) {
  const double band = static_cast<double>(state.range(0));
  const QuadratureGrid grid = haar_grid(GroupId::su2(), band);
  const GridFunction f = random_band_limited(grid, 1, band);
  const Symbol a = builtin_symbol("modulated_bessel:-1", grid.group(), band);
  for (auto _ : state) {
    GridFunction g = op_apply(a, f);
    benchmark::DoNotOptimize(g.values.data());
  }
}
BENCHMARK(BM_op_apply_full_symbol)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_besov_norm(benchmark::State& state) {
  const double band = static_cast<double>(state.range(0));
  const QuadratureGrid grid = haar_grid(GroupId::su2(), band);
  const GridFunction f = random_band_limited(grid, 1, band);
  for (auto _ : state) {
    BesovResult res = besov_norm(f, 0.5, 2.0, 2.0);
    benchmark::DoNotOptimize(res.value);
  }
}
BENCHMARK(BM_besov_norm)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_weak_norm(benchmark::State& state) {
  const double band = static_cast<double>(state.range(0));
  const Symbol a = builtin_symbol("bessel_potential:-1", GroupId::sphere(), band);
  for (auto _ : state) {
    WeakNormResult w = weak_plancherel_norm(a, 4.0 / 3.0, 4.0);
    benchmark::DoNotOptimize(w.value);
  }
}
BENCHMARK(BM_weak_norm)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
