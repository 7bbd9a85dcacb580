#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "isostab/grid.hpp"
#include "isostab/kernels.hpp"

using namespace isostab;

namespace {

GridPtr grid_for(const benchmark::State& state) {
  return SphereGrid::build(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), GridMode::full);
}

std::vector<double> sample_values(const SphereGrid& g) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.37 * static_cast<double>(i)) * 0.01;
  return v;
}

std::vector<double> sample_coeffs(const SphereGrid& g) {
  std::vector<double> c(g.basis().size());
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = 0.01 / (1.0 + static_cast<double>(k));
  return c;
}

template <auto Kernel>
void analyze(benchmark::State& state) {
  const auto g = grid_for(state);
  const auto v = sample_values(*g);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(*g, v));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g->size()));
}

template <auto Kernel>
void synthesize(benchmark::State& state) {
  const auto g = grid_for(state);
  const auto c = sample_coeffs(*g);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(*g, c));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g->size()));
}

void grids(benchmark::internal::Benchmark* b) {
  b->Args({1, 256})->Args({2, 16})->Args({2, 32})->Unit(benchmark::kMicrosecond);
}

}  // namespace

BENCHMARK(analyze<kernels::reference::analyze>)->Name("analyze/reference")->Apply(grids);
BENCHMARK(analyze<kernels::parallel::analyze>)->Name("analyze/parallel")->Apply(grids);
BENCHMARK(synthesize<kernels::reference::synthesize>)->Name("synthesize/reference")->Apply(grids);
BENCHMARK(synthesize<kernels::parallel::synthesize>)->Name("synthesize/parallel")->Apply(grids);
BENCHMARK(synthesize<kernels::reference::synthesize_gradient>)->Name("synthesize_gradient/reference")->Apply(grids);
BENCHMARK(synthesize<kernels::parallel::synthesize_gradient>)->Name("synthesize_gradient/parallel")->Apply(grids);

BENCHMARK_MAIN();
