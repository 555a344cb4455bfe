// Serial reference kernels against the OpenMP versions. Sizes are rows; the
// model has 30 prototypes over 13 features, about the housing-data setup.

#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "ennreg/kernels.hpp"

namespace {

using namespace ennreg;

constexpr std::size_t kDim = 13;
constexpr std::size_t kPrototypes = 30;

struct Problem {
  std::vector<Prototype> prototypes;
  Matrix x;
  std::vector<double> y;
  std::vector<std::size_t> rows;
};

Problem make_problem(std::size_t n) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> n01(0.0, 1.0);
  Problem p;
  p.prototypes.resize(kPrototypes);
  for (auto& pr : p.prototypes) {
    pr.center.resize(kDim);
    pr.slope.resize(kDim);
    for (auto& c : pr.center) c = n01(rng);
    for (auto& b : pr.slope) b = 0.3 * n01(rng);
    pr.scale = 0.5;
    pr.intercept = n01(rng);
    pr.variance = 0.3;
    pr.precision = 2.0;
  }
  p.x = Matrix(n, kDim);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < kDim; ++c) p.x(r, c) = n01(rng);
  p.y.resize(n);
  for (auto& v : p.y) v = n01(rng);
  p.rows.resize(n);
  std::iota(p.rows.begin(), p.rows.end(), std::size_t{0});
  return p;
}

const kernels::CostSettings kSettings{0.9, 0.01, 1e-3};

void BM_ForwardSerial(benchmark::State& state) {
  const Problem p = make_problem(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::forward_batch_serial(p.prototypes, p.x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ForwardOmp(benchmark::State& state) {
  const Problem p = make_problem(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::forward_batch(p.prototypes, p.x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_GradientSerial(benchmark::State& state) {
  const Problem p = make_problem(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::cost_gradient_serial(p.prototypes, p.x, p.y, p.rows, kSettings));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_GradientOmp(benchmark::State& state) {
  const Problem p = make_problem(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::cost_gradient(p.prototypes, p.x, p.y, p.rows, kSettings));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_ForwardSerial)->RangeMultiplier(8)->Range(64, 32768)->UseRealTime();
BENCHMARK(BM_ForwardOmp)->RangeMultiplier(8)->Range(64, 32768)->UseRealTime();
BENCHMARK(BM_GradientSerial)->RangeMultiplier(8)->Range(64, 32768)->UseRealTime();
BENCHMARK(BM_GradientOmp)->RangeMultiplier(8)->Range(64, 32768)->UseRealTime();

BENCHMARK_MAIN();
