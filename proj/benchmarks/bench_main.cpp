#include <benchmark/benchmark.h>

#include "prstab/gaussian.hpp"
#include "prstab/harmonic.hpp"
#include "prstab/recovery.hpp"
#include "prstab/stability.hpp"

using namespace prstab;

static void BM_ExactLowerReal(benchmark::State& state) {
  const auto a = sample_gaussian_matrix(static_cast<std::size_t>(state.range(0)), 3, Field::Real, 1);
  EnumerationOptions opts;
  opts.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(delta_lower_exact_real(a, opts).value);
}
BENCHMARK(BM_ExactLowerReal)->Arg(8)->Arg(12)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_NumericLower(benchmark::State& state) {
  const Field field = state.range(1) ? Field::Complex : Field::Real;
  const auto a = sample_gaussian_matrix(static_cast<std::size_t>(state.range(0)), 2, field, 2);
  NumericOptions opts;
  opts.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(lower_lipschitz_numeric(a, opts).value);
}
BENCHMARK(BM_NumericLower)->Args({50, 0})->Args({500, 0})->Args({50, 1})->Args({500, 1})->Unit(benchmark::kMillisecond);

static void BM_UpperLipschitz(benchmark::State& state) {
  const auto a = sample_gaussian_matrix(static_cast<std::size_t>(state.range(0)), 8, Field::Complex, 3);
  for (auto _ : state) benchmark::DoNotOptimize(upper_lipschitz(a));
}
BENCHMARK(BM_UpperLipschitz)->Arg(100)->Arg(5000);

static void BM_GmClosed(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(g_m_closed(m, t));
    t += 1e-3;
  }
}
BENCHMARK(BM_GmClosed)->Arg(7)->Arg(1000);

static void BM_KernelComplex(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(kernel_expectation_complex(0.7));
}
BENCHMARK(BM_KernelComplex)->Unit(benchmark::kMillisecond);

static void BM_KernelMonteCarlo(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(mc_kernel_expectation(Field::Complex, 0.7, 100000, 4, 1).estimate);
}
BENCHMARK(BM_KernelMonteCarlo)->Unit(benchmark::kMillisecond);

static void BM_Recovery(benchmark::State& state) {
  const auto a = sample_gaussian_matrix(500, 5, Field::Real, 5);
  const auto x0 = sample_gaussian_vector(5, Field::Real, 6);
  const auto p = RecoveryProblem::with_truth(a, x0, std::vector<double>(500, 0.01));
  RecoveryOptions opts;
  opts.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(solve_quadratic_model(p, opts).residual);
}
BENCHMARK(BM_Recovery)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
