#include <benchmark/benchmark.h>

#include "mpstomo/fisher.hpp"
#include "mpstomo/kmatrix.hpp"
#include "mpstomo/mle.hpp"
#include "mpstomo/sampler.hpp"
#include "mpstomo/states.hpp"

namespace {

using namespace mpstomo;

void BM_Sample(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const ProbabilityMpo prob(State{random_mps(n, 2, Realness::complex, 1)});
  std::uint64_t seed = 0;
  for (auto _ : st) benchmark::DoNotOptimize(sample(prob, 1000, ++seed));
  st.SetItemsProcessed(st.iterations() * 1000);
}
BENCHMARK(BM_Sample)->Arg(8)->Arg(16)->Arg(32);

void BM_NllGradient(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const int kappa = static_cast<int>(st.range(1));
  const State truth{random_mps(n, 2, Realness::complex, 2)};
  const SampleSet samples = sample(ProbabilityMpo(truth), 1000, 3);
  const ModelSpec spec = make_model(State{random_mpdo(n, 2, kappa, Realness::complex, 4)}, Realness::complex, false);
  for (auto _ : st) benchmark::DoNotOptimize(nll_gradient(spec, samples));
  st.SetItemsProcessed(st.iterations() * 1000);
}
BENCHMARK(BM_NllGradient)->Args({8, 1})->Args({8, 2})->Args({16, 1});

void BM_KMatrix(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const ModelSpec spec = make_model(State{random_mps(n, 2, Realness::real, 5)}, Realness::complex, false);
  for (auto _ : st) benchmark::DoNotOptimize(k_matrix(spec));
}
BENCHMARK(BM_KMatrix)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_FisherMonteCarlo(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const ModelSpec spec = make_model(State{random_mps(n, 2, Realness::real, 6)}, Realness::real, false);
  MonteCarloOptions options;
  options.max_samples = 10000;
  options.convergence_tol = 0.0;
  for (auto _ : st) benchmark::DoNotOptimize(fisher_monte_carlo(spec, options));
}
BENCHMARK(BM_FisherMonteCarlo)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_FisherExact(benchmark::State& st) {
  const ModelSpec spec = make_model(State{random_mps(6, 2, Realness::real, 7)}, Realness::real, false);
  for (auto _ : st) benchmark::DoNotOptimize(fisher_exact(spec));
}
BENCHMARK(BM_FisherExact)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
