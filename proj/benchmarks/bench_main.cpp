#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "mctslab/envs/frozen_lake.hpp"
#include "mctslab/envs/synthetic_tree.hpp"
#include "mctslab/mcts.hpp"
#include "mctslab/power_mean.hpp"
#include "mctslab/regularizer.hpp"
#include "mctslab/rng.hpp"

using namespace mctslab;

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (double& x : out) x = 0.05 + 0.95 * uniform01(rng);
  return out;
}

void BM_PowerMean(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = random_values(n, 1);
  const std::vector<double> w(n, 1.0);
  const PowerExponent p(static_cast<double>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(power_mean({x, w}, p));
}
BENCHMARK(BM_PowerMean)->Args({4, 2})->Args({64, 2})->Args({64, 20})->Args({1024, 2});

void BM_Policy(benchmark::State& state, RegularizerKind kind) {
  const auto q = random_values(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(policy(kind, q));
}
BENCHMARK_CAPTURE(BM_Policy, shannon, RegularizerKind::shannon(0.1))->Arg(16)->Arg(100);
BENCHMARK_CAPTURE(BM_Policy, tsallis, RegularizerKind::tsallis(0.1))->Arg(16)->Arg(100);
BENCHMARK_CAPTURE(BM_Policy, alpha4, RegularizerKind::alpha_div(4.0, 0.1))->Arg(16)->Arg(100);

void BM_SearchSynthetic(benchmark::State& state, TreePolicy tree_policy) {
  const auto tree = std::make_shared<const SyntheticTree>(8, 3, 7);
  const SyntheticTreeEnv env(tree);
  SearchConfig sc;
  sc.n_simulations = static_cast<std::size_t>(state.range(0));
  sc.tree_policy = tree_policy;
  sc.gamma = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(search(env, sc).root_value);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK_CAPTURE(BM_SearchSynthetic, ucb1, TreePolicy{Ucb1{}})->Arg(1000)->Arg(10000);
BENCHMARK_CAPTURE(BM_SearchSynthetic, tents, TreePolicy{E3w{RegularizerKind::tsallis(0.1), 0.1}})
    ->Arg(1000)
    ->Arg(10000);

void BM_SearchFrozenLake(benchmark::State& state) {
  const FrozenLake env;
  SearchConfig sc;
  sc.n_simulations = static_cast<std::size_t>(state.range(0));
  sc.backup = state.range(1) == 1 ? Backup::average() : Backup::power(static_cast<double>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(search(env, sc).recommended_action);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SearchFrozenLake)->Args({4096, 1})->Args({4096, 2});

}  // namespace

BENCHMARK_MAIN();
