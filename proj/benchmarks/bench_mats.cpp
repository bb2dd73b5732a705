#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "mats/elimination.hpp"
#include "mats/environments.hpp"
#include "mats/policies.hpp"

namespace {

mats::Hypergraph chain(std::size_t m) {
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i + 1 < m; ++i) groups.push_back({i, i + 1});
  return mats::Hypergraph(std::vector<std::size_t>(m, 2), groups);
}

std::vector<double> uniform_scores(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u;
  std::vector<double> s(n);
  for (auto& x : s) x = u(rng);
  return s;
}

void BM_VariableElimination(benchmark::State& state) {
  const auto h = chain(static_cast<std::size_t>(state.range(0)));
  const auto scores = uniform_scores(h.local_arm_count());
  mats::Maximizer maximizer(h);
  for (auto _ : state) benchmark::DoNotOptimize(maximizer.argmax(scores));
  state.counters["ops"] = static_cast<double>(maximizer.op_count());
}
BENCHMARK(BM_VariableElimination)->RangeMultiplier(2)->Range(4, 64);

void BM_BruteForce(benchmark::State& state) {
  const auto h = chain(static_cast<std::size_t>(state.range(0)));
  const auto scores = uniform_scores(h.local_arm_count());
  for (auto _ : state) benchmark::DoNotOptimize(mats::brute_argmax(h, scores));
}
BENCHMARK(BM_BruteForce)->DenseRange(4, 16, 4);

void BM_PolicyRound(benchmark::State& state) {
  const auto env = mats::chain_env(10, 2, mats::RewardFamily::bernoulli);
  const double eps = static_cast<double>(state.range(0)) / 100.0;
  mats::Policy policy(env.graph(), mats::PolicyConfig::eps_mats(eps, std::log(1e4)));
  mats::RandomStream rng(7);
  std::uint64_t t = 0;
  for (auto _ : state) {
    const auto a = policy.select(++t, rng);
    policy.observe(a, mats::sample_rewards(env, a, rng));
  }
}
BENCHMARK(BM_PolicyRound)->Arg(1)->Arg(10)->Arg(50)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
