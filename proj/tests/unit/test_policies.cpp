#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "mats/environments.hpp"
#include "mats/policies.hpp"
#include "oracles.hpp"

using namespace mats;

namespace {

Hypergraph pair_chain(std::size_t m) {
  return Hypergraph(std::vector<std::size_t>(m, 2), chain_groups(m, 2));
}

double four_sigma(double n, double p) { return 4.0 * std::sqrt(n * p * (1.0 - p)); }

}  // namespace

TEST(PolicyConfig, Validation) {
  EXPECT_NO_THROW(PolicyConfig::eps_mats(1.0, 1.0).validate());
  EXPECT_NO_THROW(PolicyConfig::eps_mats(1e-6, 0.5).validate());
  EXPECT_THROW(PolicyConfig::eps_mats(0.0, 1.0).validate(), ConfigError);
  EXPECT_THROW(PolicyConfig::eps_mats(1.01, 1.0).validate(), ConfigError);
  EXPECT_THROW(PolicyConfig::eps_mats(0.5, 0.0).validate(), ConfigError);
  EXPECT_THROW(PolicyConfig::ucb(0.0).validate(), ConfigError);
  EXPECT_EQ(parse_policy_kind("ucb_baseline"), PolicyKind::ucb_baseline);
  EXPECT_THROW(parse_policy_kind("mauce"), ConfigError);
}

TEST(SampleScores, ZeroEpsilonIsGreedy) {
  LocalArmStats stats(5);
  stats.mu_hat = {0.1, -2.0, 3.5, 0.0, 7.25};
  stats.n = {1, 2, 3, 0, 9};
  RandomStream rng(1);
  WorkCounters work;
  for (auto gate : {ExplorationGate::per_round, ExplorationGate::per_arm}) {
    const auto theta = sample_scores(stats, PolicyConfig::eps_mats(0.0, 1.0, gate), rng, work);
    EXPECT_EQ(theta, stats.mu_hat);
  }
  EXPECT_EQ(work.gaussian_draws, 0u);
}

TEST(SampleScores, UnpulledArmIsStandardNormal) {
  LocalArmStats stats(1);
  RandomStream rng(2);
  WorkCounters work;
  const auto cfg = PolicyConfig::eps_mats(1.0, 1.0);
  const int n = 100000;
  double sum = 0.0;
  double sq = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x = sample_scores(stats, cfg, rng, work)[0];
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_NEAR(sq / n - mean * mean, 1.0, 0.05);
}

TEST(SampleScores, PosteriorVarianceShrinksWithPulls) {
  LocalArmStats stats(1);
  stats.n = {9};
  stats.mu_hat = {2.0};
  RandomStream rng(3);
  WorkCounters work;
  const auto cfg = PolicyConfig::eps_mats(1.0, 5.0);
  const int n = 100000;
  double sum = 0.0;
  double sq = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x = sample_scores(stats, cfg, rng, work)[0];
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 2.0, 0.01);
  EXPECT_NEAR(sq / n - mean * mean, 5.0 / 10.0, 0.02);
}

TEST(SampleScores, FullEpsilonNeverGreedy) {
  LocalArmStats stats(36);
  RandomStream rng(4);
  WorkCounters work;
  for (auto gate : {ExplorationGate::per_round, ExplorationGate::per_arm}) {
    for (int r = 0; r < 200; ++r) {
      for (double x : sample_scores(stats, PolicyConfig::eps_mats(1.0, 1.0, gate), rng, work)) {
        ASSERT_NE(x, 0.0);
      }
    }
  }
  EXPECT_EQ(work.gaussian_draws, 2u * 200u * 36u);
}

TEST(SampleScores, PerArmGateIsBinomialPerLocalArm) {
  const std::size_t arms = 36;
  const double eps = 0.1;
  const int rounds = 4000;
  LocalArmStats stats(arms);
  RandomStream rng(5);
  WorkCounters work;
  std::vector<int> drawn(arms, 0);
  for (int r = 0; r < rounds; ++r) {
    const auto theta = sample_scores(stats, PolicyConfig::eps_mats(eps, 1.0, ExplorationGate::per_arm),
                                     rng, work);
    for (std::size_t j = 0; j < arms; ++j) drawn[j] += theta[j] != 0.0;
  }
  for (std::size_t j = 0; j < arms; ++j) {
    EXPECT_LE(std::abs(drawn[j] - rounds * eps), four_sigma(rounds, eps)) << "arm " << j;
  }
  EXPECT_EQ(work.gaussian_draws,
            static_cast<std::uint64_t>(std::accumulate(drawn.begin(), drawn.end(), 0)));
}

TEST(SampleScores, PerRoundGateDrawsAllOrNothing) {
  const std::size_t arms = 12;
  const double eps = 0.3;
  const int rounds = 4000;
  LocalArmStats stats(arms);
  RandomStream rng(6);
  WorkCounters work;
  int explored = 0;
  for (int r = 0; r < rounds; ++r) {
    const auto theta = sample_scores(stats, PolicyConfig::eps_mats(eps, 1.0), rng, work);
    const auto nonzero = std::count_if(theta.begin(), theta.end(), [](double x) { return x != 0.0; });
    ASSERT_TRUE(nonzero == 0 || nonzero == static_cast<long>(arms));
    explored += nonzero > 0;
  }
  EXPECT_LE(std::abs(explored - rounds * eps), four_sigma(rounds, eps));
  EXPECT_EQ(work.gaussian_draws, static_cast<std::uint64_t>(explored) * arms);
}

TEST(SampleScores, PerArmDrawCountOverOneTrial) {
  const auto env = chain_env(10, 2, RewardFamily::bernoulli);
  const auto cfg = PolicyConfig::eps_mats(0.1, std::log(1e4), ExplorationGate::per_arm);
  Policy policy(env.graph(), cfg);
  RandomStream rng(7);
  for (std::uint64_t t = 1; t <= 10000; ++t) {
    const auto a = policy.select(t, rng);
    policy.observe(a, sample_rewards(env, a, rng));
  }
  EXPECT_NEAR(static_cast<double>(policy.work().gaussian_draws), 36000.0, 0.02 * 36000.0);
}

TEST(UcbScores, Examples) {
  LocalArmStats one(1);
  EXPECT_EQ(ucb_scores(one, 1, PolicyConfig::ucb(1.0))[0], 0.0);

  LocalArmStats stats(36);
  stats.n[4] = 7;
  stats.mu_hat[4] = 0.5;
  const auto s = ucb_scores(stats, 100, PolicyConfig::ucb(1.0));
  // ln(3600) = 8.188689...; 8.188689 / 16 = 0.511793...; sqrt = 0.715397...
  EXPECT_NEAR(s[4], 1.215397, 1e-6);
  EXPECT_NEAR(s[4], 0.5 + std::sqrt(std::log(3600.0) / 16.0), 1e-12);
}

TEST(UcbScores, BonusFallsWithPulls) {
  LocalArmStats stats(10);
  for (std::size_t j = 0; j < 10; ++j) stats.n[j] = j * 3;
  const auto s = ucb_scores(stats, 50, PolicyConfig::ucb(2.0));
  for (std::size_t j = 1; j < 10; ++j) EXPECT_LT(s[j], s[j - 1]);
}

TEST(SelectArm, RandomPolicyIsUniformOverJointArms) {
  const Hypergraph h({2, 2}, {{0, 1}});
  LocalArmStats stats(h);
  RandomStream rng(8);
  WorkCounters work;
  std::map<std::vector<Arm>, int> freq;
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    ++freq[select_arm(h, stats, PolicyConfig::uniform_random(), 1, rng, work).arms];
  }
  ASSERT_EQ(freq.size(), 4u);
  for (const auto& [arm, count] : freq) EXPECT_NEAR(count / double(n), 0.25, 0.01);
}

TEST(SelectArm, GreedyOnTrueMeansFindsOptimum) {
  const auto env = chain_env(10, 2, RewardFamily::bernoulli);
  LocalArmStats stats(env.graph());
  stats.mu_hat = env.means();
  std::fill(stats.n.begin(), stats.n.end(), 1);
  RandomStream rng(9);
  WorkCounters work;
  const auto a = select_arm(env.graph(), stats, PolicyConfig::eps_mats(0.0, 1.0), 5, rng, work);
  const auto want = oracle::best_joint(env.graph().arm_counts(), env.graph().groups(), env.means());
  EXPECT_EQ(a.arms, want.arm);
}

TEST(SelectArm, FirstRoundReturnsValidAssignment) {
  const Hypergraph h({3, 2, 4}, {{0, 1}, {1, 2}});
  LocalArmStats stats(h);
  RandomStream rng(10);
  WorkCounters work;
  for (int k = 0; k < 100; ++k) {
    const auto a = select_arm(h, stats, PolicyConfig::eps_mats(1.0, 1.0), 1, rng, work);
    EXPECT_TRUE(h.is_valid(a));
  }
  EXPECT_EQ(work.gaussian_draws, 100u * h.local_arm_count());
  EXPECT_GT(work.ve_ops, 0u);
}

TEST(SelectArm, SymmetricGroupIsExchangeableAtFirstRound) {
  const Hypergraph h({2, 2}, {{0, 1}});
  RandomStream rng(11);
  WorkCounters work;
  const int n = 20000;
  std::vector<int> freq(4, 0);
  for (int k = 0; k < n; ++k) {
    LocalArmStats stats(h);
    ++freq[h.joint_index(select_arm(h, stats, PolicyConfig::eps_mats(1.0, 1.0), 1, rng, work))];
  }
  for (int f : freq) EXPECT_LE(std::abs(f - n / 4.0), four_sigma(n, 0.25));
}

TEST(UpdateStats, Examples) {
  const Hypergraph h({2, 2}, {{0}, {1}});
  LocalArmStats stats(h);
  update_stats(stats, h, JointAssignment{{1, 0}}, std::vector<double>{0.7, 0.0});
  EXPECT_EQ(stats.mu_hat[1], 0.7);
  EXPECT_EQ(stats.n[1], 1u);

  LocalArmStats seq(h);
  for (double r : {1.0, 0.0, 1.0}) update_stats(seq, h, JointAssignment{{0, 1}}, std::vector<double>{r, r});
  EXPECT_NEAR(seq.mu_hat[0], 2.0 / 3.0, 1e-15);
  EXPECT_EQ(seq.n[0], 3u);

  EXPECT_THROW(update_stats(stats, h, JointAssignment{{0, 0}}, std::vector<double>{1.0}),
               std::invalid_argument);
}

TEST(UpdateStats, TouchesOnlyPlayedEntries) {
  const Hypergraph h({2, 3}, {{0}, {1}});
  LocalArmStats stats(h);
  stats.mu_hat = {0.1, 0.2, 0.3, 0.4, 0.5};
  stats.n = {1, 1, 1, 1, 1};
  const auto before = stats;
  update_stats(stats, h, JointAssignment{{1, 2}}, std::vector<double>{9.0, 0.5});
  EXPECT_EQ(stats.mu_hat[0], before.mu_hat[0]);
  EXPECT_EQ(stats.mu_hat[2], before.mu_hat[2]);
  EXPECT_EQ(stats.mu_hat[3], before.mu_hat[3]);
  EXPECT_EQ(stats.n[2], 1u);
  EXPECT_NE(stats.mu_hat[1], before.mu_hat[1]);
}

TEST(PolicyProperty, IncrementalMeanMatchesBatchMean) {
  const Hypergraph h({3, 2, 2}, {{0, 1}, {1, 2}, {0}});
  LocalArmStats stats(h);
  std::vector<std::vector<double>> history(h.local_arm_count());
  std::mt19937_64 gen(12);
  std::normal_distribution<double> reward(0.3, 2.0);
  RandomStream rng(12);
  for (int t = 1; t <= 10000; ++t) {
    const auto a = random_arm(h, ActionSpace::full(), rng);
    std::vector<double> r(h.num_groups());
    for (auto& x : r) x = reward(gen);
    update_stats(stats, h, a, r);
    for (std::size_t e = 0; e < h.num_groups(); ++e) {
      history[oracle::flat_index(h.arm_counts(), h.groups(), a.arms, e)].push_back(r[e]);
    }
  }
  for (std::size_t j = 0; j < history.size(); ++j) {
    ASSERT_EQ(stats.n[j], history[j].size());
    if (history[j].empty()) {
      EXPECT_EQ(stats.mu_hat[j], 0.0);
      continue;
    }
    const double batch = std::accumulate(history[j].begin(), history[j].end(), 0.0) /
                         static_cast<double>(history[j].size());
    EXPECT_NEAR(stats.mu_hat[j], batch, 1e-9);
  }
}

TEST(PolicyProperty, PullsAreConservedPerGroup) {
  const auto env = chain_env(6, 3, RewardFamily::bernoulli);
  for (auto cfg : {PolicyConfig::eps_mats(0.2, 2.0), PolicyConfig::ucb(1.0),
                   PolicyConfig::uniform_random()}) {
    Policy policy(env.graph(), cfg);
    RandomStream rng(13);
    for (std::uint64_t t = 1; t <= 500; ++t) {
      const auto a = policy.select(t, rng);
      policy.observe(a, sample_rewards(env, a, rng));
      const auto& h = env.graph();
      for (std::size_t e = 0; e < h.num_groups(); ++e) {
        std::uint64_t total = 0;
        for (std::size_t j = 0; j < h.group_size(e); ++j) total += policy.stats().n[h.local_offset(e) + j];
        ASSERT_EQ(total, t);
      }
    }
  }
}

TEST(PolicyProperty, SameSeedSameArmSequence) {
  const auto env = chain_env(8, 2, RewardFamily::poisson);
  auto run = [&](std::uint64_t seed) {
    Policy policy(env.graph(), PolicyConfig::eps_mats(0.3, 3.0));
    RandomStream rng(seed);
    std::vector<std::uint64_t> arms;
    for (std::uint64_t t = 1; t <= 300; ++t) {
      const auto a = policy.select(t, rng);
      arms.push_back(env.graph().joint_index(a));
      policy.observe(a, sample_rewards(env, a, rng));
    }
    return arms;
  };
  EXPECT_EQ(run(42), run(42));
  EXPECT_NE(run(42), run(43));
}

TEST(RandomArm, RestrictedSpaceIsUniformOverAdmissibleArms) {
  const Hypergraph h({3, 3}, {{0}, {1}});
  const auto space = ActionSpace::from_boxes(h, {ArmDomain{{0, 1}, {0, 1}}, ArmDomain{{2}, {2}}});
  RandomStream rng(14);
  std::map<std::vector<Arm>, int> freq;
  const int n = 50000;
  for (int k = 0; k < n; ++k) {
    const auto a = random_arm(h, space, rng);
    ASSERT_TRUE(space.contains(a));
    ++freq[a.arms];
  }
  ASSERT_EQ(freq.size(), 5u);
  for (const auto& [arm, count] : freq) EXPECT_LE(std::abs(count - n / 5.0), four_sigma(n, 0.2));
}
