#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mats/elimination.hpp"
#include "mats/hypergraph.hpp"
#include "mats/random.hpp"

namespace mats {

/// Pull counts and empirical means per flat local arm.
struct LocalArmStats {
  std::vector<std::uint64_t> n;
  std::vector<double> mu_hat;

  LocalArmStats() = default;
  explicit LocalArmStats(std::size_t local_arms) : n(local_arms, 0), mu_hat(local_arms, 0.0) {}
  explicit LocalArmStats(const Hypergraph& h) : LocalArmStats(h.local_arm_count()) {}

  std::size_t size() const noexcept { return n.size(); }
};

enum class PolicyKind { eps_mats, ucb_baseline, random };

/// Where the epsilon coin of eps_mats is tossed.
///   per_round: one toss per round; heads samples every local arm from its
///              posterior, tails plays greedily on the empirical means.
///   per_arm:   an independent toss for every local arm in every round.
enum class ExplorationGate { per_round, per_arm };

std::string_view to_string(PolicyKind kind) noexcept;
PolicyKind parse_policy_kind(std::string_view name);
std::string_view to_string(ExplorationGate gate) noexcept;
ExplorationGate parse_exploration_gate(std::string_view name);

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct PolicyConfig {
  PolicyKind kind = PolicyKind::eps_mats;
  /// Probability of drawing a posterior sample for a local arm (eps_mats).
  /// epsilon = 1 is plain multi-agent Thompson sampling.
  double epsilon = 1.0;
  /// Posterior variance scale (eps_mats).
  double c = 1.0;
  /// Reward range of one group (ucb_baseline).
  double ucb_range = 1.0;
  ExplorationGate gate = ExplorationGate::per_round;

  /// Throws ConfigError unless epsilon ∈ (0,1], c > 0 and ucb_range > 0.
  void validate() const;

  static PolicyConfig eps_mats(double epsilon, double c,
                               ExplorationGate gate = ExplorationGate::per_round) {
    return {PolicyKind::eps_mats, epsilon, c, 1.0, gate};
  }
  static PolicyConfig mats(double c) { return eps_mats(1.0, c); }
  static PolicyConfig ucb(double range) { return {PolicyKind::ucb_baseline, 1.0, 1.0, range}; }
  static PolicyConfig uniform_random() { return {PolicyKind::random, 1.0, 1.0, 1.0}; }
};

/// Work done by a policy, accumulated over rounds.
struct WorkCounters {
  std::uint64_t gaussian_draws = 0;
  std::uint64_t ve_ops = 0;
};

/// Epsilon-gated posterior scores. A posterior sample is θ ~ N(μ̂, c/(n+1));
/// the greedy branch uses θ = μ̂.
///
/// Draw order on `rng`:
///   per_round: one uniform u; if u < epsilon, one normal per flat local arm
///              in ascending index order.
///   per_arm:   for each flat local arm in ascending order, one uniform u and,
///              if u < epsilon, one normal.
///
/// epsilon is not validated here, so epsilon = 0 yields the greedy scores.
ScoreVector sample_scores(const LocalArmStats& stats, const PolicyConfig& cfg, RandomStream& rng,
                          WorkCounters& work);

/// UCB-style stand-in baseline, not a reimplementation of any published
/// multi-agent UCB method:
///   score[j] = μ̂[j] + range·sqrt(ln(t·A_loc) / (2(n[j]+1))).
ScoreVector ucb_scores(const LocalArmStats& stats, std::uint64_t t, const PolicyConfig& cfg);

/// Picks the joint arm for round t (1-based). eps_mats and ucb_baseline
/// maximize their scores with `maximizer`, which fixes the action space.
JointAssignment select_arm(const Hypergraph& h, const LocalArmStats& stats,
                           const PolicyConfig& cfg, std::uint64_t t, RandomStream& rng,
                           WorkCounters& work, Maximizer& maximizer,
                           const ActionSpace& space = {});

/// Convenience overload that compiles a fresh maximizer for `space`.
JointAssignment select_arm(const Hypergraph& h, const LocalArmStats& stats,
                           const PolicyConfig& cfg, std::uint64_t t, RandomStream& rng,
                           WorkCounters& work, const ActionSpace& space = {});

/// Uniform draw over an action space. Full spaces sample every agent
/// independently; restricted spaces pick a box in proportion to its size
/// and then sample inside it.
JointAssignment random_arm(const Hypergraph& h, const ActionSpace& space, RandomStream& rng);

/// Incremental-mean update of the local arm each group played.
void update_stats(LocalArmStats& stats, const Hypergraph& h, const JointAssignment& a,
                  std::span<const double> rewards);

/// Stateful wrapper that owns the statistics and work counters of one trial.
class Policy {
 public:
  Policy(const Hypergraph& h, PolicyConfig cfg, ActionSpace space = {});

  JointAssignment select(std::uint64_t t, RandomStream& rng);
  void observe(const JointAssignment& a, std::span<const double> rewards);

  const LocalArmStats& stats() const noexcept { return stats_; }
  const PolicyConfig& config() const noexcept { return cfg_; }
  const WorkCounters& work() const noexcept { return work_; }

 private:
  const Hypergraph* graph_;
  PolicyConfig cfg_;
  ActionSpace space_;
  Maximizer maximizer_;
  LocalArmStats stats_;
  WorkCounters work_;
};

}  // namespace mats
