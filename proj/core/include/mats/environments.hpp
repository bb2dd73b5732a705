#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mats/elimination.hpp"
#include "mats/hypergraph.hpp"
#include "mats/random.hpp"

namespace mats {

/// Reward law of one group. Gaussian rewards have unit variance.
enum class RewardFamily { bernoulli, poisson, gaussian };

std::string_view to_string(RewardFamily family) noexcept;
RewardFamily parse_reward_family(std::string_view name);

class EnvironmentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A factored stochastic reward world: a hypergraph, a true mean for every
/// local arm and a reward law per group. The optimum is computed once at
/// construction (enumeration when the action space has at most 2^20 arms,
/// exact variable elimination otherwise).
class Environment {
 public:
  Environment(std::string name, Hypergraph graph, std::vector<double> means,
              std::vector<RewardFamily> families, ActionSpace space = {});

  const std::string& name() const noexcept { return name_; }
  const Hypergraph& graph() const noexcept { return graph_; }
  const std::vector<double>& means() const noexcept { return means_; }
  RewardFamily family(std::size_t group) const { return families_.at(group); }
  const std::vector<RewardFamily>& families() const noexcept { return families_; }
  const ActionSpace& action_space() const noexcept { return space_; }

  const JointAssignment& optimal_arm() const noexcept { return optimal_arm_; }
  double optimal_value() const noexcept { return optimal_value_; }

  /// μ_a = Σ_e μ_{a^e}.
  double mean_reward(const JointAssignment& a) const;

 private:
  std::string name_;
  Hypergraph graph_;
  std::vector<double> means_;
  std::vector<RewardFamily> families_;
  ActionSpace space_;
  JointAssignment optimal_arm_;
  double optimal_value_ = 0.0;
};

/// 0101-chain over m agents with two arms each and groups of d consecutive
/// agents (d = 2 or 3). Only bernoulli and poisson families are defined.
///
/// d = 2: group e uses mean[a_e][a_{e+1}] from the base table when e is even
/// and the transposed table when e is odd, which makes (0,1,0,1,...) optimal.
/// d = 3: group e looks up the tuple rotated left by e mod 3 positions in the
/// three-agent table, which keeps the all-ones arm optimal.
Environment chain_env(std::size_t m, std::size_t d, RewardFamily family);

/// Generated gem-mining layout: villages are agents, mines are groups.
struct GemMiningLayout {
  std::vector<unsigned> workers;             ///< per village, in {1..5}
  std::vector<std::size_t> first_mine;       ///< village i reaches mines first_mine[i]...
  std::vector<std::size_t> reach;            ///< ...through first_mine[i] + reach[i] - 1
  std::vector<double> base_probability;      ///< per kept mine, U[0, 0.5]
  std::vector<std::size_t> mine_ids;         ///< original mine id of each group
};

/// Probability of finding a gem when `workers` villagers work a mine with
/// base probability p: min(1, 1.03^(w-1)·p), and 0 for an empty mine.
double gem_probability(unsigned workers, double p);

/// Draws a layout. Draw order: per village its worker count, then (except
/// for the last village, which always reaches 4 mines) its reach in {2,3,4};
/// then one base probability per mine in mine order.
GemMiningLayout generate_gem_mining(std::size_t num_villages, RandomStream& rng);

/// Environment for a layout; village i's arm j sends its workers to mine
/// first_mine[i] + j. Rewards are one Bernoulli draw per mine.
Environment gem_mining_env(const GemMiningLayout& layout);
Environment gem_mining_env(std::size_t num_villages, RandomStream& rng);

/// Hard instance for plain Thompson sampling: rho groups with one agent
/// each and L+1 local arms. Arms 0..L-1 have mean X, arm L has mean
/// X + delta. Only L^rho all-suboptimal joint arms plus the all-optimal one
/// are admissible. Unit-variance Gaussian rewards. Requires X > 3, delta > 0.
Environment lower_bound_env(std::size_t rho, std::size_t L, double X, double delta);

/// Number of mean-X arms per group that makes the hard instance work for
/// rho groups: ceil(2e·rho·log_{1/b} 2 + 2e·log_{1/b} rho) with b = Φ(1).
std::size_t lower_bound_arm_count(std::size_t rho);

/// Table-driven environment read from a YAML file:
///
///   graph:
///     arm_counts: [2, 2, 2]
///     groups: [[0, 1], [1, 2]]
///   means:
///     - family: bernoulli
///       values: [0.75, 1.0, 0.25, 0.9]
///     - family: poisson
///       values: [0.1, 0.3, 0.2, 0.1]
///
/// The i-th means entry belongs to group i and lists its local arms in
/// mixed-radix order (first member most significant).
Environment load_table_env(const std::filesystem::path& path);
Environment parse_table_env(std::string_view yaml_text, std::string name = "table");

/// One independent reward per group, drawn in ascending group order.
std::vector<double> sample_rewards(const Environment& env, const JointAssignment& a,
                                   RandomStream& rng);

/// μ* − μ_a, never negative.
double pseudo_regret(const Environment& env, const JointAssignment& a);

}  // namespace mats
