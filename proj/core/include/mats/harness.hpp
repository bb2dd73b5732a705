#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mats/environments.hpp"
#include "mats/policies.hpp"

namespace mats {

struct Checkpoint {
  std::uint64_t t = 0;
  double cum_regret = 0.0;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

/// Cumulative pseudo-regret of one seeded trial, sampled every log_every
/// rounds and at the horizon.
struct RegretTrace {
  std::uint64_t trial_seed = 0;
  std::vector<Checkpoint> checkpoints;
  std::uint64_t gaussian_draws = 0;
  std::uint64_t ve_ops = 0;
  std::int64_t wall_ns = 0;
  /// First round whose pulled arm was the environment's optimum.
  std::optional<std::uint64_t> first_optimal_pull;

  double final_regret() const { return checkpoints.empty() ? 0.0 : checkpoints.back().cum_regret; }
};

/// Per-checkpoint mean and sample standard deviation across trials.
struct ExperimentSummary {
  std::vector<std::uint64_t> t;
  std::vector<double> mean_cum_regret;
  std::vector<double> std_cum_regret;
  double mean_wall_ns = 0.0;
  double mean_gaussian_draws = 0.0;
  std::size_t trials = 0;

  friend bool operator==(const ExperimentSummary&, const ExperimentSummary&) = default;
};

struct ExperimentSpec {
  PolicyConfig policy;
  std::uint64_t horizon = 10000;
  std::size_t trials = 50;
  std::uint64_t base_seed = 0;
  std::uint64_t log_every = 100;
  /// Worker threads; 0 means hardware concurrency. Never changes results.
  unsigned threads = 1;
};

struct ExperimentResult {
  ExperimentSummary summary;
  std::vector<RegretTrace> traces;
};

/// Select, observe, update for T rounds on a stream seeded with `seed`.
/// Wall time covers the loop only.
RegretTrace run_trial(const Environment& env, const PolicyConfig& cfg, std::uint64_t horizon,
                      std::uint64_t seed, std::uint64_t log_every);

/// Trial i uses seed base_seed + i.
ExperimentResult run_experiment(const Environment& env, const ExperimentSpec& spec);

/// Reduces traces in the given order. All traces must share checkpoints.
ExperimentSummary summarize(const std::vector<RegretTrace>& traces);

/// Round of the first optimal pull, or nullopt if the optimum is not pulled
/// within the horizon. Stops as soon as the optimum is pulled.
std::optional<std::uint64_t> first_optimal_pull(const Environment& env, const PolicyConfig& cfg,
                                                std::uint64_t horizon, std::uint64_t seed);

}  // namespace mats
