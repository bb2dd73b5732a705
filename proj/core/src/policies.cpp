#include "mats/policies.hpp"

#include <cmath>

namespace mats {

std::string_view to_string(PolicyKind kind) noexcept {
  switch (kind) {
    case PolicyKind::eps_mats: return "eps_mats";
    case PolicyKind::ucb_baseline: return "ucb_baseline";
    case PolicyKind::random: return "random";
  }
  return "unknown";
}

std::string_view to_string(ExplorationGate gate) noexcept {
  return gate == ExplorationGate::per_round ? "per_round" : "per_arm";
}

ExplorationGate parse_exploration_gate(std::string_view name) {
  if (name == "per_round") return ExplorationGate::per_round;
  if (name == "per_arm") return ExplorationGate::per_arm;
  throw ConfigError("unknown exploration gate '" + std::string(name) + "'");
}

PolicyKind parse_policy_kind(std::string_view name) {
  if (name == "eps_mats") return PolicyKind::eps_mats;
  if (name == "ucb_baseline") return PolicyKind::ucb_baseline;
  if (name == "random") return PolicyKind::random;
  throw ConfigError("unknown policy '" + std::string(name) + "'");
}

void PolicyConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw ConfigError("epsilon must lie in (0,1], got " + std::to_string(epsilon));
  }
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw ConfigError("c must be positive, got " + std::to_string(c));
  }
  if (!(ucb_range > 0.0) || !std::isfinite(ucb_range)) {
    throw ConfigError("ucb_range must be positive, got " + std::to_string(ucb_range));
  }
}

ScoreVector sample_scores(const LocalArmStats& stats, const PolicyConfig& cfg, RandomStream& rng,
                          WorkCounters& work) {
  ScoreVector theta(stats.mu_hat);
  auto posterior = [&](std::size_t j) {
    const double var = cfg.c / (static_cast<double>(stats.n[j]) + 1.0);
    theta[j] = rng.normal(stats.mu_hat[j], std::sqrt(var));
    ++work.gaussian_draws;
  };
  if (cfg.gate == ExplorationGate::per_round) {
    if (rng.uniform() < cfg.epsilon) {
      for (std::size_t j = 0; j < stats.size(); ++j) posterior(j);
    }
  } else {
    for (std::size_t j = 0; j < stats.size(); ++j) {
      if (rng.uniform() < cfg.epsilon) posterior(j);
    }
  }
  return theta;
}

ScoreVector ucb_scores(const LocalArmStats& stats, std::uint64_t t, const PolicyConfig& cfg) {
  const double log_term =
      std::log(static_cast<double>(t) * static_cast<double>(stats.size()));
  ScoreVector score(stats.size());
  for (std::size_t j = 0; j < stats.size(); ++j) {
    const double bonus = std::sqrt(log_term / (2.0 * (static_cast<double>(stats.n[j]) + 1.0)));
    score[j] = stats.mu_hat[j] + cfg.ucb_range * bonus;
  }
  return score;
}

JointAssignment random_arm(const Hypergraph& h, const ActionSpace& space, RandomStream& rng) {
  JointAssignment a{std::vector<Arm>(h.num_agents())};
  if (space.is_full()) {
    for (std::size_t i = 0; i < h.num_agents(); ++i) {
      a.arms[i] = static_cast<Arm>(rng.uniform_int(0, h.arm_count(i) - 1));
    }
    return a;
  }
  const auto& boxes = space.boxes();
  std::vector<std::uint64_t> sizes(boxes.size(), 1);
  std::uint64_t total = 0;
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    for (const auto& arms : boxes[b]) sizes[b] *= arms.size();
    total += sizes[b];
  }
  auto pick = rng.uniform_int(0, total - 1);
  std::size_t b = 0;
  while (pick >= sizes[b]) pick -= sizes[b++];
  for (std::size_t i = 0; i < h.num_agents(); ++i) {
    const auto& arms = boxes[b][i];
    a.arms[i] = arms[rng.uniform_int(0, arms.size() - 1)];
  }
  return a;
}

JointAssignment select_arm(const Hypergraph& h, const LocalArmStats& stats,
                           const PolicyConfig& cfg, std::uint64_t t, RandomStream& rng,
                           WorkCounters& work, Maximizer& maximizer, const ActionSpace& space) {
  switch (cfg.kind) {
    case PolicyKind::eps_mats: {
      const auto theta = sample_scores(stats, cfg, rng, work);
      auto r = maximizer.argmax(theta);
      work.ve_ops += r.op_count;
      return std::move(r.argmax);
    }
    case PolicyKind::ucb_baseline: {
      const auto score = ucb_scores(stats, t, cfg);
      auto r = maximizer.argmax(score);
      work.ve_ops += r.op_count;
      return std::move(r.argmax);
    }
    case PolicyKind::random:
      return random_arm(h, space, rng);
  }
  throw ConfigError("unhandled policy kind");
}

JointAssignment select_arm(const Hypergraph& h, const LocalArmStats& stats,
                           const PolicyConfig& cfg, std::uint64_t t, RandomStream& rng,
                           WorkCounters& work, const ActionSpace& space) {
  Maximizer maximizer(h, space);
  return select_arm(h, stats, cfg, t, rng, work, maximizer, space);
}

void update_stats(LocalArmStats& stats, const Hypergraph& h, const JointAssignment& a,
                  std::span<const double> rewards) {
  if (rewards.size() != h.num_groups()) {
    throw std::invalid_argument("expected " + std::to_string(h.num_groups()) +
                                " group rewards, got " + std::to_string(rewards.size()));
  }
  if (stats.size() != h.local_arm_count()) {
    throw ScoreSizeError("statistics sized for " + std::to_string(stats.size()) +
                         " local arms, hypergraph has " + std::to_string(h.local_arm_count()));
  }
  h.check(a);
  for (std::size_t e = 0; e < h.num_groups(); ++e) {
    const auto j = h.local_offset(e) + h.within_group_unchecked(a, e);
    const double n = static_cast<double>(stats.n[j]);
    stats.mu_hat[j] = (n * stats.mu_hat[j] + rewards[e]) / (n + 1.0);
    ++stats.n[j];
  }
}

Policy::Policy(const Hypergraph& h, PolicyConfig cfg, ActionSpace space)
    : graph_(&h), cfg_(cfg), space_(std::move(space)), maximizer_(h, space_), stats_(h) {}

JointAssignment Policy::select(std::uint64_t t, RandomStream& rng) {
  return select_arm(*graph_, stats_, cfg_, t, rng, work_, maximizer_, space_);
}

void Policy::observe(const JointAssignment& a, std::span<const double> rewards) {
  update_stats(stats_, *graph_, a, rewards);
}

}  // namespace mats
