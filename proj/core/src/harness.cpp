#include "mats/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace mats {

RegretTrace run_trial(const Environment& env, const PolicyConfig& cfg, std::uint64_t horizon,
                      std::uint64_t seed, std::uint64_t log_every) {
  if (horizon == 0) throw std::invalid_argument("horizon must be at least 1");
  if (log_every == 0) throw std::invalid_argument("log_every must be at least 1");

  RegretTrace trace;
  trace.trial_seed = seed;
  trace.checkpoints.reserve(static_cast<std::size_t>(horizon / log_every + 1));

  RandomStream rng(seed);
  Policy policy(env.graph(), cfg, env.action_space());
  double cum = 0.0;

  const auto start = std::chrono::steady_clock::now();
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    const auto arm = policy.select(t, rng);
    const auto rewards = sample_rewards(env, arm, rng);
    policy.observe(arm, rewards);
    cum += pseudo_regret(env, arm);
    if (!trace.first_optimal_pull && arm == env.optimal_arm()) trace.first_optimal_pull = t;
    if (t % log_every == 0 || t == horizon) trace.checkpoints.push_back({t, cum});
  }
  const auto stop = std::chrono::steady_clock::now();

  trace.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count();
  trace.gaussian_draws = policy.work().gaussian_draws;
  trace.ve_ops = policy.work().ve_ops;
  return trace;
}

ExperimentSummary summarize(const std::vector<RegretTrace>& traces) {
  if (traces.empty()) throw std::invalid_argument("cannot summarize zero trials");
  const auto& first = traces.front().checkpoints;
  for (const auto& tr : traces) {
    if (tr.checkpoints.size() != first.size() ||
        !std::equal(first.begin(), first.end(), tr.checkpoints.begin(),
                    [](const Checkpoint& a, const Checkpoint& b) { return a.t == b.t; })) {
      throw std::invalid_argument("traces have different checkpoints");
    }
  }

  const double n = static_cast<double>(traces.size());
  ExperimentSummary s;
  s.trials = traces.size();
  for (std::size_t k = 0; k < first.size(); ++k) {
    double sum = 0.0;
    for (const auto& tr : traces) sum += tr.checkpoints[k].cum_regret;
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& tr : traces) {
      const double d = tr.checkpoints[k].cum_regret - mean;
      ss += d * d;
    }
    s.t.push_back(first[k].t);
    s.mean_cum_regret.push_back(mean);
    s.std_cum_regret.push_back(traces.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0);
  }
  double wall = 0.0;
  double draws = 0.0;
  for (const auto& tr : traces) {
    wall += static_cast<double>(tr.wall_ns);
    draws += static_cast<double>(tr.gaussian_draws);
  }
  s.mean_wall_ns = wall / n;
  s.mean_gaussian_draws = draws / n;
  return s;
}

ExperimentResult run_experiment(const Environment& env, const ExperimentSpec& spec) {
  spec.policy.validate();
  if (spec.trials == 0) throw std::invalid_argument("trials must be at least 1");
  if (spec.horizon == 0) throw std::invalid_argument("horizon must be at least 1");
  if (spec.log_every == 0) throw std::invalid_argument("log_every must be at least 1");

  ExperimentResult result;
  result.traces.resize(spec.trials);

  unsigned workers = spec.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                       : spec.threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, spec.trials));

  auto run_one = [&](std::size_t i) {
    result.traces[i] =
        run_trial(env, spec.policy, spec.horizon, spec.base_seed + i, spec.log_every);
  };

  if (workers <= 1) {
    for (std::size_t i = 0; i < spec.trials; ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < spec.trials; i = next++) {
          try {
            run_one(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
  }

  result.summary = summarize(result.traces);
  return result;
}

std::optional<std::uint64_t> first_optimal_pull(const Environment& env, const PolicyConfig& cfg,
                                                std::uint64_t horizon, std::uint64_t seed) {
  RandomStream rng(seed);
  Policy policy(env.graph(), cfg, env.action_space());
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    const auto arm = policy.select(t, rng);
    if (arm == env.optimal_arm()) return t;
    policy.observe(arm, sample_rewards(env, arm, rng));
  }
  return std::nullopt;
}

}  // namespace mats
