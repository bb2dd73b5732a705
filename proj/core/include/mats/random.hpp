#pragma once

#include <cstdint>
#include <random>

namespace mats {

/// The single random stream owned by one trial. Every stochastic draw of a
/// trial (policy gates, posterior samples, rewards) comes from here in a
/// fixed program order, so a seed fully determines the trial.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return unit_(engine_); }
  double normal(double mean, double stddev) {
    return normal_(engine_, std::normal_distribution<double>::param_type(mean, stddev));
  }
  bool bernoulli(double p) { return uniform() < p; }
  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    return std::poisson_distribution<std::uint64_t>(mean)(engine_);
  }
  /// Uniform integer on [lo, hi].
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(engine_);
  }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_;
};

}  // namespace mats
