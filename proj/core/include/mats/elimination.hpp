#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "mats/hypergraph.hpp"

namespace mats {

/// One score per flat local arm.
using ScoreVector = std::vector<double>;

/// Allowed arms per agent, each list ascending and duplicate-free. Describes
/// an axis-aligned box inside the joint arm space.
using ArmDomain = std::vector<std::vector<Arm>>;

struct EliminationResult {
  JointAssignment argmax;
  double value = 0.0;
  /// Factor-table entries read while maximizing.
  std::uint64_t op_count = 0;
};

class ScoreSizeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class OracleCapError : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline constexpr std::uint64_t kDefaultOracleCap = std::uint64_t{1} << 20;

/// A set of admissible joint arms given as a union of disjoint boxes. The
/// default-constructed space is the full product of all agents' arm sets.
class ActionSpace {
 public:
  ActionSpace() = default;

  static ActionSpace full() { return {}; }
  static ActionSpace from_boxes(const Hypergraph& h, std::vector<ArmDomain> boxes);
  static ActionSpace from_candidates(const Hypergraph& h,
                                     const std::vector<JointAssignment>& candidates);

  bool is_full() const noexcept { return !restricted_; }
  const std::vector<ArmDomain>& boxes() const noexcept { return boxes_; }

  /// Number of admissible joint arms.
  std::uint64_t size(const Hypergraph& h) const;
  bool contains(const JointAssignment& a) const;

  /// Visits admissible joint arms box by box, each box in mixed-radix order.
  template <typename Fn>
  void for_each(const Hypergraph& h, Fn&& fn) const;

 private:
  bool restricted_ = false;
  std::vector<ArmDomain> boxes_;
};

/// Maximizes Σ_e s[a^e] over an action space by variable elimination.
///
/// Agents are eliminated from the highest index down. Eliminating agent i
/// merges every live factor that mentions i into one table over the union of
/// their scopes, maximizes out a_i for every context of the remaining agents
/// and records the maximizing arm. Back-substitution then runs from agent 0
/// upwards. Candidate arms are scanned in ascending order with a strict
/// comparison, so among equal-valued joint arms the one with the smallest
/// mixed-radix index wins. Restricted spaces are handled box by box and the
/// boxes compared by value, then by joint index.
///
/// The elimination schedule depends only on the graph and the space, so it
/// is compiled once here and reused for every score vector. On chains every
/// merged table has the size of one group, which keeps op_count linear in
/// the number of local arms; overlapping groups can create wider tables.
///
/// Not thread-safe: argmax() reuses internal scratch space.
class Maximizer {
 public:
  explicit Maximizer(const Hypergraph& h, const ActionSpace& space = {});
  ~Maximizer();
  Maximizer(Maximizer&&) noexcept;
  Maximizer& operator=(Maximizer&&) noexcept;

  EliminationResult argmax(std::span<const double> scores);

  /// Entries read by one argmax() call; identical for every score vector.
  std::uint64_t op_count() const noexcept;

 private:
  struct Plan;
  const Hypergraph* graph_;
  std::vector<Plan> plans_;
  std::vector<long double> scratch_;
  std::vector<Arm> best_arms_;
};

EliminationResult ve_argmax(const Hypergraph& h, std::span<const double> scores);

/// Same as above with agent i restricted to domain[i].
EliminationResult ve_argmax(const Hypergraph& h, std::span<const double> scores,
                            const ArmDomain& domain);

/// Exhaustive search over all joint arms; the verification oracle.
EliminationResult brute_argmax(const Hypergraph& h, std::span<const double> scores,
                               std::uint64_t cap = kDefaultOracleCap);

/// Variable elimination over an arbitrary action space.
EliminationResult argmax_over(const Hypergraph& h, std::span<const double> scores,
                              const ActionSpace& space);

/// Enumeration oracle over the same space.
EliminationResult brute_argmax_over(const Hypergraph& h, std::span<const double> scores,
                                    const ActionSpace& space,
                                    std::uint64_t cap = kDefaultOracleCap);

/// Σ_e s[project_local(a, e)] accumulated in group order.
double joint_score(const Hypergraph& h, std::span<const double> scores, const JointAssignment& a);

template <typename Fn>
void ActionSpace::for_each(const Hypergraph& h, Fn&& fn) const {
  if (!restricted_) {
    for_each_joint(h, fn);
    return;
  }
  const std::size_t m = h.num_agents();
  for (const auto& box : boxes_) {
    std::vector<std::size_t> pos(m, 0);
    JointAssignment a{std::vector<Arm>(m)};
    for (std::size_t i = 0; i < m; ++i) a.arms[i] = box[i][0];
    while (true) {
      fn(static_cast<const JointAssignment&>(a));
      std::size_t i = m;
      while (i-- > 0) {
        if (++pos[i] < box[i].size()) {
          a.arms[i] = box[i][pos[i]];
          break;
        }
        pos[i] = 0;
        a.arms[i] = box[i][0];
      }
      if (i == static_cast<std::size_t>(-1)) break;
    }
  }
}

}  // namespace mats
