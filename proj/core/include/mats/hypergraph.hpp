#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mats {

/// Individual arm chosen by one agent.
using Arm = std::size_t;

/// One chosen arm per agent. Agent 0 is the most significant digit of the
/// mixed-radix joint index.
struct JointAssignment {
  std::vector<Arm> arms;

  friend bool operator==(const JointAssignment&, const JointAssignment&) = default;
};

/// Position of a local arm both inside its group and in the flat local-arm
/// space shared by all groups.
struct LocalArmIndex {
  std::size_t group = 0;
  std::size_t within_group = 0;
  std::size_t flat = 0;

  friend bool operator==(const LocalArmIndex&, const LocalArmIndex&) = default;
};

enum class GraphErrc {
  no_agents,
  zero_arm_count,
  arm_count_size_mismatch,
  empty_group,
  duplicate_agent,
  agent_out_of_range,
  agent_in_no_group,
  group_out_of_range,
  assignment_mismatch,
  joint_space_overflow,
};

const char* to_string(GraphErrc code) noexcept;

class GraphError : public std::invalid_argument {
 public:
  GraphError(GraphErrc code, const std::string& detail);

  GraphErrc code() const noexcept { return code_; }

 private:
  GraphErrc code_;
};

/// Coordination hypergraph: agents are vertices, groups are hyperedges.
///
/// Each group owns a contiguous block of the flat local-arm space. Inside a
/// block the local arm (a_{i_1}, ..., a_{i_d}) of a group with members
/// (i_1, ..., i_d) is encoded in mixed radix with i_1 most significant.
/// Immutable after construction.
class Hypergraph {
 public:
  Hypergraph(std::vector<std::size_t> arm_counts, std::vector<std::vector<std::size_t>> groups);

  std::size_t num_agents() const noexcept { return arm_counts_.size(); }
  std::size_t num_groups() const noexcept { return groups_.size(); }
  std::size_t arm_count(std::size_t agent) const { return arm_counts_.at(agent); }
  const std::vector<std::size_t>& arm_counts() const noexcept { return arm_counts_; }
  std::span<const std::size_t> group(std::size_t e) const;
  const std::vector<std::vector<std::size_t>>& groups() const noexcept { return groups_; }

  /// Number of local arms of group e, the product of its members' arm counts.
  std::size_t group_size(std::size_t e) const;
  std::size_t local_offset(std::size_t e) const;
  std::size_t local_arm_count() const noexcept { return local_arm_count_; }

  /// Groups each agent belongs to, ascending.
  std::span<const std::size_t> groups_of(std::size_t agent) const;

  /// Π_i arm_counts[i]; throws joint_space_overflow if it does not fit.
  std::uint64_t joint_arm_count() const;

  LocalArmIndex project_local(const JointAssignment& a, std::size_t e) const;

  /// Within-group index of group e; a and e must already be valid.
  std::size_t within_group_unchecked(const JointAssignment& a, std::size_t e) const noexcept {
    std::size_t within = 0;
    for (auto agent : groups_[e]) within = within * arm_counts_[agent] + a.arms[agent];
    return within;
  }

  /// Group-order tuple of individual arms for a within-group index.
  std::vector<Arm> decode_local(std::size_t e, std::size_t within_group) const;
  /// Group and within-group position of a flat local-arm index.
  LocalArmIndex locate(std::size_t flat) const;

  bool is_valid(const JointAssignment& a) const noexcept;
  void check(const JointAssignment& a) const;

  /// Mixed-radix joint index with agent 0 most significant.
  std::uint64_t joint_index(const JointAssignment& a) const;
  JointAssignment joint_from_index(std::uint64_t index) const;

 private:
  std::vector<std::size_t> arm_counts_;
  std::vector<std::vector<std::size_t>> groups_;
  std::vector<std::size_t> group_sizes_;
  std::vector<std::size_t> local_offsets_;
  std::vector<std::vector<std::size_t>> agent_groups_;
  std::size_t local_arm_count_ = 0;
};

Hypergraph build_hypergraph(std::size_t num_agents, std::vector<std::size_t> arm_counts,
                            std::vector<std::vector<std::size_t>> groups);

inline std::size_t local_arm_count(const Hypergraph& h) { return h.local_arm_count(); }

inline LocalArmIndex project_local(const Hypergraph& h, const JointAssignment& a, std::size_t e) {
  return h.project_local(a, e);
}

/// Every joint assignment in mixed-radix order. Exponential; oracle use only.
std::vector<JointAssignment> enumerate_joint(const Hypergraph& h);

/// Calls fn(assignment) for every joint assignment in mixed-radix order
/// without materializing the whole list.
template <typename Fn>
void for_each_joint(const Hypergraph& h, Fn&& fn) {
  const auto total = h.joint_arm_count();
  JointAssignment a{std::vector<Arm>(h.num_agents(), 0)};
  for (std::uint64_t k = 0; k < total; ++k) {
    fn(static_cast<const JointAssignment&>(a));
    for (std::size_t i = h.num_agents(); i-- > 0;) {
      if (++a.arms[i] < h.arm_count(i)) break;
      a.arms[i] = 0;
    }
  }
}

/// Chain of consecutive agents {e, ..., e+d-1} for e = 0..m-d.
std::vector<std::vector<std::size_t>> chain_groups(std::size_t num_agents, std::size_t group_size);

}  // namespace mats
