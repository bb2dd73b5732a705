#include "mats/hypergraph.hpp"

#include <limits>
#include <sstream>

namespace mats {

const char* to_string(GraphErrc code) noexcept {
  switch (code) {
    case GraphErrc::no_agents: return "no agents";
    case GraphErrc::zero_arm_count: return "zero arm count";
    case GraphErrc::arm_count_size_mismatch: return "arm count list length mismatch";
    case GraphErrc::empty_group: return "empty group";
    case GraphErrc::duplicate_agent: return "duplicate agent in group";
    case GraphErrc::agent_out_of_range: return "agent index out of range";
    case GraphErrc::agent_in_no_group: return "agent belongs to no group";
    case GraphErrc::group_out_of_range: return "group index out of range";
    case GraphErrc::assignment_mismatch: return "invalid joint assignment";
    case GraphErrc::joint_space_overflow: return "joint arm count overflows";
  }
  return "unknown graph error";
}

GraphError::GraphError(GraphErrc code, const std::string& detail)
    : std::invalid_argument(std::string(to_string(code)) + (detail.empty() ? "" : ": " + detail)),
      code_(code) {}

namespace {

std::size_t checked_mul(std::size_t a, std::size_t b) {
  if (b != 0 && a > std::numeric_limits<std::size_t>::max() / b) {
    throw GraphError(GraphErrc::joint_space_overflow, "local arm space too large");
  }
  return a * b;
}

}  // namespace

Hypergraph::Hypergraph(std::vector<std::size_t> arm_counts,
                       std::vector<std::vector<std::size_t>> groups)
    : arm_counts_(std::move(arm_counts)), groups_(std::move(groups)) {
  const std::size_t m = arm_counts_.size();
  if (m == 0) throw GraphError(GraphErrc::no_agents, "");
  for (std::size_t i = 0; i < m; ++i) {
    if (arm_counts_[i] == 0) {
      throw GraphError(GraphErrc::zero_arm_count, "agent " + std::to_string(i));
    }
  }

  agent_groups_.assign(m, {});
  group_sizes_.reserve(groups_.size());
  local_offsets_.reserve(groups_.size());
  for (std::size_t e = 0; e < groups_.size(); ++e) {
    const auto& members = groups_[e];
    if (members.empty()) throw GraphError(GraphErrc::empty_group, "group " + std::to_string(e));
    std::size_t size = 1;
    for (std::size_t k = 0; k < members.size(); ++k) {
      const std::size_t agent = members[k];
      if (agent >= m) {
        throw GraphError(GraphErrc::agent_out_of_range,
                         "agent " + std::to_string(agent) + " in group " + std::to_string(e));
      }
      for (std::size_t j = 0; j < k; ++j) {
        if (members[j] == agent) {
          throw GraphError(GraphErrc::duplicate_agent,
                           "agent " + std::to_string(agent) + " in group " + std::to_string(e));
        }
      }
      agent_groups_[agent].push_back(e);
      size = checked_mul(size, arm_counts_[agent]);
    }
    local_offsets_.push_back(local_arm_count_);
    group_sizes_.push_back(size);
    if (local_arm_count_ > std::numeric_limits<std::size_t>::max() - size) {
      throw GraphError(GraphErrc::joint_space_overflow, "local arm space too large");
    }
    local_arm_count_ += size;
  }

  for (std::size_t i = 0; i < m; ++i) {
    if (agent_groups_[i].empty()) {
      throw GraphError(GraphErrc::agent_in_no_group, "agent " + std::to_string(i));
    }
  }
}

std::span<const std::size_t> Hypergraph::group(std::size_t e) const {
  if (e >= groups_.size()) throw GraphError(GraphErrc::group_out_of_range, std::to_string(e));
  return groups_[e];
}

std::size_t Hypergraph::group_size(std::size_t e) const {
  if (e >= groups_.size()) throw GraphError(GraphErrc::group_out_of_range, std::to_string(e));
  return group_sizes_[e];
}

std::size_t Hypergraph::local_offset(std::size_t e) const {
  if (e >= groups_.size()) throw GraphError(GraphErrc::group_out_of_range, std::to_string(e));
  return local_offsets_[e];
}

std::span<const std::size_t> Hypergraph::groups_of(std::size_t agent) const {
  return agent_groups_.at(agent);
}

std::uint64_t Hypergraph::joint_arm_count() const {
  std::uint64_t total = 1;
  for (auto k : arm_counts_) {
    if (total > std::numeric_limits<std::uint64_t>::max() / k) {
      throw GraphError(GraphErrc::joint_space_overflow,
                       "product of " + std::to_string(num_agents()) + " arm counts");
    }
    total *= k;
  }
  return total;
}

LocalArmIndex Hypergraph::project_local(const JointAssignment& a, std::size_t e) const {
  if (e >= groups_.size()) throw GraphError(GraphErrc::group_out_of_range, std::to_string(e));
  check(a);
  std::size_t within = 0;
  for (auto agent : groups_[e]) within = within * arm_counts_[agent] + a.arms[agent];
  return {e, within, local_offsets_[e] + within};
}

std::vector<Arm> Hypergraph::decode_local(std::size_t e, std::size_t within_group) const {
  const auto members = group(e);
  if (within_group >= group_sizes_[e]) {
    throw std::out_of_range("local arm " + std::to_string(within_group) + " of group " +
                            std::to_string(e));
  }
  std::vector<Arm> tuple(members.size());
  for (std::size_t k = members.size(); k-- > 0;) {
    const auto radix = arm_counts_[members[k]];
    tuple[k] = within_group % radix;
    within_group /= radix;
  }
  return tuple;
}

LocalArmIndex Hypergraph::locate(std::size_t flat) const {
  if (flat >= local_arm_count_) throw std::out_of_range("flat local arm " + std::to_string(flat));
  // Offsets are sorted; groups are few, a linear scan is fine.
  std::size_t e = groups_.size() - 1;
  while (local_offsets_[e] > flat) --e;
  return {e, flat - local_offsets_[e], flat};
}

bool Hypergraph::is_valid(const JointAssignment& a) const noexcept {
  if (a.arms.size() != arm_counts_.size()) return false;
  for (std::size_t i = 0; i < a.arms.size(); ++i) {
    if (a.arms[i] >= arm_counts_[i]) return false;
  }
  return true;
}

void Hypergraph::check(const JointAssignment& a) const {
  if (is_valid(a)) return;
  std::ostringstream os;
  os << "expected " << num_agents() << " arms within range, got (";
  for (std::size_t i = 0; i < a.arms.size(); ++i) os << (i ? "," : "") << a.arms[i];
  os << ")";
  throw GraphError(GraphErrc::assignment_mismatch, os.str());
}

std::uint64_t Hypergraph::joint_index(const JointAssignment& a) const {
  check(a);
  joint_arm_count();
  std::uint64_t index = 0;
  for (std::size_t i = 0; i < a.arms.size(); ++i) index = index * arm_counts_[i] + a.arms[i];
  return index;
}

JointAssignment Hypergraph::joint_from_index(std::uint64_t index) const {
  if (index >= joint_arm_count()) throw std::out_of_range("joint index " + std::to_string(index));
  JointAssignment a{std::vector<Arm>(num_agents())};
  for (std::size_t i = num_agents(); i-- > 0;) {
    a.arms[i] = index % arm_counts_[i];
    index /= arm_counts_[i];
  }
  return a;
}

Hypergraph build_hypergraph(std::size_t num_agents, std::vector<std::size_t> arm_counts,
                            std::vector<std::vector<std::size_t>> groups) {
  if (num_agents == 0) throw GraphError(GraphErrc::no_agents, "");
  if (arm_counts.size() != num_agents) {
    throw GraphError(GraphErrc::arm_count_size_mismatch,
                     std::to_string(arm_counts.size()) + " counts for " +
                         std::to_string(num_agents) + " agents");
  }
  return Hypergraph(std::move(arm_counts), std::move(groups));
}

std::vector<JointAssignment> enumerate_joint(const Hypergraph& h) {
  std::vector<JointAssignment> out;
  out.reserve(static_cast<std::size_t>(h.joint_arm_count()));
  for_each_joint(h, [&](const JointAssignment& a) { out.push_back(a); });
  return out;
}

std::vector<std::vector<std::size_t>> chain_groups(std::size_t num_agents, std::size_t group_size) {
  if (group_size == 0 || num_agents < group_size) {
    throw std::invalid_argument("chain needs at least " + std::to_string(group_size) + " agents");
  }
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t e = 0; e + group_size <= num_agents; ++e) {
    std::vector<std::size_t> g(group_size);
    for (std::size_t k = 0; k < group_size; ++k) g[k] = e + k;
    groups.push_back(std::move(g));
  }
  return groups;
}

}  // namespace mats
