#include "mats/elimination.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace mats {

namespace {

using Real = long double;

struct Factor {
  std::vector<std::size_t> scope;
  // Row-major strides over the full arm counts of scope, last member fastest.
  std::vector<std::size_t> strides;
  std::size_t offset = 0;
};

std::vector<std::size_t> strides_for(const Hypergraph& h, const std::vector<std::size_t>& scope) {
  std::vector<std::size_t> strides(scope.size());
  std::size_t s = 1;
  for (std::size_t k = scope.size(); k-- > 0;) {
    strides[k] = s;
    s *= h.arm_count(scope[k]);
  }
  return strides;
}

std::size_t table_size(const Hypergraph& h, const std::vector<std::size_t>& scope) {
  std::size_t n = 1;
  for (auto agent : scope) n *= h.arm_count(agent);
  return n;
}

void check_scores(const Hypergraph& h, std::span<const double> scores) {
  if (scores.size() != h.local_arm_count()) {
    throw ScoreSizeError("score vector has " + std::to_string(scores.size()) +
                         " entries, hypergraph has " + std::to_string(h.local_arm_count()) +
                         " local arms");
  }
}

void check_domain(const Hypergraph& h, const ArmDomain& domain) {
  if (domain.size() != h.num_agents()) {
    throw std::invalid_argument("arm domain covers " + std::to_string(domain.size()) +
                                " agents, expected " + std::to_string(h.num_agents()));
  }
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const auto& arms = domain[i];
    if (arms.empty()) {
      throw std::invalid_argument("empty arm domain for agent " + std::to_string(i));
    }
    for (std::size_t k = 0; k < arms.size(); ++k) {
      if (arms[k] >= h.arm_count(i) || (k > 0 && arms[k] <= arms[k - 1])) {
        throw std::invalid_argument("arm domain of agent " + std::to_string(i) +
                                    " must be ascending and within range");
      }
    }
  }
}

ArmDomain full_domain(const Hypergraph& h) {
  ArmDomain d(h.num_agents());
  for (std::size_t i = 0; i < h.num_agents(); ++i) {
    d[i].resize(h.arm_count(i));
    for (std::size_t a = 0; a < d[i].size(); ++a) d[i][a] = a;
  }
  return d;
}

}  // namespace

struct Maximizer::Plan {
  struct Step {
    std::size_t agent = 0;
    std::vector<std::size_t> context;
    std::vector<std::size_t> context_strides;
    std::vector<Arm> arms;
    std::size_t merged = 0;
    // Context-table index of every visited context, in visiting order.
    std::vector<std::size_t> cells;
    // For each cell, for each arm, the scratch offsets of the merged entries.
    std::vector<std::size_t> reads;
    std::size_t out_offset = 0;
    std::size_t best_offset = 0;
  };

  std::vector<Step> steps;
  std::vector<std::size_t> scalar_offsets;
  std::size_t scratch_size = 0;
  std::size_t arm_scratch_size = 0;
  std::uint64_t ops = 0;

  Plan(const Hypergraph& h, const ArmDomain& domain) {
    const std::size_t m = h.num_agents();
    std::vector<Factor> live;
    for (std::size_t e = 0; e < h.num_groups(); ++e) {
      Factor f;
      const auto members = h.group(e);
      f.scope.assign(members.begin(), members.end());
      f.strides = strides_for(h, f.scope);
      f.offset = h.local_offset(e);
      live.push_back(std::move(f));
    }
    std::size_t next = h.local_arm_count();

    for (std::size_t agent = m; agent-- > 0;) {
      std::vector<Factor> merged;
      std::vector<Factor> rest;
      for (auto& f : live) {
        if (std::find(f.scope.begin(), f.scope.end(), agent) != f.scope.end()) {
          merged.push_back(std::move(f));
        } else {
          rest.push_back(std::move(f));
        }
      }
      live = std::move(rest);

      Step step;
      step.agent = agent;
      step.arms = domain[agent];
      step.merged = merged.size();
      for (const auto& f : merged) {
        for (auto other : f.scope) {
          if (other != agent) step.context.push_back(other);
        }
      }
      std::sort(step.context.begin(), step.context.end());
      step.context.erase(std::unique(step.context.begin(), step.context.end()),
                         step.context.end());
      step.context_strides = strides_for(h, step.context);
      const std::size_t ctx_size = table_size(h, step.context);
      step.out_offset = next;
      next += ctx_size;
      step.best_offset = arm_scratch_size;
      arm_scratch_size += ctx_size;

      // Position k < n_ctx is context agent k; position n_ctx is the
      // eliminated agent.
      const std::size_t n_ctx = step.context.size();
      std::vector<std::vector<std::size_t>> stride_in(merged.size(),
                                                      std::vector<std::size_t>(n_ctx + 1, 0));
      for (std::size_t fi = 0; fi < merged.size(); ++fi) {
        const auto& f = merged[fi];
        for (std::size_t k = 0; k < f.scope.size(); ++k) {
          if (f.scope[k] == agent) {
            stride_in[fi][n_ctx] = f.strides[k];
          } else {
            const auto it = std::lower_bound(step.context.begin(), step.context.end(), f.scope[k]);
            stride_in[fi][static_cast<std::size_t>(it - step.context.begin())] = f.strides[k];
          }
        }
      }

      std::vector<std::size_t> pos(n_ctx, 0);
      while (true) {
        std::size_t ctx_index = 0;
        std::vector<std::size_t> base(merged.size());
        for (std::size_t fi = 0; fi < merged.size(); ++fi) base[fi] = merged[fi].offset;
        for (std::size_t k = 0; k < n_ctx; ++k) {
          const Arm arm = domain[step.context[k]][pos[k]];
          ctx_index += arm * step.context_strides[k];
          for (std::size_t fi = 0; fi < merged.size(); ++fi) base[fi] += arm * stride_in[fi][k];
        }
        step.cells.push_back(ctx_index);
        for (const Arm arm : step.arms) {
          for (std::size_t fi = 0; fi < merged.size(); ++fi) {
            step.reads.push_back(base[fi] + arm * stride_in[fi][n_ctx]);
          }
        }
        std::size_t k = n_ctx;
        while (k-- > 0) {
          if (++pos[k] < domain[step.context[k]].size()) break;
          pos[k] = 0;
        }
        if (k == static_cast<std::size_t>(-1)) break;
      }
      ops += step.reads.size();

      if (!merged.empty()) {
        Factor reduced;
        reduced.scope = step.context;
        reduced.strides = step.context_strides;
        reduced.offset = step.out_offset;
        live.push_back(std::move(reduced));
      }
      steps.push_back(std::move(step));
    }
    for (const auto& f : live) scalar_offsets.push_back(f.offset);
    scratch_size = next;
  }

  // Runs on scratch whose first A_loc entries hold the scores.
  EliminationResult run(const Hypergraph& h, std::vector<long double>& buf,
                        std::vector<Arm>& best) const {
    for (const auto& step : steps) {
      const std::size_t* r = step.reads.data();
      for (const std::size_t ctx_index : step.cells) {
        Real top = -std::numeric_limits<Real>::infinity();
        Arm top_arm = step.arms.front();
        for (const Arm arm : step.arms) {
          Real v = 0;
          for (std::size_t f = 0; f < step.merged; ++f) v += buf[*r++];
          if (v > top) {
            top = v;
            top_arm = arm;
          }
        }
        buf[step.out_offset + ctx_index] = top;
        best[step.best_offset + ctx_index] = top_arm;
      }
    }

    Real value = 0;
    for (auto off : scalar_offsets) value += buf[off];

    EliminationResult result;
    result.argmax.arms.assign(h.num_agents(), 0);
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
      std::size_t ctx_index = 0;
      for (std::size_t k = 0; k < it->context.size(); ++k) {
        ctx_index += result.argmax.arms[it->context[k]] * it->context_strides[k];
      }
      result.argmax.arms[it->agent] = best[it->best_offset + ctx_index];
    }
    result.value = static_cast<double>(value);
    result.op_count = ops;
    return result;
  }
};

Maximizer::Maximizer(const Hypergraph& h, const ActionSpace& space) : graph_(&h) {
  if (space.is_full()) {
    plans_.emplace_back(h, full_domain(h));
  } else {
    for (const auto& box : space.boxes()) {
      check_domain(h, box);
      plans_.emplace_back(h, box);
    }
  }
}

Maximizer::~Maximizer() = default;
Maximizer::Maximizer(Maximizer&&) noexcept = default;
Maximizer& Maximizer::operator=(Maximizer&&) noexcept = default;

std::uint64_t Maximizer::op_count() const noexcept {
  std::uint64_t ops = 0;
  for (const auto& p : plans_) ops += p.ops;
  return ops;
}

EliminationResult Maximizer::argmax(std::span<const double> scores) {
  const auto& h = *graph_;
  check_scores(h, scores);
  std::size_t buf_size = 0;
  std::size_t arm_size = 0;
  for (const auto& p : plans_) {
    buf_size = std::max(buf_size, p.scratch_size);
    arm_size = std::max(arm_size, p.arm_scratch_size);
  }
  scratch_.resize(buf_size);
  best_arms_.resize(arm_size);
  std::copy(scores.begin(), scores.end(), scratch_.begin());

  if (plans_.size() == 1) return plans_.front().run(h, scratch_, best_arms_);

  EliminationResult best;
  std::uint64_t best_index = 0;
  std::uint64_t ops = 0;
  bool have = false;
  for (const auto& p : plans_) {
    auto r = p.run(h, scratch_, best_arms_);
    ops += r.op_count;
    const auto index = h.joint_index(r.argmax);
    if (!have || r.value > best.value || (r.value == best.value && index < best_index)) {
      best = std::move(r);
      best_index = index;
      have = true;
    }
  }
  best.op_count = ops;
  return best;
}

double joint_score(const Hypergraph& h, std::span<const double> scores, const JointAssignment& a) {
  check_scores(h, scores);
  h.check(a);
  Real sum = 0;
  for (std::size_t e = 0; e < h.num_groups(); ++e) {
    sum += scores[h.local_offset(e) + h.within_group_unchecked(a, e)];
  }
  return static_cast<double>(sum);
}

EliminationResult ve_argmax(const Hypergraph& h, std::span<const double> scores) {
  check_scores(h, scores);
  return Maximizer(h).argmax(scores);
}

EliminationResult ve_argmax(const Hypergraph& h, std::span<const double> scores,
                            const ArmDomain& domain) {
  check_scores(h, scores);
  check_domain(h, domain);
  return Maximizer(h, ActionSpace::from_boxes(h, {domain})).argmax(scores);
}

EliminationResult brute_argmax(const Hypergraph& h, std::span<const double> scores,
                               std::uint64_t cap) {
  return brute_argmax_over(h, scores, ActionSpace::full(), cap);
}

ActionSpace ActionSpace::from_boxes(const Hypergraph& h, std::vector<ArmDomain> boxes) {
  ActionSpace space;
  space.restricted_ = true;
  for (auto& box : boxes) {
    check_domain(h, box);
    space.boxes_.push_back(std::move(box));
  }
  if (space.boxes_.empty()) throw std::invalid_argument("action space has no admissible arms");
  return space;
}

ActionSpace ActionSpace::from_candidates(const Hypergraph& h,
                                         const std::vector<JointAssignment>& candidates) {
  std::vector<ArmDomain> boxes;
  boxes.reserve(candidates.size());
  for (const auto& a : candidates) {
    h.check(a);
    ArmDomain box(a.arms.size());
    for (std::size_t i = 0; i < a.arms.size(); ++i) box[i] = {a.arms[i]};
    boxes.push_back(std::move(box));
  }
  return from_boxes(h, std::move(boxes));
}

std::uint64_t ActionSpace::size(const Hypergraph& h) const {
  if (!restricted_) return h.joint_arm_count();
  std::uint64_t total = 0;
  for (const auto& box : boxes_) {
    std::uint64_t n = 1;
    for (const auto& arms : box) {
      if (n > std::numeric_limits<std::uint64_t>::max() / arms.size()) {
        throw GraphError(GraphErrc::joint_space_overflow, "action space box");
      }
      n *= arms.size();
    }
    total += n;
  }
  return total;
}

bool ActionSpace::contains(const JointAssignment& a) const {
  if (!restricted_) return true;
  return std::any_of(boxes_.begin(), boxes_.end(), [&](const ArmDomain& box) {
    if (box.size() != a.arms.size()) return false;
    for (std::size_t i = 0; i < box.size(); ++i) {
      if (!std::binary_search(box[i].begin(), box[i].end(), a.arms[i])) return false;
    }
    return true;
  });
}

EliminationResult argmax_over(const Hypergraph& h, std::span<const double> scores,
                              const ActionSpace& space) {
  return Maximizer(h, space).argmax(scores);
}

EliminationResult brute_argmax_over(const Hypergraph& h, std::span<const double> scores,
                                    const ActionSpace& space, std::uint64_t cap) {
  check_scores(h, scores);
  const auto total = space.size(h);
  if (total > cap) {
    throw OracleCapError("joint space of " + std::to_string(total) +
                         " arms exceeds oracle cap " + std::to_string(cap));
  }
  EliminationResult best;
  std::uint64_t best_index = 0;
  bool have = false;
  space.for_each(h, [&](const JointAssignment& a) {
    const double v = joint_score(h, scores, a);
    best.op_count += h.num_groups();
    if (!have || v > best.value) {
      best.argmax = a;
      best.value = v;
      best_index = h.joint_index(a);
      have = true;
    } else if (v == best.value) {
      const auto index = h.joint_index(a);
      if (index < best_index) {
        best.argmax = a;
        best_index = index;
      }
    }
  });
  return best;
}

}  // namespace mats
