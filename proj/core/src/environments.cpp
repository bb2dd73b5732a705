#include "mats/environments.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace mats {

std::string_view to_string(RewardFamily family) noexcept {
  switch (family) {
    case RewardFamily::bernoulli: return "bernoulli";
    case RewardFamily::poisson: return "poisson";
    case RewardFamily::gaussian: return "gaussian";
  }
  return "unknown";
}

RewardFamily parse_reward_family(std::string_view name) {
  if (name == "bernoulli") return RewardFamily::bernoulli;
  if (name == "poisson") return RewardFamily::poisson;
  if (name == "gaussian") return RewardFamily::gaussian;
  throw EnvironmentError("unknown reward family '" + std::string(name) + "'");
}

Environment::Environment(std::string name, Hypergraph graph, std::vector<double> means,
                         std::vector<RewardFamily> families, ActionSpace space)
    : name_(std::move(name)),
      graph_(std::move(graph)),
      means_(std::move(means)),
      families_(std::move(families)),
      space_(std::move(space)) {
  if (means_.size() != graph_.local_arm_count()) {
    throw EnvironmentError(name_ + ": " + std::to_string(means_.size()) + " means for " +
                           std::to_string(graph_.local_arm_count()) + " local arms");
  }
  if (families_.size() != graph_.num_groups()) {
    throw EnvironmentError(name_ + ": " + std::to_string(families_.size()) +
                           " reward families for " + std::to_string(graph_.num_groups()) +
                           " groups");
  }
  for (std::size_t j = 0; j < means_.size(); ++j) {
    const double mu = means_[j];
    const auto family = families_[graph_.locate(j).group];
    const bool ok = std::isfinite(mu) && (family != RewardFamily::bernoulli || (mu >= 0 && mu <= 1)) &&
                    (family != RewardFamily::poisson || mu >= 0);
    if (!ok) {
      throw EnvironmentError(name_ + ": mean " + std::to_string(mu) + " of local arm " +
                             std::to_string(j) + " is invalid for a " +
                             std::string(to_string(family)) + " reward");
    }
  }
  optimal_arm_ = argmax_over(graph_, means_, space_).argmax;
  optimal_value_ = mean_reward(optimal_arm_);
}

double Environment::mean_reward(const JointAssignment& a) const {
  return joint_score(graph_, means_, a);
}

namespace {

constexpr std::array<std::array<double, 2>, 2> kBernoulliPair{{{0.75, 1.0}, {0.25, 0.9}}};
constexpr std::array<std::array<double, 2>, 2> kPoissonPair{{{0.1, 0.3}, {0.2, 0.1}}};
// Indexed by 4·x0 + 2·x1 + x2.
constexpr std::array<double, 8> kTriple{0.5, 0.2, 0.8, 0.4, 0.9, 0.3, 0.6, 1.0};

}  // namespace

Environment chain_env(std::size_t m, std::size_t d, RewardFamily family) {
  if (d != 2 && d != 3) throw EnvironmentError("chain group size must be 2 or 3");
  if (m < d) {
    throw EnvironmentError("chain with groups of " + std::to_string(d) + " needs at least " +
                           std::to_string(d) + " agents, got " + std::to_string(m));
  }
  if (family == RewardFamily::gaussian) {
    throw EnvironmentError("chain environments are bernoulli or poisson");
  }
  Hypergraph graph(std::vector<std::size_t>(m, 2), chain_groups(m, d));
  std::vector<double> means;
  means.reserve(graph.local_arm_count());
  for (std::size_t e = 0; e < graph.num_groups(); ++e) {
    for (std::size_t local = 0; local < graph.group_size(e); ++local) {
      const auto x = graph.decode_local(e, local);
      if (d == 2) {
        const auto& table = family == RewardFamily::bernoulli ? kBernoulliPair : kPoissonPair;
        means.push_back(e % 2 == 0 ? table[x[0]][x[1]] : table[x[1]][x[0]]);
      } else {
        const std::size_t r = e % 3;
        const std::size_t key = 4 * x[r] + 2 * x[(r + 1) % 3] + x[(r + 2) % 3];
        means.push_back(kTriple[key]);
      }
    }
  }
  std::string name = std::string(to_string(family)) + "_chain(m=" + std::to_string(m) +
                     ",d=" + std::to_string(d) + ")";
  return Environment(std::move(name), std::move(graph), std::move(means),
                     std::vector<RewardFamily>(m - d + 1, family));
}

double gem_probability(unsigned workers, double p) {
  if (workers == 0) return 0.0;
  return std::min(1.0, std::pow(1.03, static_cast<double>(workers) - 1.0) * p);
}

GemMiningLayout generate_gem_mining(std::size_t num_villages, RandomStream& rng) {
  if (num_villages < 2) throw EnvironmentError("gem mining needs at least 2 villages");
  GemMiningLayout layout;
  std::size_t num_mines = 0;
  for (std::size_t i = 0; i < num_villages; ++i) {
    layout.workers.push_back(static_cast<unsigned>(rng.uniform_int(1, 5)));
    const std::size_t reach = i + 1 == num_villages ? 4 : rng.uniform_int(2, 4);
    layout.first_mine.push_back(i);
    layout.reach.push_back(reach);
    num_mines = std::max(num_mines, i + reach);
  }
  std::vector<double> p(num_mines);
  for (auto& v : p) v = 0.5 * rng.uniform();
  for (std::size_t mine = 0; mine < num_mines; ++mine) {
    bool reachable = false;
    for (std::size_t i = 0; i < num_villages; ++i) {
      reachable |= mine >= layout.first_mine[i] && mine < layout.first_mine[i] + layout.reach[i];
    }
    if (reachable) {
      layout.mine_ids.push_back(mine);
      layout.base_probability.push_back(p[mine]);
    }
  }
  return layout;
}

Environment gem_mining_env(const GemMiningLayout& layout) {
  const std::size_t villages = layout.workers.size();
  std::vector<std::vector<std::size_t>> groups;
  for (auto mine : layout.mine_ids) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < villages; ++i) {
      if (mine >= layout.first_mine[i] && mine < layout.first_mine[i] + layout.reach[i]) {
        members.push_back(i);
      }
    }
    groups.push_back(std::move(members));
  }
  Hypergraph graph(layout.reach, groups);
  std::vector<double> means;
  means.reserve(graph.local_arm_count());
  for (std::size_t e = 0; e < graph.num_groups(); ++e) {
    const auto mine = layout.mine_ids[e];
    const auto members = graph.group(e);
    for (std::size_t local = 0; local < graph.group_size(e); ++local) {
      const auto choice = graph.decode_local(e, local);
      unsigned w = 0;
      for (std::size_t k = 0; k < members.size(); ++k) {
        if (layout.first_mine[members[k]] + choice[k] == mine) w += layout.workers[members[k]];
      }
      means.push_back(gem_probability(w, layout.base_probability[e]));
    }
  }
  const auto num_groups = graph.num_groups();
  return Environment("gem_mining(villages=" + std::to_string(villages) +
                         ",mines=" + std::to_string(num_groups) + ")",
                     std::move(graph), std::move(means),
                     std::vector<RewardFamily>(num_groups, RewardFamily::bernoulli));
}

Environment gem_mining_env(std::size_t num_villages, RandomStream& rng) {
  return gem_mining_env(generate_gem_mining(num_villages, rng));
}

Environment lower_bound_env(std::size_t rho, std::size_t L, double X, double delta) {
  if (rho == 0) throw EnvironmentError("lower-bound instance needs at least one group");
  if (!(X > 3.0) || !std::isfinite(X)) throw EnvironmentError("lower-bound instance needs X > 3");
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw EnvironmentError("lower-bound instance needs delta > 0");
  }
  std::vector<std::vector<std::size_t>> groups(rho);
  for (std::size_t e = 0; e < rho; ++e) groups[e] = {e};
  Hypergraph graph(std::vector<std::size_t>(rho, L + 1), groups);

  std::vector<double> means;
  means.reserve(graph.local_arm_count());
  for (std::size_t e = 0; e < rho; ++e) {
    for (std::size_t j = 0; j < L; ++j) means.push_back(X);
    means.push_back(X + delta);
  }

  std::vector<ArmDomain> boxes;
  if (L > 0) {
    std::vector<Arm> suboptimal(L);
    for (std::size_t j = 0; j < L; ++j) suboptimal[j] = j;
    boxes.emplace_back(rho, suboptimal);
  }
  boxes.emplace_back(rho, std::vector<Arm>{L});
  auto space = ActionSpace::from_boxes(graph, std::move(boxes));

  std::ostringstream name;
  name << "lower_bound(rho=" << rho << ",L=" << L << ",X=" << X << ",delta=" << delta << ")";
  return Environment(name.str(), std::move(graph), std::move(means),
                     std::vector<RewardFamily>(rho, RewardFamily::gaussian), std::move(space));
}

std::size_t lower_bound_arm_count(std::size_t rho) {
  if (rho == 0) throw EnvironmentError("rho must be positive");
  // b = Φ(1)
  const double b = 0.5 * std::erfc(-1.0 / std::numbers::sqrt2);
  const double log_base = std::log(1.0 / b);
  const double e = std::numbers::e;
  const double L = 2.0 * e * static_cast<double>(rho) * std::log(2.0) / log_base +
                   2.0 * e * std::log(static_cast<double>(rho)) / log_base;
  return static_cast<std::size_t>(std::ceil(L));
}

namespace {

std::string where(const YAML::Node& node) {
  const auto mark = node.Mark();
  if (mark.line < 0) return "";
  return " (line " + std::to_string(mark.line + 1) + ", column " + std::to_string(mark.column + 1) +
         ")";
}

void only_keys(const YAML::Node& map, std::initializer_list<std::string_view> allowed,
               const std::string& context) {
  if (!map.IsMap()) throw EnvironmentError(context + " must be a mapping" + where(map));
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw EnvironmentError("unknown key '" + context + "." + key + "'" + where(kv.first));
    }
  }
}

YAML::Node required(const YAML::Node& map, const std::string& key, const std::string& context) {
  auto node = map[key];
  if (!node) throw EnvironmentError("missing key '" + context + "." + key + "'" + where(map));
  return node;
}

template <typename T>
std::vector<T> as_list(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) throw EnvironmentError("'" + key + "' must be a list" + where(node));
  try {
    return node.as<std::vector<T>>();
  } catch (const YAML::Exception&) {
    throw EnvironmentError("'" + key + "' has elements of the wrong type" + where(node));
  }
}

}  // namespace

Environment parse_table_env(std::string_view yaml_text, std::string name) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& ex) {
    throw EnvironmentError("malformed table environment: " + std::string(ex.what()));
  }
  only_keys(root, {"graph", "means"}, "table");
  const auto graph_node = required(root, "graph", "table");
  only_keys(graph_node, {"arm_counts", "groups"}, "table.graph");
  const auto arm_counts =
      as_list<std::size_t>(required(graph_node, "arm_counts", "table.graph"), "graph.arm_counts");
  const auto groups = as_list<std::vector<std::size_t>>(
      required(graph_node, "groups", "table.graph"), "graph.groups");
  Hypergraph graph = build_hypergraph(arm_counts.size(), arm_counts, groups);

  const auto means_node = required(root, "means", "table");
  if (!means_node.IsSequence() || means_node.size() != graph.num_groups()) {
    throw EnvironmentError("'means' must list one entry per group (" +
                           std::to_string(graph.num_groups()) + ")" + where(means_node));
  }
  std::vector<double> means;
  std::vector<RewardFamily> families;
  for (std::size_t e = 0; e < graph.num_groups(); ++e) {
    const auto entry = means_node[e];
    const std::string ctx = "table.means[" + std::to_string(e) + "]";
    only_keys(entry, {"family", "values"}, ctx);
    families.push_back(parse_reward_family(required(entry, "family", ctx).as<std::string>()));
    const auto values = as_list<double>(required(entry, "values", ctx), ctx + ".values");
    if (values.size() != graph.group_size(e)) {
      throw EnvironmentError(ctx + ".values has " + std::to_string(values.size()) +
                             " entries, group has " + std::to_string(graph.group_size(e)) +
                             " local arms" + where(entry));
    }
    means.insert(means.end(), values.begin(), values.end());
  }
  return Environment(std::move(name), std::move(graph), std::move(means), std::move(families));
}

Environment load_table_env(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw EnvironmentError("cannot read table environment " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_table_env(buf.str(), "table(" + path.filename().string() + ")");
}

std::vector<double> sample_rewards(const Environment& env, const JointAssignment& a,
                                   RandomStream& rng) {
  const auto& h = env.graph();
  h.check(a);
  std::vector<double> rewards(h.num_groups());
  for (std::size_t e = 0; e < h.num_groups(); ++e) {
    const double mu = env.means()[h.local_offset(e) + h.within_group_unchecked(a, e)];
    switch (env.family(e)) {
      case RewardFamily::bernoulli: rewards[e] = rng.bernoulli(mu) ? 1.0 : 0.0; break;
      case RewardFamily::poisson: rewards[e] = static_cast<double>(rng.poisson(mu)); break;
      case RewardFamily::gaussian: rewards[e] = rng.normal(mu, 1.0); break;
    }
  }
  return rewards;
}

double pseudo_regret(const Environment& env, const JointAssignment& a) {
  return std::max(0.0, env.optimal_value() - env.mean_reward(a));
}

}  // namespace mats
