#include "mats/run_config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <initializer_list>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace mats {
namespace {

class Context {
 public:
  Context(std::string_view origin, std::set<std::string> overridden)
      : origin_(origin), overridden_(std::move(overridden)) {}

  std::string where(const YAML::Node& node, const std::string& key) const {
    for (auto k = key;; k = k.substr(0, k.rfind('.'))) {
      if (overridden_.count(k)) return " (command-line override of " + k + ")";
      if (k.find('.') == std::string::npos) break;
    }
    const auto mark = node.Mark();
    if (mark.is_null()) return " (" + origin_ + ")";
    return " (" + origin_ + ":" + std::to_string(mark.line + 1) + ":" +
           std::to_string(mark.column + 1) + ")";
  }

  [[noreturn]] void fail(const YAML::Node& node, const std::string& key,
                         const std::string& what) const {
    throw ConfigError("'" + key + "' " + what + where(node, key));
  }

 private:
  std::string origin_;
  std::set<std::string> overridden_;
};

/// Hands out the entries of one mapping and rejects the ones never asked for.
class Section {
 public:
  Section(const Context& ctx, YAML::Node node, std::string path)
      : ctx_(ctx), node_(std::move(node)), path_(std::move(path)) {
    if (!node_.IsMap()) ctx_.fail(node_, path_.empty() ? "<root>" : path_, "must be a mapping");
  }

  std::string key(const std::string& name) const {
    return path_.empty() ? name : path_ + "." + name;
  }

  YAML::Node find(const std::string& name) {
    used_.insert(name);
    const YAML::Node& n = node_;
    return n[name];
  }

  YAML::Node require(const std::string& name) {
    auto n = find(name);
    if (!n || n.IsNull()) throw ConfigError("missing required key '" + key(name) + "'" +
                                            ctx_.where(node_, path_));
    return n;
  }

  std::string text(const YAML::Node& n, const std::string& name) const {
    if (!n.IsScalar()) ctx_.fail(n, key(name), "must be a scalar");
    return n.Scalar();
  }

  std::uint64_t unsigned_value(const YAML::Node& n, const std::string& name) const {
    const auto s = text(n, name);
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) {
      ctx_.fail(n, key(name), "expects a non-negative integer, got '" + s + "'");
    }
    return v;
  }

  double number(const YAML::Node& n, const std::string& name) const {
    const auto s = text(n, name);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) {
      ctx_.fail(n, key(name), "expects a finite number, got '" + s + "'");
    }
    return v;
  }

  bool boolean(const YAML::Node& n, const std::string& name) const {
    bool v = false;
    if (!n.IsScalar() || !YAML::convert<bool>::decode(n, v)) {
      ctx_.fail(n, key(name), "expects true or false, got '" + (n.IsScalar() ? n.Scalar() : "") + "'");
    }
    return v;
  }

  template <typename T>
  void read(const std::string& name, T& out) {
    if (auto n = find(name); n && !n.IsNull()) out = convert<T>(n, name);
  }

  template <typename T>
  T read_required(const std::string& name) {
    return convert<T>(require(name), name);
  }

  /// Rejects any key outside `known` before values are read, so a misspelt
  /// key is reported ahead of the required key it was meant to be.
  void expect(std::initializer_list<const char*> known) const {
    for (const auto& kv : node_) {
      const auto name = kv.first.as<std::string>();
      if (std::none_of(known.begin(), known.end(), [&](const char* k) { return name == k; })) {
        ctx_.fail(kv.first, key(name), "is not a known key");
      }
    }
  }

  void finish() const {
    for (const auto& kv : node_) {
      const auto name = kv.first.as<std::string>();
      if (!used_.count(name)) ctx_.fail(kv.first, key(name), "is not a known key");
    }
  }

  const Context& context() const { return ctx_; }
  const YAML::Node& node() const { return node_; }

 private:
  template <typename T>
  T convert(const YAML::Node& n, const std::string& name) const {
    if constexpr (std::is_same_v<T, bool>) {
      return boolean(n, name);
    } else if constexpr (std::is_same_v<T, double>) {
      return number(n, name);
    } else if constexpr (std::is_integral_v<T>) {
      const auto v = unsigned_value(n, name);
      if (v > std::numeric_limits<T>::max()) ctx_.fail(n, key(name), "is out of range");
      return static_cast<T>(v);
    } else {
      return T(text(n, name));
    }
  }

  const Context& ctx_;
  YAML::Node node_;
  std::string path_;
  std::set<std::string> used_;
};

std::set<std::string> apply_overrides(YAML::Node& root, const std::vector<std::string>& overrides) {
  std::set<std::string> keys;
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("override '" + item + "' is not of the form key=value");
    }
    const auto key = item.substr(0, eq);
    YAML::Node value;
    try {
      value = YAML::Load(item.substr(eq + 1));
    } catch (const YAML::Exception& ex) {
      throw ConfigError("override '" + item + "' has a malformed value: " + ex.msg);
    }
    if (!value || value.IsNull()) value = YAML::Node(item.substr(eq + 1));

    YAML::Node cur = root;
    std::size_t start = 0;
    for (;;) {
      const auto dot = key.find('.', start);
      const auto part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
      if (!cur.IsMap() && !cur.IsNull()) {
        throw ConfigError("override key '" + key + "' descends into a non-mapping");
      }
      if (dot == std::string::npos) {
        cur[part] = value;
        break;
      }
      YAML::Node next = cur[part];
      if (!next) cur[part] = YAML::Node(YAML::NodeType::Map);
      cur.reset(cur[part]);
      start = dot + 1;
    }
    keys.insert(key);
  }
  return keys;
}

std::string default_name(const PolicyConfig& p) {
  char buf[64];
  switch (p.kind) {
    case PolicyKind::eps_mats:
      std::snprintf(buf, sizeof buf, "eps_mats(epsilon=%g)", p.epsilon);
      return buf;
    case PolicyKind::ucb_baseline: return "ucb_baseline";
    case PolicyKind::random: return "random";
  }
  return "run";
}

void read_environment(Section& s, EnvironmentConfig& env, const std::filesystem::path& base_dir) {
  env.kind = s.read_required<std::string>("kind");
  const auto& ctx = s.context();
  const auto kind_node = s.find("kind");
  if (env.kind == "bernoulli_chain" || env.kind == "poisson_chain") {
    s.expect({"kind", "agents", "group_size"});
    s.read("agents", env.agents);
    s.read("group_size", env.group_size);
    if (env.group_size != 2 && env.group_size != 3) {
      ctx.fail(s.find("group_size"), s.key("group_size"), "must be 2 or 3");
    }
    if (env.agents < env.group_size) {
      ctx.fail(s.find("agents"), s.key("agents"), "must be at least group_size");
    }
  } else if (env.kind == "gem_mining") {
    s.expect({"kind", "villages", "env_seed"});
    s.read("villages", env.villages);
    s.read("env_seed", env.env_seed);
    if (env.villages < 2) ctx.fail(s.find("villages"), s.key("villages"), "must be at least 2");
  } else if (env.kind == "lower_bound") {
    s.expect({"kind", "groups", "L", "X", "delta"});
    s.read("groups", env.groups);
    if (env.groups == 0) ctx.fail(s.find("groups"), s.key("groups"), "must be at least 1");
    if (auto n = s.find("L"); n && !n.IsNull()) {
      if (!(n.IsScalar() && n.Scalar() == "auto")) env.L = s.read_required<std::size_t>("L");
    }
    s.read("X", env.X);
    s.read("delta", env.delta);
    if (!(env.X > 3.0)) ctx.fail(s.find("X"), s.key("X"), "must exceed 3");
    if (!(env.delta > 0.0)) ctx.fail(s.find("delta"), s.key("delta"), "must be positive");
  } else if (env.kind == "table") {
    s.expect({"kind", "path"});
    const auto path_node = s.require("path");
    std::filesystem::path p = s.read_required<std::string>("path");
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    if (!std::filesystem::is_regular_file(p)) {
      ctx.fail(path_node, s.key("path"), "names a missing file '" + p.string() + "'");
    }
    env.table = p;
  } else {
    ctx.fail(kind_node, s.key("kind"),
             "names an unknown environment '" + env.kind +
                 "' (expected bernoulli_chain, poisson_chain, gem_mining, lower_bound or table)");
  }
  s.finish();
}

void read_policy(Section& s, PolicyConfig& policy, std::uint64_t horizon) {
  const auto& ctx = s.context();
  const auto kind_node = s.require("kind");
  const auto kind = s.text(kind_node, "kind");
  if (kind == "eps_mats" || kind == "mats") {
    if (kind == "mats") {
      s.expect({"kind", "c", "gate"});
    } else {
      s.expect({"kind", "epsilon", "c", "gate"});
    }
    policy.kind = PolicyKind::eps_mats;
    policy.epsilon = kind == "mats" ? 1.0 : s.read_required<double>("epsilon");
    if (!(policy.epsilon > 0.0 && policy.epsilon <= 1.0)) {
      ctx.fail(s.find("epsilon"), s.key("epsilon"), "must lie in (0,1]");
    }
    policy.c = std::log(static_cast<double>(horizon));
    if (auto n = s.find("c"); n && !n.IsNull() && !(n.IsScalar() && n.Scalar() == "ln_T")) {
      policy.c = s.number(n, "c");
    }
    if (!(policy.c > 0.0)) {
      ctx.fail(s.find("c"), s.key("c"), "must be positive (ln_T needs a horizon above 1)");
    }
    if (auto n = s.find("gate"); n && !n.IsNull()) {
      try {
        policy.gate = parse_exploration_gate(s.text(n, "gate"));
      } catch (const ConfigError&) {
        ctx.fail(n, s.key("gate"), "must be per_round or per_arm");
      }
    }
  } else if (kind == "ucb_baseline") {
    s.expect({"kind", "range"});
    policy.kind = PolicyKind::ucb_baseline;
    s.read("range", policy.ucb_range);
    if (!(policy.ucb_range > 0.0)) ctx.fail(s.find("range"), s.key("range"), "must be positive");
  } else if (kind == "random") {
    s.expect({"kind"});
    policy.kind = PolicyKind::random;
  } else {
    ctx.fail(kind_node, s.key("kind"),
             "names an unknown policy '" + kind +
                 "' (expected eps_mats, mats, ucb_baseline or random)");
  }
  s.finish();
  policy.validate();
}

}  // namespace

namespace {

YAML::Node load_root(std::string_view yaml_text, std::string_view origin) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::ParserException& ex) {
    throw ConfigError(std::string(origin) + ":" + std::to_string(ex.mark.line + 1) + ":" +
                      std::to_string(ex.mark.column + 1) + ": malformed config: " + ex.msg);
  }
  if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  return root;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

RunConfig parse_config(std::string_view yaml_text, std::string_view origin,
                       const std::vector<std::string>& overrides,
                       const std::filesystem::path& base_dir) {
  auto root = load_root(yaml_text, origin);
  const Context ctx(origin, apply_overrides(root, overrides));

  RunConfig cfg;
  Section top(ctx, root, "");
  top.expect({"name", "environment", "policy", "horizon", "trials", "seed", "log_every", "threads",
              "timing", "out"});
  cfg.horizon = top.read_required<std::uint64_t>("horizon");
  if (cfg.horizon == 0) ctx.fail(top.find("horizon"), "horizon", "must be at least 1");
  top.read("trials", cfg.trials);
  if (cfg.trials == 0) ctx.fail(top.find("trials"), "trials", "must be at least 1");
  top.read("seed", cfg.seed);
  top.read("log_every", cfg.log_every);
  if (cfg.log_every == 0) ctx.fail(top.find("log_every"), "log_every", "must be at least 1");
  top.read("threads", cfg.threads);
  top.read("timing", cfg.timing);
  if (auto n = top.find("out"); n && !n.IsNull()) cfg.out = top.text(n, "out");

  Section env(ctx, top.require("environment"), "environment");
  read_environment(env, cfg.environment, base_dir);
  Section policy(ctx, top.require("policy"), "policy");
  read_policy(policy, cfg.policy, cfg.horizon);

  if (auto n = top.find("name"); n && !n.IsNull()) {
    cfg.name = top.text(n, "name");
  } else {
    cfg.name = default_name(cfg.policy);
  }
  top.finish();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  return parse_config(read_text(path), path.string(), overrides, path.parent_path());
}

EnvironmentConfig parse_environment_config(std::string_view yaml_text, std::string_view origin,
                                           const std::vector<std::string>& overrides,
                                           const std::filesystem::path& base_dir) {
  auto root = load_root(yaml_text, origin);
  const Context ctx(origin, apply_overrides(root, overrides));
  Section top(ctx, root, "");
  Section env(ctx, top.require("environment"), "environment");
  EnvironmentConfig cfg;
  read_environment(env, cfg, base_dir);
  return cfg;
}

EnvironmentConfig load_environment_config(const std::filesystem::path& path,
                                          const std::vector<std::string>& overrides) {
  return parse_environment_config(read_text(path), path.string(), overrides, path.parent_path());
}

Environment build_environment(const EnvironmentConfig& cfg) {
  if (cfg.kind == "bernoulli_chain") return chain_env(cfg.agents, cfg.group_size, RewardFamily::bernoulli);
  if (cfg.kind == "poisson_chain") return chain_env(cfg.agents, cfg.group_size, RewardFamily::poisson);
  if (cfg.kind == "gem_mining") {
    RandomStream rng(cfg.env_seed);
    return gem_mining_env(cfg.villages, rng);
  }
  if (cfg.kind == "lower_bound") {
    return lower_bound_env(cfg.groups, cfg.L.value_or(lower_bound_arm_count(cfg.groups)), cfg.X,
                           cfg.delta);
  }
  if (cfg.kind == "table") return load_table_env(cfg.table);
  throw ConfigError("unknown environment '" + cfg.kind + "'");
}

ExperimentSpec experiment_spec(const RunConfig& cfg) {
  ExperimentSpec spec;
  spec.policy = cfg.policy;
  spec.horizon = cfg.horizon;
  spec.trials = cfg.trials;
  spec.base_seed = cfg.seed;
  spec.log_every = cfg.log_every;
  spec.threads = cfg.threads;
  return spec;
}

}  // namespace mats
