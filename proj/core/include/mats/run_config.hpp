#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mats/environments.hpp"
#include "mats/harness.hpp"
#include "mats/policies.hpp"

namespace mats {

struct EnvironmentConfig {
  /// bernoulli_chain, poisson_chain, gem_mining, lower_bound or table.
  std::string kind;
  std::size_t agents = 10;       // chains
  std::size_t group_size = 2;    // chains
  std::size_t villages = 5;      // gem_mining
  std::uint64_t env_seed = 0;    // gem_mining
  std::size_t groups = 2;        // lower_bound
  std::optional<std::size_t> L;  // lower_bound; empty means lower_bound_arm_count(groups)
  double X = 3.5;                // lower_bound
  double delta = 0.5;            // lower_bound
  std::filesystem::path table;   // table
};

/// A fully validated experiment description.
struct RunConfig {
  std::string name;
  EnvironmentConfig environment;
  PolicyConfig policy;
  std::uint64_t horizon = 0;
  std::size_t trials = 50;
  std::uint64_t seed = 0;
  std::uint64_t log_every = 100;
  unsigned threads = 1;
  /// Wall time is the only non-reproducible output; it is written as zero
  /// unless enabled.
  bool timing = false;
  std::filesystem::path out = "mats_run";
};

/// Parses a YAML run config. `overrides` are "dotted.key=value" strings
/// applied on top of the document before validation, so a config can also be
/// given entirely inline. `origin` names the source in error messages and
/// relative table paths resolve against `base_dir`.
///
/// Unknown keys, missing required keys and ill-typed values throw
/// ConfigError naming the key and its line/column. `c: ln_T` (the default)
/// resolves to ln(horizon).
RunConfig parse_config(std::string_view yaml_text, std::string_view origin = "<inline>",
                       const std::vector<std::string>& overrides = {},
                       const std::filesystem::path& base_dir = {});

RunConfig load_config(const std::filesystem::path& path,
                      const std::vector<std::string>& overrides = {});

/// Reads only the `environment` section, which is checked as strictly as in
/// parse_config; everything else in the document is ignored.
EnvironmentConfig parse_environment_config(std::string_view yaml_text,
                                           std::string_view origin = "<inline>",
                                           const std::vector<std::string>& overrides = {},
                                           const std::filesystem::path& base_dir = {});

EnvironmentConfig load_environment_config(const std::filesystem::path& path,
                                          const std::vector<std::string>& overrides = {});

Environment build_environment(const EnvironmentConfig& cfg);

ExperimentSpec experiment_spec(const RunConfig& cfg);

}  // namespace mats
