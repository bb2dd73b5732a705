// mats: run, sweep, plot and inspect multi-agent bandit experiments.
//
// Exit codes: 0 success, 1 unexpected failure, 2 usage, configuration or
// validation error, 3 I/O error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "mats/elimination.hpp"
#include "mats/environments.hpp"
#include "mats/harness.hpp"
#include "mats/results_io.hpp"
#include "mats/run_config.hpp"
#include "mats/svg_plot.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kIo = 3 };

struct RunOptions {
  std::string config;
  std::vector<std::string> overrides;
  std::string seed;
  std::string trials;
  std::string out;
  std::string threads;
  bool timing = false;

  void attach(CLI::App* cmd, bool experiment) {
    cmd->add_option("-c,--config", config, "YAML config file")->check(CLI::ExistingFile);
    cmd->add_option("--set", overrides, "Override a config key, e.g. policy.epsilon=0.1");
    if (!experiment) return;
    cmd->add_option("--seed", seed, "Base seed; trial i uses seed + i");
    cmd->add_option("--trials", trials, "Number of trials");
    cmd->add_option("-o,--out", out, "Output path prefix");
    cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");
    cmd->add_flag("--timing", timing, "Record wall time instead of writing zeros");
  }

  std::vector<std::string> all_overrides() const {
    auto all = overrides;
    if (!seed.empty()) all.push_back("seed=" + seed);
    if (!trials.empty()) all.push_back("trials=" + trials);
    if (!out.empty()) all.push_back("out=" + out);
    if (!threads.empty()) all.push_back("threads=" + threads);
    if (timing) all.push_back("timing=true");
    return all;
  }

  mats::RunConfig load(const std::vector<std::string>& extra = {}) const {
    auto all = all_overrides();
    all.insert(all.end(), extra.begin(), extra.end());
    if (config.empty()) return mats::parse_config("", "<command line>", all);
    return mats::load_config(config, all);
  }
};

std::string fixed6(double v) { return mats::format_fixed6(v); }

mats::ExperimentResult execute(const mats::RunConfig& cfg, const mats::Environment& env) {
  auto result = mats::run_experiment(env, mats::experiment_spec(cfg));
  if (!cfg.timing) {
    for (auto& trace : result.traces) trace.wall_ns = 0;
    result.summary = mats::summarize(result.traces);
  }
  return result;
}

void report(const mats::RunConfig& cfg, const mats::ExperimentResult& result,
            const mats::CsvPaths& paths) {
  const auto& s = result.summary;
  std::cout << cfg.name << ": T=" << cfg.horizon << " trials=" << cfg.trials
            << " mean_final_regret=" << fixed6(s.mean_cum_regret.back())
            << " std=" << fixed6(s.std_cum_regret.back())
            << " mean_gauss_draws=" << fixed6(s.mean_gaussian_draws) << '\n'
            << "  " << paths.trials.string() << '\n'
            << "  " << paths.summary.string() << '\n';
}

int cmd_run(const RunOptions& opt) {
  const auto cfg = opt.load();
  const auto env = mats::build_environment(cfg.environment);
  const auto result = execute(cfg, env);
  const auto paths = mats::emit_csv(result.traces, result.summary, cfg.out);
  report(cfg, result, paths);
  return kOk;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

int cmd_sweep(const RunOptions& opt, const std::string& param, const std::string& values_text,
              const std::string& svg_out) {
  const auto values = split_list(values_text);
  if (values.empty()) throw mats::ConfigError("--values lists no values");
  const auto leaf = param.substr(param.rfind('.') + 1);
  const auto base = opt.load();

  std::vector<mats::PlotSeries> series;
  std::string env_name;
  for (const auto& value : values) {
    const auto label = (leaf == "epsilon" ? std::string("ε") : leaf) + "=" + value;
    auto cfg = opt.load({param + "=" + value, "name=" + label});
    const auto env = mats::build_environment(cfg.environment);
    env_name = env.name();
    const auto result = execute(cfg, env);
    fs::path prefix = base.out;
    prefix += "." + leaf + "=" + value;
    const auto paths = mats::emit_csv(result.traces, result.summary, prefix);
    report(cfg, result, paths);
    series.push_back({label, result.summary});
  }

  fs::path svg = svg_out;
  if (svg.empty()) {
    svg = base.out;
    svg += ".svg";
  }
  mats::PlotOptions plot;
  plot.title = env_name;
  mats::write_svg(svg, series, plot);
  std::cout << "  " << svg.string() << '\n';
  return kOk;
}

int cmd_plot(const std::vector<std::string>& inputs, const std::string& out,
             const std::string& title) {
  std::vector<mats::PlotSeries> series;
  for (const auto& item : inputs) {
    std::string label;
    fs::path path = item;
    const auto eq = item.find('=');
    if (!fs::is_regular_file(path) && eq != std::string::npos) {
      label = item.substr(0, eq);
      path = item.substr(eq + 1);
    }
    if (label.empty()) {
      label = path.filename().string();
      const std::string suffix = ".summary.csv";
      if (label.size() > suffix.size() && label.ends_with(suffix)) {
        label.resize(label.size() - suffix.size());
      }
    }
    series.push_back({label, mats::read_summary_csv(path)});
  }
  mats::PlotOptions plot;
  plot.title = title;
  mats::write_svg(out, series, plot);
  std::cout << out << '\n';
  return kOk;
}

std::string joined(const mats::JointAssignment& a) {
  std::string s;
  for (std::size_t i = 0; i < a.arms.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(a.arms[i]);
  }
  return s;
}

int cmd_oracle(const RunOptions& opt, bool table) {
  const auto env_cfg = opt.config.empty()
                           ? mats::parse_environment_config("", "<command line>", opt.overrides)
                           : mats::load_environment_config(opt.config, opt.overrides);
  const auto env = mats::build_environment(env_cfg);
  const auto& h = env.graph();
  const auto& space = env.action_space();
  const auto best = mats::brute_argmax_over(h, env.means(), space, mats::kDefaultOracleCap);

  double gap_min = std::numeric_limits<double>::infinity();
  double gap_max = 0.0;
  long double gap_sum = 0.0L;
  std::uint64_t arms = 0;
  std::ostringstream rows;
  space.for_each(h, [&](const mats::JointAssignment& a) {
    const double mean = env.mean_reward(a);
    const double gap = mats::pseudo_regret(env, a);
    if (gap > 0.0) gap_min = std::min(gap_min, gap);
    gap_max = std::max(gap_max, gap);
    gap_sum += gap;
    ++arms;
    if (table) rows << h.joint_index(a) << ',' << fixed6(mean) << ',' << fixed6(gap) << '\n';
  });

  std::cout << "environment: " << env.name() << '\n'
            << "agents: " << h.num_agents() << '\n'
            << "groups: " << h.num_groups() << '\n'
            << "local_arms: " << h.local_arm_count() << '\n'
            << "joint_arms: " << arms << '\n'
            << "optimal_arm: " << joined(best.argmax) << '\n'
            << "optimal_index: " << h.joint_index(best.argmax) << '\n'
            << "mu_star: " << fixed6(best.value) << '\n'
            << "gap_min: " << (std::isfinite(gap_min) ? fixed6(gap_min) : std::string("none"))
            << '\n'
            << "gap_max: " << fixed6(gap_max) << '\n'
            << "gap_mean: " << fixed6(static_cast<double>(gap_sum / arms)) << '\n';
  if (table) std::cout << "arm,mean,gap\n" << rows.str();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent Thompson sampling experiments"};
  app.require_subcommand(1);

  RunOptions run_opt;
  auto* run = app.add_subcommand("run", "Run one experiment and write CSV results");
  run_opt.attach(run, true);

  RunOptions sweep_opt;
  std::string param;
  std::string values;
  std::string sweep_svg;
  auto* sweep = app.add_subcommand("sweep", "Run one experiment per value of a config key");
  sweep_opt.attach(sweep, true);
  sweep->add_option("--param", param, "Dotted config key to vary")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();
  sweep->add_option("--svg", sweep_svg, "Plot path (default <out>.svg)");

  std::vector<std::string> plot_inputs;
  std::string plot_out = "regret.svg";
  std::string plot_title;
  auto* plot = app.add_subcommand("plot", "Render summary CSVs as an SVG regret chart");
  plot->add_option("summaries", plot_inputs, "PATH or LABEL=PATH per summary CSV")->required();
  plot->add_option("-o,--out", plot_out, "SVG output path");
  plot->add_option("--title", plot_title, "Chart title");

  RunOptions oracle_opt;
  bool oracle_no_table = false;
  auto* oracle = app.add_subcommand("oracle", "Print the brute-force optimum and arm gaps");
  oracle_opt.attach(oracle, false);
  oracle->add_flag("--no-table", oracle_no_table, "Print only the summary lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(run_opt);
    if (*sweep) return cmd_sweep(sweep_opt, param, values, sweep_svg);
    if (*plot) return cmd_plot(plot_inputs, plot_out, plot_title);
    if (*oracle) return cmd_oracle(oracle_opt, !oracle_no_table);
  } catch (const std::invalid_argument& e) {
    std::cerr << "mats: invalid input: " << e.what() << '\n';
    return kUsage;
  } catch (const mats::IoError& e) {
    std::cerr << "mats: I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "mats: error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
