#include "mats/results_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace mats {
namespace {

constexpr const char* kTrialsHeader = "trial,t,cum_regret";
constexpr const char* kSummaryHeader = "t,mean_cum_regret,std_cum_regret,mean_wall_ns,mean_gauss_draws";

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

std::filesystem::path with_suffix(const std::filesystem::path& prefix, const char* suffix) {
  auto p = prefix;
  p += suffix;
  return p;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

template <typename T>
T parse_field(const std::string& s, const std::string& origin, std::size_t line_no) {
  T v{};
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw IoError(origin + ":" + std::to_string(line_no) + ": bad field '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_fixed6(double value) {
  if (value == 0.0) value = 0.0;
  char buf[64];
  const int n = std::snprintf(buf, sizeof buf, "%.6f", value);
  std::string s(buf, static_cast<std::size_t>(n));
  if (s == "-0.000000") s.erase(0, 1);
  return s;
}

void write_trials_csv(std::ostream& out, const std::vector<RegretTrace>& traces) {
  out << kTrialsHeader << '\n';
  for (std::size_t i = 0; i < traces.size(); ++i) {
    for (const auto& cp : traces[i].checkpoints) {
      out << i << ',' << cp.t << ',' << format_fixed6(cp.cum_regret) << '\n';
    }
  }
}

void write_summary_csv(std::ostream& out, const ExperimentSummary& summary) {
  out << kSummaryHeader << '\n';
  const auto wall = format_fixed6(summary.mean_wall_ns);
  const auto draws = format_fixed6(summary.mean_gaussian_draws);
  for (std::size_t k = 0; k < summary.t.size(); ++k) {
    out << summary.t[k] << ',' << format_fixed6(summary.mean_cum_regret[k]) << ','
        << format_fixed6(summary.std_cum_regret[k]) << ',' << wall << ',' << draws << '\n';
  }
}

CsvPaths emit_csv(const std::vector<RegretTrace>& traces, const ExperimentSummary& summary,
                  const std::filesystem::path& prefix) {
  CsvPaths paths{with_suffix(prefix, ".trials.csv"), with_suffix(prefix, ".summary.csv")};
  std::ostringstream trials;
  write_trials_csv(trials, traces);
  std::ostringstream sum;
  write_summary_csv(sum, summary);
  write_file(paths.trials, trials.str());
  write_file(paths.summary, sum.str());
  return paths;
}

ExperimentSummary parse_summary_csv(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line) || line != kSummaryHeader) {
    throw IoError(origin + ": missing summary header '" + kSummaryHeader + "'");
  }
  ExperimentSummary s;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 5) {
      throw IoError(origin + ":" + std::to_string(line_no) + ": expected 5 fields, got " +
                    std::to_string(f.size()));
    }
    s.t.push_back(parse_field<std::uint64_t>(f[0], origin, line_no));
    s.mean_cum_regret.push_back(parse_field<double>(f[1], origin, line_no));
    s.std_cum_regret.push_back(parse_field<double>(f[2], origin, line_no));
    s.mean_wall_ns = parse_field<double>(f[3], origin, line_no);
    s.mean_gaussian_draws = parse_field<double>(f[4], origin, line_no);
  }
  if (s.t.empty()) throw IoError(origin + ": summary has no rows");
  return s;
}

ExperimentSummary read_summary_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return parse_summary_csv(in, path.string());
}

}  // namespace mats
