#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "mats/harness.hpp"

namespace mats {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fixed notation with exactly six fractional digits; negative zero prints
/// as "0.000000".
std::string format_fixed6(double value);

/// Header `trial,t,cum_regret`, one row per checkpoint, rows in (trial, t)
/// order. The trial column is the position of the trace in `traces`.
void write_trials_csv(std::ostream& out, const std::vector<RegretTrace>& traces);

/// Header `t,mean_cum_regret,std_cum_regret,mean_wall_ns,mean_gauss_draws`.
void write_summary_csv(std::ostream& out, const ExperimentSummary& summary);

struct CsvPaths {
  std::filesystem::path trials;
  std::filesystem::path summary;
};

/// Writes `<prefix>.trials.csv` and `<prefix>.summary.csv`, creating the
/// parent directory if needed. Throws IoError on failure.
CsvPaths emit_csv(const std::vector<RegretTrace>& traces, const ExperimentSummary& summary,
                  const std::filesystem::path& prefix);

/// Inverse of write_summary_csv. The trial count is not stored and reads
/// back as zero.
ExperimentSummary parse_summary_csv(std::istream& in, const std::string& origin = "<stream>");
ExperimentSummary read_summary_csv(const std::filesystem::path& path);

}  // namespace mats
