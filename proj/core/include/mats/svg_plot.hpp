#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mats/harness.hpp"

namespace mats {

struct PlotSeries {
  std::string label;
  ExperimentSummary summary;
};

struct PlotOptions {
  int width = 800;
  int height = 500;
  std::string title;
  std::string x_label = "t";
  std::string y_label = "mean cumulative regret";
};

/// Self-contained SVG line chart: one polyline of mean cumulative regret per
/// series over a translucent ±1 std band, with axes and a legend. Throws
/// std::invalid_argument for an empty series list or an empty summary.
std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& options = {});

/// render_svg to a file; throws IoError when it cannot be written.
void write_svg(const std::filesystem::path& path, const std::vector<PlotSeries>& series,
               const PlotOptions& options = {});

}  // namespace mats
