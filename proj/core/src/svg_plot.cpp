#include "mats/svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "mats/results_io.hpp"

namespace mats {
namespace {

constexpr std::array<const char*, 10> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                               "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                               "#bcbd22", "#17becf"};

std::string escape_xml(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

/// Round step (1, 2 or 5 times a power of ten) giving about `target` ticks.
double nice_step(double span, int target) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  return (f <= 1.0 ? 1.0 : f <= 2.0 ? 2.0 : f <= 5.0 ? 5.0 : 10.0) * mag;
}

}  // namespace

std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& options) {
  if (series.empty()) throw std::invalid_argument("nothing to plot: no summaries given");

  double x_max = 0.0;
  double y_max = 0.0;
  for (const auto& s : series) {
    const auto& sum = s.summary;
    if (sum.t.empty()) throw std::invalid_argument("summary '" + s.label + "' has no rows");
    if (sum.mean_cum_regret.size() != sum.t.size() || sum.std_cum_regret.size() != sum.t.size()) {
      throw std::invalid_argument("summary '" + s.label + "' has ragged columns");
    }
    for (std::size_t k = 0; k < sum.t.size(); ++k) {
      x_max = std::max(x_max, static_cast<double>(sum.t[k]));
      y_max = std::max(y_max, sum.mean_cum_regret[k] + sum.std_cum_regret[k]);
    }
  }
  const double x_step = nice_step(x_max, 5);
  const double y_step = nice_step(y_max, 5);
  x_max = std::max(x_step, std::ceil(x_max / x_step) * x_step);
  y_max = std::max(y_step, std::ceil(y_max / y_step) * y_step);

  const double left = 80, right = 20, top = options.title.empty() ? 20 : 45, bottom = 55;
  const double w = options.width - left - right;
  const double h = options.height - top - bottom;
  auto px = [&](double x) { return left + w * x / x_max; };
  auto py = [&](double y) { return top + h * (1.0 - std::clamp(y, 0.0, y_max) / y_max); };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(options.width) +
         "\" height=\"" + std::to_string(options.height) + "\" viewBox=\"0 0 " +
         std::to_string(options.width) + " " + std::to_string(options.height) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    svg += "<text x=\"" + num(left + w / 2) + "\" y=\"25\" text-anchor=\"middle\" font-size=\"15\">" +
           escape_xml(options.title) + "</text>\n";
  }

  svg += "<g class=\"axes\" stroke=\"#cccccc\" stroke-width=\"1\">\n";
  for (double x = 0; x <= x_max + x_step / 2; x += x_step) {
    svg += "<line x1=\"" + num(px(x)) + "\" y1=\"" + num(top) + "\" x2=\"" + num(px(x)) +
           "\" y2=\"" + num(top + h) + "\"/>\n";
  }
  for (double y = 0; y <= y_max + y_step / 2; y += y_step) {
    svg += "<line x1=\"" + num(left) + "\" y1=\"" + num(py(y)) + "\" x2=\"" + num(left + w) +
           "\" y2=\"" + num(py(y)) + "\"/>\n";
  }
  svg += "</g>\n<g class=\"ticks\" fill=\"#333333\">\n";
  for (double x = 0; x <= x_max + x_step / 2; x += x_step) {
    svg += "<text x=\"" + num(px(x)) + "\" y=\"" + num(top + h + 18) +
           "\" text-anchor=\"middle\">" + tick_label(x) + "</text>\n";
  }
  for (double y = 0; y <= y_max + y_step / 2; y += y_step) {
    svg += "<text x=\"" + num(left - 8) + "\" y=\"" + num(py(y) + 4) + "\" text-anchor=\"end\">" +
           tick_label(y) + "</text>\n";
  }
  svg += "</g>\n";
  svg += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(w) + "\" height=\"" +
         num(h) + "\" fill=\"none\" stroke=\"#333333\"/>\n";
  svg += "<text x=\"" + num(left + w / 2) + "\" y=\"" + num(options.height - 12.0) +
         "\" text-anchor=\"middle\">" + escape_xml(options.x_label) + "</text>\n";
  svg += "<text transform=\"translate(18 " + num(top + h / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">" + escape_xml(options.y_label) + "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& sum = series[i].summary;
    const char* color = kPalette[i % kPalette.size()];
    std::string band;
    for (std::size_t k = 0; k < sum.t.size(); ++k) {
      band += num(px(static_cast<double>(sum.t[k]))) + "," +
              num(py(sum.mean_cum_regret[k] + sum.std_cum_regret[k])) + " ";
    }
    for (std::size_t k = sum.t.size(); k-- > 0;) {
      band += num(px(static_cast<double>(sum.t[k]))) + "," +
              num(py(sum.mean_cum_regret[k] - sum.std_cum_regret[k])) + (k ? " " : "");
    }
    std::string line;
    for (std::size_t k = 0; k < sum.t.size(); ++k) {
      if (k) line += ' ';
      line += num(px(static_cast<double>(sum.t[k]))) + "," + num(py(sum.mean_cum_regret[k]));
    }
    svg += "<g class=\"series\">\n<title>" + escape_xml(series[i].label) + "</title>\n";
    svg += "<polygon class=\"band\" points=\"" + band + "\" fill=\"" + color +
           "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    svg += "<polyline class=\"mean\" points=\"" + line + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n</g>\n";
  }

  svg += "<g class=\"legend\">\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = top + 16 + 18.0 * static_cast<double>(i);
    svg += "<line x1=\"" + num(left + 12) + "\" y1=\"" + num(y) + "\" x2=\"" + num(left + 36) +
           "\" y2=\"" + num(y) + "\" stroke=\"" + kPalette[i % kPalette.size()] +
           "\" stroke-width=\"3\"/>\n";
    svg += "<text x=\"" + num(left + 42) + "\" y=\"" + num(y + 4) + "\">" +
           escape_xml(series[i].label) + "</text>\n";
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

void write_svg(const std::filesystem::path& path, const std::vector<PlotSeries>& series,
               const PlotOptions& options) {
  const auto svg = render_svg(series, options);
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << svg;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace mats
