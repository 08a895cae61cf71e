#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace pann::cli {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;  // points instead of a polyline
  std::size_t color = 0;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

/// Self-contained SVG line chart with linear axes and a legend.
std::string render_svg(const Chart& chart);
void write_svg(const std::filesystem::path& path, const Chart& chart);

}  // namespace pann::cli
