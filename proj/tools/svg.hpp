#pragma once

// Minimal SVG line chart for sweep outputs.

#include <string>
#include <vector>

namespace momlab::cli {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series;
};

/// Points that are not finite (or not positive on a log axis) are skipped.
std::string render_svg(const Chart& chart);

}  // namespace momlab::cli
