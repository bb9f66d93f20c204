#pragma once

#include <string>
#include <vector>

namespace gaincap::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Renders a 720x480 SVG 1.1 line plot with linear axes, tick labels, and a
// legend. Series with a single point become a marker instead of a polyline.
// All numbers are written with 6 significant digits; output is fully
// deterministic for identical input.
std::string line_plot(const std::string& title, const std::string& x_label,
                      const std::string& y_label,
                      const std::vector<Series>& series);

}  // namespace gaincap::svg
