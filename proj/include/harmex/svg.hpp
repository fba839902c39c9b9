#pragma once
#include <string>
#include <utility>
#include <vector>

namespace harmex::svg {

// One polyline series in data coordinates.  An empty color picks the next
// entry of a fixed palette by series index.
struct Series {
  std::string label;
  std::string color;
  bool markers = false;  // circles at the data points
  bool dashed = false;
  std::vector<std::pair<double, double>> pts;
};

// Fixed-size (720x480) line chart with linear or log10 axes, tick labels,
// a legend and a title.  Deterministic byte-for-byte in its inputs; throws
// std::invalid_argument on nonpositive data under a log axis.
std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label,
                       const std::vector<Series>& series, bool log_x = false,
                       bool log_y = false);

}  // namespace harmex::svg
