#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tradebench/learners.hpp"
#include "tradebench/tradeoff.hpp"

namespace tradebench::svg {

struct Series {
  std::string name;
  std::string color;
  std::vector<std::pair<double, double>> points;
};

struct AxisOptions {
  std::string label;
  bool log_scale = false;
};

/// Fixed palette slot per algorithm tag.
std::string_view color_of(Algorithm algorithm) noexcept;
std::string_view color_of(std::string_view algorithm_tag) noexcept;

/// Multi-series line chart with markers and a legend. Non-positive values
/// are skipped on log-scaled axes.
std::string line_chart(std::string_view title, const AxisOptions& x, const AxisOptions& y,
                       const std::vector<Series>& series);

/// Quality-vs-time scatter: Pareto points filled (class "pareto"), dominated
/// points hollow (class "dominated"), hull drawn as a polyline (class "hull").
std::string frontier_chart(std::string_view title, const Frontier& frontier);

}  // namespace tradebench::svg
