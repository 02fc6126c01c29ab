#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace drs {

struct PlotSeries {
  std::string label;
  std::vector<double> values;
  std::size_t k0 = 1;  // iteration index of values[0]
};

/// Dashed reference line through (k_anchor, value_anchor) with per-iteration factor `rate`.
struct GuideLine {
  double rate = 0.0;
  std::size_t k_anchor = 0;
  double value_anchor = 1.0;
  std::string label;
};

/// Static SVG of log10 residuals against k. Non-positive and non-finite values are skipped.
std::string convergence_svg(const std::vector<PlotSeries>& series,
                            const std::optional<GuideLine>& guide, const std::string& title = {});

}  // namespace drs
