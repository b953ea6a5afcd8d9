#pragma once

#include <string>
#include <vector>

namespace radiomap::tools {

struct Series {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
  bool markers_only = false;
};

/// Minimal deterministic SVG line plot: polylines plus axes, no text
/// shaping dependencies. CSV stays the primary artifact.
std::string render_line_plot(const std::vector<Series>& series, const std::string& title,
                             int width = 760, int height = 420);

}  // namespace radiomap::tools
