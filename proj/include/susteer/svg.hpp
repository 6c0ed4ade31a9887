#pragma once

#include <string>
#include <vector>

namespace susteer {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f6fb2";
};

struct PlotPanel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

/// Self-contained SVG with the panels stacked vertically. Deterministic output
/// for identical inputs.
std::string render_svg(const std::vector<PlotPanel>& panels, int width = 720, int panel_height = 320);

}  // namespace susteer
