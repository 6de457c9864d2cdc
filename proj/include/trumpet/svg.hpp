#pragma once

// Minimal native SVG plotting: line plots with linear or log axes, a
// legend, labeled point markers, and grid heat maps. Long series are
// min-max decimated per pixel column so files stay small at any input
// length. CSV is the canonical output; these plots are a convenience.

#include <string>
#include <vector>

namespace trumpet {

struct PlotSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::string label;  // legend entry; empty hides the series from the legend
  std::string color;  // CSS color; empty picks from the default palette
  bool dashed = false;
};

struct PlotMarker {
  double x = 0.0;
  double y = 0.0;
  std::string text;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  std::vector<PlotMarker> markers;
  bool log_x = false;
  bool log_y = false;
  int width_px = 880;
  int height_px = 540;
};

// Writes the plot; raises ValidationError when no series contributes any
// drawable point (non-finite values and non-positives on log axes are
// dropped point-wise).
void write_svg_plot(const std::string& path, const PlotSpec& spec);

struct HeatMapSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;      // cell-center coordinates, increasing
  std::vector<double> y;      // cell-center coordinates, increasing
  std::vector<double> value;  // row-major: value[iy * x.size() + ix]
  bool mark = false;          // draw a cross at (mark_x, mark_y)
  double mark_x = 0.0;
  double mark_y = 0.0;
  int width_px = 720;
  int height_px = 560;
};

void write_svg_heatmap(const std::string& path, const HeatMapSpec& spec);

}  // namespace trumpet
