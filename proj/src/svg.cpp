#include "trumpet/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "trumpet/errors.hpp"

namespace trumpet {

namespace {

constexpr double k_margin_left = 72.0;
constexpr double k_margin_right = 18.0;
constexpr double k_margin_top = 34.0;
constexpr double k_margin_bottom = 52.0;

const char* k_palette[6] = {"#1f6fb2", "#d1495b", "#2e8b57",
                            "#946bb3", "#c98a13", "#4a4a4a"};

std::string escape_text(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&')
      out += "&amp;";
    else if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else
      out += c;
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// One plot axis: data range -> pixel range, linear or logarithmic.
struct Axis {
  bool log = false;
  double lo = 0.0, hi = 1.0;      // data range (log10 when log)
  double px0 = 0.0, px1 = 1.0;    // pixel range

  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }

  double transform(double v) const { return log ? std::log10(v) : v; }

  double to_px(double v) const {
    return px0 + (transform(v) - lo) / (hi - lo) * (px1 - px0);
  }

  void include(double v) {
    if (!usable(v)) return;
    const double t = transform(v);
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }

  void begin_range() {
    lo = std::numeric_limits<double>::infinity();
    hi = -std::numeric_limits<double>::infinity();
  }

  void finish_range() {
    if (!(lo <= hi)) {  // nothing included
      lo = log ? 0.0 : -1.0;
      hi = log ? 1.0 : 1.0;
      return;
    }
    if (lo == hi) {
      lo -= log ? 0.5 : (std::abs(lo) * 0.5 + 0.5);
      hi += log ? 0.5 : (std::abs(hi) * 0.5 + 0.5);
      return;
    }
    const double pad = 0.03 * (hi - lo);
    lo -= pad;
    hi += pad;
  }

  // Tick positions in data units: 1-2-5 ladder targeting ~6 ticks on a
  // linear axis, decades on a logarithmic one.
  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      const int first = static_cast<int>(std::ceil(lo - 1e-9));
      const int last = static_cast<int>(std::floor(hi + 1e-9));
      const int step = std::max(1, (last - first) / 8 + 1);
      for (int d = first; d <= last; d += step)
        out.push_back(std::pow(10.0, d));
      return out;
    }
    const double span = hi - lo;
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    if (raw / mag > 5.0)
      step = 10.0 * mag;
    else if (raw / mag > 2.0)
      step = 5.0 * mag;
    else if (raw / mag > 1.0)
      step = 2.0 * mag;
    const double first = std::ceil(lo / step) * step;
    for (double v = first; v <= hi + 0.5 * step; v += step)
      out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    return out;
  }
};

// Per-pixel-column min-max decimation: keeps first, min, max, and last
// sample of each column, bounding the path length by the pixel width.
std::vector<std::size_t> decimate(const std::vector<double>& px,
                                  const std::vector<double>& py,
                                  double column_width) {
  std::vector<std::size_t> keep;
  std::size_t i = 0;
  while (i < px.size()) {
    const double col = std::floor(px[i] / column_width);
    std::size_t first = i, last = i, imin = i, imax = i;
    while (i < px.size() && std::floor(px[i] / column_width) == col) {
      if (py[i] < py[imin]) imin = i;
      if (py[i] > py[imax]) imax = i;
      last = i;
      ++i;
    }
    std::size_t picks[4] = {first, imin, imax, last};
    std::sort(picks, picks + 4);
    for (std::size_t k = 0; k < 4; ++k)
      if (k == 0 || picks[k] != picks[k - 1]) keep.push_back(picks[k]);
  }
  return keep;
}

void draw_frame_and_ticks(std::ofstream& out, const Axis& ax, const Axis& ay,
                          const PlotSpec& spec) {
  out << "<rect x=\"0\" y=\"0\" width=\"" << spec.width_px << "\" height=\""
      << spec.height_px << "\" fill=\"white\"/>\n";
  // Grid and tick labels.
  for (double t : ax.ticks()) {
    const double x = ax.to_px(t);
    out << "<line x1=\"" << num(x) << "\" y1=\"" << num(ay.px0)
        << "\" x2=\"" << num(x) << "\" y2=\"" << num(ay.px1)
        << "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << num(x) << "\" y=\"" << num(ay.px0 + 18.0)
        << "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#333\">"
        << escape_text(tick_text(t)) << "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double y = ay.to_px(t);
    out << "<line x1=\"" << num(ax.px0) << "\" y1=\"" << num(y)
        << "\" x2=\"" << num(ax.px1) << "\" y2=\"" << num(y)
        << "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << num(ax.px0 - 6.0) << "\" y=\"" << num(y + 4.0)
        << "\" font-size=\"11\" text-anchor=\"end\" fill=\"#333\">"
        << escape_text(tick_text(t)) << "</text>\n";
  }
  // Frame.
  out << "<rect x=\"" << num(ax.px0) << "\" y=\"" << num(ay.px1)
      << "\" width=\"" << num(ax.px1 - ax.px0) << "\" height=\""
      << num(ay.px0 - ay.px1)
      << "\" fill=\"none\" stroke=\"#222\" stroke-width=\"1\"/>\n";
  // Title and axis labels.
  if (!spec.title.empty())
    out << "<text x=\"" << num(0.5 * (ax.px0 + ax.px1)) << "\" y=\"22\" "
        << "font-size=\"14\" text-anchor=\"middle\" fill=\"#111\">"
        << escape_text(spec.title) << "</text>\n";
  if (!spec.x_label.empty())
    out << "<text x=\"" << num(0.5 * (ax.px0 + ax.px1)) << "\" y=\""
        << num(spec.height_px - 14.0)
        << "\" font-size=\"12\" text-anchor=\"middle\" fill=\"#111\">"
        << escape_text(spec.x_label) << "</text>\n";
  if (!spec.y_label.empty())
    out << "<text x=\"16\" y=\"" << num(0.5 * (ay.px0 + ay.px1))
        << "\" font-size=\"12\" text-anchor=\"middle\" fill=\"#111\" "
        << "transform=\"rotate(-90 16 " << num(0.5 * (ay.px0 + ay.px1))
        << ")\">" << escape_text(spec.y_label) << "</text>\n";
}

// Linear five-stop dark-to-light color ramp for heat maps.
std::string ramp_color(double t) {
  static const double stops[5][3] = {{38, 22, 66},
                                     {60, 80, 135},
                                     {51, 137, 122},
                                     {143, 188, 77},
                                     {247, 230, 80}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int i = std::min(3, static_cast<int>(t));
  const double f = t - i;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                static_cast<int>(stops[i][0] + f * (stops[i + 1][0] - stops[i][0])),
                static_cast<int>(stops[i][1] + f * (stops[i + 1][1] - stops[i][1])),
                static_cast<int>(stops[i][2] + f * (stops[i + 1][2] - stops[i][2])));
  return buf;
}

}  // namespace

void write_svg_plot(const std::string& path, const PlotSpec& spec) {
  require_valid(!spec.series.empty(), "svg: no series");
  require_valid(spec.width_px >= 200 && spec.height_px >= 150,
                "svg: canvas too small");

  Axis ax, ay;
  ax.log = spec.log_x;
  ay.log = spec.log_y;
  ax.px0 = k_margin_left;
  ax.px1 = spec.width_px - k_margin_right;
  ay.px0 = spec.height_px - k_margin_bottom;  // y grows downward in SVG
  ay.px1 = k_margin_top;

  ax.begin_range();
  ay.begin_range();
  bool any = false;
  for (const PlotSeries& s : spec.series) {
    require_valid(s.x.size() == s.y.size(),
                  "svg: series x and y lengths differ");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!ax.usable(s.x[i]) || !ay.usable(s.y[i])) continue;
      ax.include(s.x[i]);
      ay.include(s.y[i]);
      any = true;
    }
  }
  require_valid(any, "svg: no drawable points in any series");
  ax.finish_range();
  ay.finish_range();

  std::ofstream out(path, std::ios::trunc);
  require_valid(out.good(), "cannot open for writing: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width_px
      << "\" height=\"" << spec.height_px << "\" viewBox=\"0 0 "
      << spec.width_px << ' ' << spec.height_px << "\">\n";
  draw_frame_and_ticks(out, ax, ay, spec);

  int palette_next = 0;
  std::vector<std::pair<std::string, std::string>> legend;  // label, color
  for (const PlotSeries& s : spec.series) {
    const std::string color =
        !s.color.empty() ? s.color : k_palette[palette_next++ % 6];
    if (!s.label.empty()) legend.emplace_back(s.label, color);

    // Project to pixels, dropping unusable points into path breaks.
    std::vector<double> px, py;
    std::vector<std::vector<std::pair<double, double>>> runs(1);
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!ax.usable(s.x[i]) || !ay.usable(s.y[i])) {
        if (!runs.back().empty()) runs.emplace_back();
        continue;
      }
      runs.back().emplace_back(ax.to_px(s.x[i]), ay.to_px(s.y[i]));
    }
    for (const auto& run : runs) {
      if (run.empty()) continue;
      px.clear();
      py.clear();
      for (const auto& [x, y] : run) {
        px.push_back(x);
        py.push_back(y);
      }
      std::vector<std::size_t> keep;
      if (px.size() > 2 * static_cast<std::size_t>(ax.px1 - ax.px0)) {
        keep = decimate(px, py, 1.0);
      } else {
        keep.resize(px.size());
        for (std::size_t i = 0; i < px.size(); ++i) keep[i] = i;
      }
      out << "<path d=\"";
      for (std::size_t k = 0; k < keep.size(); ++k)
        out << (k == 0 ? 'M' : 'L') << num(px[keep[k]]) << ' '
            << num(py[keep[k]]);
      out << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.3\"";
      if (s.dashed) out << " stroke-dasharray=\"6 4\"";
      out << "/>\n";
    }
  }

  for (const PlotMarker& m : spec.markers) {
    if (!ax.usable(m.x) || !ay.usable(m.y)) continue;
    const double x = ax.to_px(m.x);
    const double y = ay.to_px(m.y);
    out << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y)
        << "\" r=\"3\" fill=\"#111\"/>\n";
    if (!m.text.empty())
      out << "<text x=\"" << num(x) << "\" y=\"" << num(y - 7.0)
          << "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#111\">"
          << escape_text(m.text) << "</text>\n";
  }

  for (std::size_t i = 0; i < legend.size(); ++i) {
    const double y = k_margin_top + 14.0 + 16.0 * static_cast<double>(i);
    const double x = ax.px1 - 150.0;
    out << "<line x1=\"" << num(x) << "\" y1=\"" << num(y - 4.0)
        << "\" x2=\"" << num(x + 22.0) << "\" y2=\"" << num(y - 4.0)
        << "\" stroke=\"" << legend[i].second << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << num(x + 28.0) << "\" y=\"" << num(y)
        << "\" font-size=\"11\" fill=\"#111\">" << escape_text(legend[i].first)
        << "</text>\n";
  }

  out << "</svg>\n";
  require_valid(out.good(), "write failed: " + path);
}

void write_svg_heatmap(const std::string& path, const HeatMapSpec& spec) {
  require_valid(!spec.x.empty() && !spec.y.empty(), "svg: empty grid");
  require_valid(spec.value.size() == spec.x.size() * spec.y.size(),
                "svg: value count must equal grid size");
  require_valid(spec.width_px >= 200 && spec.height_px >= 150,
                "svg: canvas too small");

  double vlo = std::numeric_limits<double>::infinity();
  double vhi = -vlo;
  for (double v : spec.value)
    if (std::isfinite(v)) {
      vlo = std::min(vlo, v);
      vhi = std::max(vhi, v);
    }
  require_valid(vlo <= vhi, "svg: no finite values");
  if (vlo == vhi) vhi = vlo + 1.0;

  const double px0 = k_margin_left;
  const double px1 = spec.width_px - k_margin_right;
  const double py0 = spec.height_px - k_margin_bottom;
  const double py1 = k_margin_top;
  const double cw = (px1 - px0) / static_cast<double>(spec.x.size());
  const double ch = (py0 - py1) / static_cast<double>(spec.y.size());

  std::ofstream out(path, std::ios::trunc);
  require_valid(out.good(), "cannot open for writing: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width_px
      << "\" height=\"" << spec.height_px << "\" viewBox=\"0 0 "
      << spec.width_px << ' ' << spec.height_px << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << spec.width_px << "\" height=\""
      << spec.height_px << "\" fill=\"white\"/>\n";

  for (std::size_t iy = 0; iy < spec.y.size(); ++iy)
    for (std::size_t ix = 0; ix < spec.x.size(); ++ix) {
      const double v = spec.value[iy * spec.x.size() + ix];
      const std::string fill =
          std::isfinite(v) ? ramp_color((v - vlo) / (vhi - vlo)) : "#ffffff";
      // Row 0 is the bottom of the plot.
      const double x = px0 + cw * static_cast<double>(ix);
      const double y = py0 - ch * static_cast<double>(iy + 1);
      out << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\""
          << num(cw + 0.5) << "\" height=\"" << num(ch + 0.5) << "\" fill=\""
          << fill << "\"/>\n";
    }

  out << "<rect x=\"" << num(px0) << "\" y=\"" << num(py1) << "\" width=\""
      << num(px1 - px0) << "\" height=\"" << num(py0 - py1)
      << "\" fill=\"none\" stroke=\"#222\" stroke-width=\"1\"/>\n";

  // Edge tick labels: first and last grid coordinates.
  out << "<text x=\"" << num(px0) << "\" y=\"" << num(py0 + 18.0)
      << "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#333\">"
      << escape_text(tick_text(spec.x.front())) << "</text>\n";
  out << "<text x=\"" << num(px1) << "\" y=\"" << num(py0 + 18.0)
      << "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#333\">"
      << escape_text(tick_text(spec.x.back())) << "</text>\n";
  out << "<text x=\"" << num(px0 - 6.0) << "\" y=\"" << num(py0)
      << "\" font-size=\"11\" text-anchor=\"end\" fill=\"#333\">"
      << escape_text(tick_text(spec.y.front())) << "</text>\n";
  out << "<text x=\"" << num(px0 - 6.0) << "\" y=\"" << num(py1 + 8.0)
      << "\" font-size=\"11\" text-anchor=\"end\" fill=\"#333\">"
      << escape_text(tick_text(spec.y.back())) << "</text>\n";

  if (spec.mark) {
    // Place the cross by linear interpolation over the cell-center grids.
    auto frac = [](const std::vector<double>& g, double v) {
      if (g.size() == 1) return 0.5;
      const double f = (v - g.front()) / (g.back() - g.front());
      return std::clamp(f, 0.0, 1.0);
    };
    const double mx =
        px0 + (frac(spec.x, spec.mark_x) * (static_cast<double>(spec.x.size()) -
                                            1.0) +
               0.5) *
                  cw;
    const double my =
        py0 - (frac(spec.y, spec.mark_y) * (static_cast<double>(spec.y.size()) -
                                            1.0) +
               0.5) *
                  ch;
    out << "<path d=\"M" << num(mx - 6.0) << ' ' << num(my) << "L"
        << num(mx + 6.0) << ' ' << num(my) << "M" << num(mx) << ' '
        << num(my - 6.0) << "L" << num(mx) << ' ' << num(my + 6.0)
        << "\" stroke=\"#ffffff\" stroke-width=\"2\" fill=\"none\"/>\n";
  }

  if (!spec.title.empty())
    out << "<text x=\"" << num(0.5 * (px0 + px1)) << "\" y=\"22\" "
        << "font-size=\"14\" text-anchor=\"middle\" fill=\"#111\">"
        << escape_text(spec.title) << "</text>\n";
  if (!spec.x_label.empty())
    out << "<text x=\"" << num(0.5 * (px0 + px1)) << "\" y=\""
        << num(spec.height_px - 14.0)
        << "\" font-size=\"12\" text-anchor=\"middle\" fill=\"#111\">"
        << escape_text(spec.x_label) << "</text>\n";
  if (!spec.y_label.empty())
    out << "<text x=\"16\" y=\"" << num(0.5 * (py0 + py1))
        << "\" font-size=\"12\" text-anchor=\"middle\" fill=\"#111\" "
        << "transform=\"rotate(-90 16 " << num(0.5 * (py0 + py1)) << ")\">"
        << escape_text(spec.y_label) << "</text>\n";

  out << "</svg>\n";
  require_valid(out.good(), "write failed: " + path);
}

}  // namespace trumpet
