#pragma once

// Minimal self-contained SVG line plots: axes box, min/max labels, polylines,
// horizontal level segments. Enough to eyeball an analysis without a plotting
// stack; serious plots should consume the CSVs.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace svgplot {

struct Series {
  std::vector<double> x, y;
  std::string color = "steelblue";
  bool dashed = false;
};

struct LevelSegment {
  double x_lo, x_hi, y;
};

struct Panel {
  std::string title;
  std::vector<Series> series;
  std::vector<LevelSegment> levels;
};

namespace detail {

struct Box {
  double xmin, xmax, ymin, ymax;
};

inline Box bounds(const Panel& p) {
  Box b{0, 1, 0, 1};
  bool first = true;
  auto eat = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return;
    if (first) {
      b = {x, x, y, y};
      first = false;
    } else {
      b.xmin = std::min(b.xmin, x);
      b.xmax = std::max(b.xmax, x);
      b.ymin = std::min(b.ymin, y);
      b.ymax = std::max(b.ymax, y);
    }
  };
  for (const auto& s : p.series)
    for (size_t i = 0; i < s.x.size(); ++i) eat(s.x[i], s.y[i]);
  for (const auto& l : p.levels) {
    eat(l.x_lo, l.y);
    eat(l.x_hi, l.y);
  }
  if (b.xmax == b.xmin) b.xmax = b.xmin + 1;
  if (b.ymax == b.ymin) b.ymax = b.ymin + 1;
  const double pad = 0.05 * (b.ymax - b.ymin);
  b.ymin -= pad;
  b.ymax += pad;
  return b;
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

} // namespace detail

/// Render the panels stacked vertically into one SVG document.
inline void render(std::ostream& os, const std::vector<Panel>& panels, int width = 720,
                   int panel_height = 320) {
  const int margin_l = 64, margin_r = 16, margin_t = 28, margin_b = 36;
  const int total_h = panel_height * int(panels.size());
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << total_h
     << "\" viewBox=\"0 0 " << width << " " << total_h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (size_t pi = 0; pi < panels.size(); ++pi) {
    const Panel& p = panels[pi];
    const auto b = detail::bounds(p);
    const double top = double(pi) * panel_height;
    const double plot_w = width - margin_l - margin_r;
    const double plot_h = panel_height - margin_t - margin_b;
    auto px = [&](double x) { return margin_l + (x - b.xmin) / (b.xmax - b.xmin) * plot_w; };
    auto py = [&](double y) {
      return top + margin_t + (b.ymax - y) / (b.ymax - b.ymin) * plot_h;
    };

    os << "<text x=\"" << margin_l << "\" y=\"" << top + 18
       << "\" font-family=\"sans-serif\" font-size=\"13\">" << p.title << "</text>\n";
    os << "<rect x=\"" << margin_l << "\" y=\"" << top + margin_t << "\" width=\"" << plot_w
       << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#888\"/>\n";

    // corner labels
    os << "<text x=\"" << margin_l << "\" y=\"" << top + panel_height - 12
       << "\" font-family=\"sans-serif\" font-size=\"10\">" << detail::fmt(b.xmin) << "</text>\n";
    os << "<text x=\"" << margin_l + plot_w - 40 << "\" y=\"" << top + panel_height - 12
       << "\" font-family=\"sans-serif\" font-size=\"10\">" << detail::fmt(b.xmax) << "</text>\n";
    os << "<text x=\"4\" y=\"" << py(b.ymax) + 10
       << "\" font-family=\"sans-serif\" font-size=\"10\">" << detail::fmt(b.ymax) << "</text>\n";
    os << "<text x=\"4\" y=\"" << py(b.ymin)
       << "\" font-family=\"sans-serif\" font-size=\"10\">" << detail::fmt(b.ymin) << "</text>\n";

    for (const auto& s : p.series) {
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.4\"";
      if (s.dashed) os << " stroke-dasharray=\"5,3\"";
      os << " points=\"";
      for (size_t i = 0; i < s.x.size(); ++i) {
        if (i) os << ' ';
        os << detail::fmt(px(s.x[i])) << ',' << detail::fmt(py(s.y[i]));
      }
      os << "\"/>\n";
    }
    for (const auto& l : p.levels) {
      os << "<line x1=\"" << detail::fmt(px(l.x_lo)) << "\" y1=\"" << detail::fmt(py(l.y))
         << "\" x2=\"" << detail::fmt(px(l.x_hi)) << "\" y2=\"" << detail::fmt(py(l.y))
         << "\" stroke=\"firebrick\" stroke-width=\"1.1\"/>\n";
    }
  }
  os << "</svg>\n";
}

} // namespace svgplot
