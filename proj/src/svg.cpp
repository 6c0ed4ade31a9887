#include "susteer/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace susteer {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void widen(double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  void pad() {
    if (!(lo < hi)) {
      lo -= 1.0;
      hi += 1.0;
    } else {
      const double p = 0.05 * (hi - lo);
      lo -= p;
      hi += p;
    }
  }
};

}  // namespace

std::string render_svg(const std::vector<PlotPanel>& panels, int width, int panel_height) {
  const int total_h = panel_height * static_cast<int>(panels.size());
  const double ml = 64, mr = 16, mt = 34, mb = 44;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << total_h
     << "\" viewBox=\"0 0 " << width << " " << total_h << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (size_t p = 0; p < panels.size(); ++p) {
    const PlotPanel& panel = panels[p];
    const double y0 = static_cast<double>(p) * panel_height;
    Range rx, ry;
    for (const auto& s : panel.series) {
      for (double v : s.x) rx.widen(v);
      for (double v : s.y) ry.widen(v);
    }
    rx.pad();
    ry.pad();
    const double pw = width - ml - mr;
    const double ph = panel_height - mt - mb;
    auto sx = [&](double v) { return ml + pw * (v - rx.lo) / (rx.hi - rx.lo); };
    auto sy = [&](double v) { return y0 + mt + ph * (1.0 - (v - ry.lo) / (ry.hi - ry.lo)); };

    os << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<text x=\"" << ml << "\" y=\"" << fmt(y0 + 18) << "\" font-size=\"14\">" << panel.title
       << "</text>\n";
    // frame
    os << "<rect x=\"" << fmt(ml) << "\" y=\"" << fmt(y0 + mt) << "\" width=\"" << fmt(pw)
       << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";
    // ticks
    for (int k = 0; k <= 5; ++k) {
      const double fx = rx.lo + (rx.hi - rx.lo) * k / 5.0;
      const double fy = ry.lo + (ry.hi - ry.lo) * k / 5.0;
      os << "<line x1=\"" << fmt(sx(fx)) << "\" y1=\"" << fmt(y0 + mt + ph) << "\" x2=\"" << fmt(sx(fx))
         << "\" y2=\"" << fmt(y0 + mt + ph + 4) << "\" stroke=\"#444\"/>\n";
      os << "<text x=\"" << fmt(sx(fx)) << "\" y=\"" << fmt(y0 + mt + ph + 18)
         << "\" text-anchor=\"middle\">" << fmt(fx) << "</text>\n";
      os << "<line x1=\"" << fmt(ml - 4) << "\" y1=\"" << fmt(sy(fy)) << "\" x2=\"" << fmt(ml)
         << "\" y2=\"" << fmt(sy(fy)) << "\" stroke=\"#444\"/>\n";
      os << "<text x=\"" << fmt(ml - 7) << "\" y=\"" << fmt(sy(fy) + 4)
         << "\" text-anchor=\"end\">" << fmt(fy) << "</text>\n";
    }
    os << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << fmt(y0 + panel_height - 8)
       << "\" text-anchor=\"middle\">" << panel.x_label << "</text>\n";
    os << "<text x=\"14\" y=\"" << fmt(y0 + mt + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
       << fmt(y0 + mt + ph / 2) << ")\">" << panel.y_label << "</text>\n";

    double lx = ml + 8;
    for (const auto& s : panel.series) {
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
      const size_t stride = std::max<size_t>(1, s.x.size() / 4000);
      for (size_t i = 0; i < s.x.size(); i += stride) {
        os << fmt(sx(s.x[i])) << "," << fmt(sy(s.y[i])) << " ";
      }
      if (!s.x.empty() && (s.x.size() - 1) % stride != 0) {
        os << fmt(sx(s.x.back())) << "," << fmt(sy(s.y.back()));
      }
      os << "\"/>\n";
      if (!s.label.empty()) {
        os << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(y0 + mt + 10) << "\" x2=\"" << fmt(lx + 18)
           << "\" y2=\"" << fmt(y0 + mt + 10) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << fmt(lx + 22) << "\" y=\"" << fmt(y0 + mt + 14) << "\">" << s.label
           << "</text>\n";
        lx += 22 + 10 * static_cast<double>(s.label.size()) + 14;
      }
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace susteer
