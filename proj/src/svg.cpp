#include "harmex/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace harmex::svg {

namespace {

constexpr double kWidth = 720.0, kHeight = 480.0;
constexpr double kLeft = 72.0, kRight = 24.0, kTop = 44.0, kBottom = 56.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                          "#9467bd", "#8c564b", "#e377c2"};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string escape(const std::string& s) {
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

struct Axis {
  bool log = false;
  double lo = 0.0, hi = 1.0;  // transformed bounds

  double transform(double v) const {
    if (!log) return v;
    if (!(v > 0.0))
      throw std::invalid_argument("log axis requires positive data");
    return std::log10(v);
  }
  double back(double u) const { return log ? std::pow(10.0, u) : u; }
  void fit(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
};

}  // namespace

std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label,
                       const std::vector<Series>& series, bool log_x,
                       bool log_y) {
  Axis ax{log_x, 1e300, -1e300}, ay{log_y, 1e300, -1e300};
  for (const Series& s : series)
    for (auto [x, y] : s.pts) {
      ax.fit(ax.transform(x));
      ay.fit(ay.transform(y));
    }
  if (ax.lo > ax.hi) {
    ax.lo = 0.0;
    ax.hi = 1.0;
  }
  if (ay.lo > ay.hi) {
    ay.lo = 0.0;
    ay.hi = 1.0;
  }
  auto pad = [](Axis& a) {
    double span = a.hi - a.lo;
    if (span <= 0.0) span = std::max(1.0, std::abs(a.lo));
    a.lo -= 0.05 * span;
    a.hi += 0.05 * span;
  };
  pad(ax);
  pad(ay);

  const double px0 = kLeft, px1 = kWidth - kRight;
  const double py0 = kHeight - kBottom, py1 = kTop;
  auto sx = [&](double v) {
    return px0 + (ax.transform(v) - ax.lo) / (ax.hi - ax.lo) * (px1 - px0);
  };
  auto sy = [&](double v) {
    return py0 + (ay.transform(v) - ay.lo) / (ay.hi - ay.lo) * (py1 - py0);
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" "
        "height=\"480\" viewBox=\"0 0 720 480\">\n"
     << "<rect width=\"720\" height=\"480\" fill=\"white\"/>\n"
     << "<text x=\"360\" y=\"24\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"15\">"
     << escape(title) << "</text>\n";

  // frame
  os << "<rect x=\"" << fmt("%.1f", px0) << "\" y=\"" << fmt("%.1f", py1)
     << "\" width=\"" << fmt("%.1f", px1 - px0) << "\" height=\""
     << fmt("%.1f", py0 - py1)
     << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";

  // ticks: 5 per axis, uniform in transformed coordinates
  for (int i = 0; i <= 4; ++i) {
    double ux = ax.lo + (ax.hi - ax.lo) * i / 4.0;
    double uy = ay.lo + (ay.hi - ay.lo) * i / 4.0;
    double X = px0 + (px1 - px0) * i / 4.0;
    double Y = py0 + (py1 - py0) * i / 4.0;
    os << "<line x1=\"" << fmt("%.1f", X) << "\" y1=\"" << fmt("%.1f", py0)
       << "\" x2=\"" << fmt("%.1f", X) << "\" y2=\"" << fmt("%.1f", py0 + 5)
       << "\" stroke=\"#444444\"/>\n"
       << "<text x=\"" << fmt("%.1f", X) << "\" y=\"" << fmt("%.1f", py0 + 18)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"11\">"
       << fmt("%.3g", ax.back(ux)) << "</text>\n"
       << "<line x1=\"" << fmt("%.1f", px0 - 5) << "\" y1=\"" << fmt("%.1f", Y)
       << "\" x2=\"" << fmt("%.1f", px0) << "\" y2=\"" << fmt("%.1f", Y)
       << "\" stroke=\"#444444\"/>\n"
       << "<text x=\"" << fmt("%.1f", px0 - 8) << "\" y=\""
       << fmt("%.1f", Y + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
       << fmt("%.3g", ay.back(uy)) << "</text>\n";
  }
  os << "<text x=\"" << fmt("%.1f", 0.5 * (px0 + px1)) << "\" y=\""
     << fmt("%.1f", kHeight - 14)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"13\">"
     << escape(x_label) << "</text>\n"
     << "<text x=\"18\" y=\"" << fmt("%.1f", 0.5 * (py0 + py1))
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"13\" transform=\"rotate(-90 18 "
     << fmt("%.1f", 0.5 * (py0 + py1)) << ")\">" << escape(y_label)
     << "</text>\n";

  for (size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    std::string color =
        s.color.empty() ? kPalette[k % (sizeof kPalette / sizeof *kPalette)]
                        : s.color;
    if (s.pts.size() >= 2) {
      os << "<polyline fill=\"none\" stroke=\"" << color
         << "\" stroke-width=\"1.6\"";
      if (s.dashed) os << " stroke-dasharray=\"6 4\"";
      os << " points=\"";
      for (auto [x, y] : s.pts)
        os << fmt("%.2f", sx(x)) << ',' << fmt("%.2f", sy(y)) << ' ';
      os << "\"/>\n";
    }
    if (s.markers || s.pts.size() == 1)
      for (auto [x, y] : s.pts)
        os << "<circle cx=\"" << fmt("%.2f", sx(x)) << "\" cy=\""
           << fmt("%.2f", sy(y)) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    // legend, one row per series
    double ly = py1 + 14.0 + 16.0 * double(k);
    os << "<line x1=\"" << fmt("%.1f", px1 - 150) << "\" y1=\""
       << fmt("%.1f", ly - 4) << "\" x2=\"" << fmt("%.1f", px1 - 126)
       << "\" y2=\"" << fmt("%.1f", ly - 4) << "\" stroke=\"" << color
       << "\" stroke-width=\"1.6\"";
    if (s.dashed) os << " stroke-dasharray=\"6 4\"";
    os << "/>\n<text x=\"" << fmt("%.1f", px1 - 120) << "\" y=\""
       << fmt("%.1f", ly)
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace harmex::svg
