#pragma once

// Minimal SVG emission for trajectory overlays, line charts and heat maps.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "undulate/analysis.hpp"
#include "undulate/geometry.hpp"

namespace undulate::svg {

struct Style {
  std::string stroke = "black";
  double width = 1.0;
  bool dashed = false;
  double opacity = 1.0;
};

/// Plot in data coordinates; the view box is fitted to everything added,
/// with y pointing up.
class Plot {
 public:
  Plot(double width = 640, double height = 480, bool equalAxes = true)
      : width_(width), height_(height), equal_(equalAxes) {}

  void polyline(std::vector<Vec2> points, Style style) {
    for (const auto& p : points) extend(p);
    lines_.push_back({std::move(points), std::move(style)});
  }

  void title(std::string text) { title_ = std::move(text); }
  void label(Vec2 at, std::string text) {
    extend(at);
    labels_.push_back({at, std::move(text)});
  }

  void write(std::ostream& out) const {
    const double margin = 30.0;
    double sx = (width_ - 2 * margin) / std::max(maxX_ - minX_, 1e-12);
    double sy = (height_ - 2 * margin) / std::max(maxY_ - minY_, 1e-12);
    if (equal_) sx = sy = std::min(sx, sy);
    auto map = [&](const Vec2& p) {
      return Vec2(margin + (p.x() - minX_) * sx, height_ - margin - (p.y() - minY_) * sy);
    };
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\""
        << height_ << "\" viewBox=\"0 0 " << width_ << ' ' << height_ << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title_.empty())
      out << "<text x=\"" << margin << "\" y=\"18\" font-size=\"14\">" << title_ << "</text>\n";
    for (const auto& line : lines_) {
      out << "<polyline fill=\"none\" stroke=\"" << line.style.stroke << "\" stroke-width=\""
          << line.style.width << "\" stroke-opacity=\"" << line.style.opacity << "\"";
      if (line.style.dashed) out << " stroke-dasharray=\"6,4\"";
      out << " points=\"";
      for (std::size_t i = 0; i < line.points.size(); ++i) {
        const Vec2 q = map(line.points[i]);
        out << (i ? " " : "") << fmt(q.x()) << ',' << fmt(q.y());
      }
      out << "\"/>\n";
    }
    for (const auto& l : labels_) {
      const Vec2 q = map(l.at);
      out << "<text x=\"" << fmt(q.x()) << "\" y=\"" << fmt(q.y()) << "\" font-size=\"10\">"
          << l.text << "</text>\n";
    }
    out << "</svg>\n";
  }

 private:
  struct Line {
    std::vector<Vec2> points;
    Style style;
  };
  struct Label {
    Vec2 at;
    std::string text;
  };

  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
  }

  void extend(const Vec2& p) {
    minX_ = std::min(minX_, p.x());
    maxX_ = std::max(maxX_, p.x());
    minY_ = std::min(minY_, p.y());
    maxY_ = std::max(maxY_, p.y());
  }

  double width_, height_;
  bool equal_;
  double minX_ = std::numeric_limits<double>::infinity();
  double maxX_ = -std::numeric_limits<double>::infinity();
  double minY_ = std::numeric_limits<double>::infinity();
  double maxY_ = -std::numeric_limits<double>::infinity();
  std::string title_;
  std::vector<Line> lines_;
  std::vector<Label> labels_;
};

/// Diverging blue-white-red scale centered at 1 on a log axis.
inline std::string divergingColor(double value, double logSpan = std::log(2.0)) {
  const double t = std::clamp(std::log(std::max(value, 1e-300)) / logSpan, -1.0, 1.0);
  int r = 255, g = 255, b = 255;
  if (t > 0) {
    g = b = static_cast<int>(std::lround(255 * (1 - t)));
  } else {
    r = g = static_cast<int>(std::lround(255 * (1 + t)));
  }
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

/// Heat map of a square matrix with the diagonal masked in gray.
inline void heatMap(std::ostream& out, const SquareMatrix& m, const std::string& title) {
  const double cell = 32.0, margin = 40.0;
  const double size = 2 * margin + cell * static_cast<double>(m.n);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size + 20
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << margin << "\" y=\"20\" font-size=\"14\">" << title << "</text>\n";
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j) {
      const std::string fill = i == j ? "#bbbbbb" : divergingColor(m(i, j));
      out << "<rect x=\"" << margin + cell * static_cast<double>(j) << "\" y=\""
          << margin + cell * static_cast<double>(i) << "\" width=\"" << cell << "\" height=\""
          << cell << "\" fill=\"" << fill << "\"><title>" << i << "," << j << ": " << m(i, j)
          << "</title></rect>\n";
    }
  out << "</svg>\n";
}

}  // namespace undulate::svg
