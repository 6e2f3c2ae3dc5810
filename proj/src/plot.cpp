#include "medgrad/plot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "medgrad/contour.hpp"

namespace medgrad {

std::vector<double> even_levels(const GridField& field, int count) {
  const auto [lo, hi] = field.range();
  std::vector<double> out;
  for (int k = 1; k <= count; ++k) out.push_back(lo + (hi - lo) * k / (count + 1));
  return out;
}

std::string contour_svg(const GridField& field, const std::vector<double>& levels, int pixels) {
  const BBox& b = field.bbox();
  const double span = std::max(b.xmax - b.xmin, b.ymax - b.ymin);
  const double scale = (pixels - 20) / span;
  auto sx = [&](double x) { return 10.0 + (x - b.xmin) * scale; };
  auto sy = [&](double y) { return 10.0 + (b.ymax - y) * scale; };
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pixels << "\" height=\""
      << pixels << "\">\n<polygon fill=\"none\" stroke=\"black\" points=\"";
  for (int i = 0; i < 720; ++i) {
    const Point2 q = field.domain().boundary_point(kTwoPi * i / 720);
    out << sx(q.x) << ',' << sy(q.y) << ' ';
  }
  out << "\"/>\n";
  const double lo = levels.empty() ? 0.0 : *std::min_element(levels.begin(), levels.end());
  const double hi = levels.empty() ? 1.0 : *std::max_element(levels.begin(), levels.end());
  for (double level : levels) {
    const double f = hi > lo ? (level - lo) / (hi - lo) : 0.5;
    const int red = static_cast<int>(std::lround(255 * f));
    for (const auto& line : extract_contours(field, level)) {
      out << "<polyline fill=\"none\" stroke=\"rgb(" << red << ",0," << 255 - red
          << ")\" stroke-width=\"1\" points=\"";
      for (const auto& p : line.points) out << sx(p.x) << ',' << sy(p.y) << ' ';
      out << "\"/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

std::string heatmap_pgm(const GridField& field) {
  const auto [lo, hi] = field.range();
  std::ostringstream out;
  out << "P5\n" << field.nx() << ' ' << field.ny() << "\n255\n";
  for (int j = field.ny() - 1; j >= 0; --j) {
    for (int i = 0; i < field.nx(); ++i) {
      const std::size_t k = field.index(i, j);
      unsigned char px = 0;
      if (field.masked(k)) {
        const double f = hi > lo ? (field.value(k) - lo) / (hi - lo) : 0.5;
        px = static_cast<unsigned char>(16 + std::lround(239 * std::clamp(f, 0.0, 1.0)));
      }
      out.put(static_cast<char>(px));
    }
  }
  return out.str();
}

}  // namespace medgrad
