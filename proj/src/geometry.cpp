#include "medgrad/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <sstream>

#include "medgrad/error.hpp"
#include "medgrad/format.hpp"

namespace medgrad {

namespace {

constexpr double kTurnEps = 1e-12;

bool finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

bool segments_cross(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 &&
         d3 != 0 && d4 != 0;
}

}  // namespace

double segment_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double s = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + s * ab);
}

double wrap_angle(double t) {
  double w = std::fmod(t, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

Domain Domain::disk(Point2 center, double radius) {
  if (!finite(center) || !std::isfinite(radius) || radius <= 0.0) {
    throw ValidationError("disk radius must be positive and finite");
  }
  return Domain(Disk{center, radius});
}

Domain Domain::polygon(std::vector<Point2> vertices, bool allow_nonconvex) {
  const std::size_t n = vertices.size();
  if (n < 3) throw ValidationError("polygon needs at least 3 vertices");
  for (const auto& v : vertices) {
    if (!finite(v)) throw ValidationError("polygon vertex is not finite");
  }
  double area2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) area2 += cross(vertices[i], vertices[(i + 1) % n]);
  if (area2 <= 0.0) throw ValidationError("polygon vertices must be counterclockwise");

  bool convex = true;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 e0 = vertices[(i + 1) % n] - vertices[i];
    const Point2 e1 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
    const double len = norm(e0) * norm(e1);
    if (len == 0.0) throw ValidationError("polygon has repeated vertices");
    const double turn = cross(e0, e1) / len;
    if (std::abs(turn) <= kTurnEps) throw ValidationError("polygon has collinear vertices");
    if (turn < 0.0) convex = false;
  }
  if (!convex) {
    if (!allow_nonconvex) throw ValidationError("not strictly convex");
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 2; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;
        if (segments_cross(vertices[i], vertices[(i + 1) % n], vertices[j],
                           vertices[(j + 1) % n])) {
          throw ValidationError("polygon is not simple");
        }
      }
    }
  }

  Polygon poly;
  poly.convex = convex;
  poly.cumulative.assign(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    poly.cumulative[i + 1] = poly.cumulative[i] + distance(vertices[i], vertices[(i + 1) % n]);
  }
  poly.vertices = std::move(vertices);
  return Domain(std::move(poly));
}

Domain Domain::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string kind;
  in >> kind;
  std::vector<double> nums;
  std::string tok;
  while (in >> tok) {
    if (tok.starts_with('#')) break;
    nums.push_back(parse_double(tok));
  }
  if (kind == "disk") {
    if (nums.size() != 3) throw ValidationError("disk needs cx cy r");
    return disk({nums[0], nums[1]}, nums[2]);
  }
  if (kind == "poly") {
    if (nums.size() < 6 || nums.size() % 2 != 0) {
      throw ValidationError("poly needs an even number (>= 6) of coordinates");
    }
    std::vector<Point2> verts;
    for (std::size_t i = 0; i < nums.size(); i += 2) verts.push_back({nums[i], nums[i + 1]});
    return polygon(std::move(verts), /*allow_nonconvex=*/true);
  }
  throw ValidationError("unknown domain kind '" + kind + "'");
}

std::string Domain::serialize() const {
  std::string out;
  if (is_disk()) {
    const auto& d = as_disk();
    out = "disk " + format_double(d.center.x) + " " + format_double(d.center.y) + " " +
          format_double(d.radius);
  } else {
    out = "poly";
    for (const auto& v : as_polygon().vertices) {
      out += " " + format_double(v.x) + " " + format_double(v.y);
    }
  }
  return out;
}

bool Domain::strictly_convex() const { return is_disk() || as_polygon().convex; }

double Domain::boundary_length() const {
  if (is_disk()) return kTwoPi * as_disk().radius;
  return as_polygon().cumulative.back();
}

BBox Domain::bbox() const {
  if (is_disk()) {
    const auto& d = as_disk();
    return {d.center.x - d.radius, d.center.x + d.radius, d.center.y - d.radius,
            d.center.y + d.radius};
  }
  const auto& v = as_polygon().vertices;
  BBox b{v[0].x, v[0].x, v[0].y, v[0].y};
  for (const auto& p : v) {
    b.xmin = std::min(b.xmin, p.x);
    b.xmax = std::max(b.xmax, p.x);
    b.ymin = std::min(b.ymin, p.y);
    b.ymax = std::max(b.ymax, p.y);
  }
  return b;
}

double Domain::diameter() const {
  if (is_disk()) return 2.0 * as_disk().radius;
  const auto& v = as_polygon().vertices;
  double best = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) best = std::max(best, distance(v[i], v[j]));
  }
  return best;
}

double Domain::signed_distance(Point2 p) const {
  if (is_disk()) {
    const auto& d = as_disk();
    return d.radius - distance(p, d.center);
  }
  const auto& v = as_polygon().vertices;
  const std::size_t n = v.size();
  double dmin = std::numeric_limits<double>::infinity();
  // Winding number handles the non-convex case as well.
  int winding = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = v[i];
    const Point2 b = v[(i + 1) % n];
    dmin = std::min(dmin, segment_distance(p, a, b));
    if (a.y <= p.y) {
      if (b.y > p.y && cross(b - a, p - a) > 0) ++winding;
    } else {
      if (b.y <= p.y && cross(b - a, p - a) < 0) --winding;
    }
  }
  if (dmin == 0.0) return 0.0;
  return winding != 0 ? dmin : -dmin;
}

Point2 Domain::boundary_point(double t) const {
  const double w = wrap_angle(t);
  if (is_disk()) {
    const auto& d = as_disk();
    return {d.center.x + d.radius * std::cos(w), d.center.y + d.radius * std::sin(w)};
  }
  const auto& poly = as_polygon();
  const double s = w / kTwoPi * poly.cumulative.back();
  const auto it = std::upper_bound(poly.cumulative.begin(), poly.cumulative.end(), s);
  std::size_t i = static_cast<std::size_t>(std::distance(poly.cumulative.begin(), it));
  i = std::clamp<std::size_t>(i, 1, poly.vertices.size()) - 1;
  const double len = poly.cumulative[i + 1] - poly.cumulative[i];
  const double f = (s - poly.cumulative[i]) / len;
  const Point2 a = poly.vertices[i];
  const Point2 b = poly.vertices[(i + 1) % poly.vertices.size()];
  return a + f * (b - a);
}

double Domain::nearest_parameter(Point2 p) const {
  if (is_disk()) {
    const auto& d = as_disk();
    return wrap_angle(std::atan2(p.y - d.center.y, p.x - d.center.x));
  }
  const auto& poly = as_polygon();
  const std::size_t n = poly.vertices.size();
  double best = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = poly.vertices[i];
    const Point2 ab = poly.vertices[(i + 1) % n] - a;
    const double f = std::clamp(dot(p - a, ab) / dot(ab, ab), 0.0, 1.0);
    const double dd = distance(p, a + f * ab);
    if (dd < best) {
      best = dd;
      best_s = poly.cumulative[i] + f * (poly.cumulative[i + 1] - poly.cumulative[i]);
    }
  }
  return wrap_angle(best_s / poly.cumulative.back() * kTwoPi);
}

double distance_to_boundary(const Domain& domain, Point2 p) { return domain.signed_distance(p); }

bool contains_ball(const Domain& domain, Point2 c, double r) {
  if (!(r > 0.0)) throw ValidationError("ball radius must be positive");
  return domain.signed_distance(c) > r;
}

Point2 boundary_point(const Domain& domain, double t) { return domain.boundary_point(t); }

std::vector<Point2> sample_circle(const CircleSpec& spec, double phase) {
  if (spec.sample_count < 8) throw ValidationError("circle needs at least 8 samples");
  if (!(spec.radius > 0.0)) throw ValidationError("circle radius must be positive");
  std::vector<Point2> pts;
  pts.reserve(static_cast<std::size_t>(spec.sample_count));
  if (phase == 0.0) {
    const auto& tab = unit_circle_table(spec.sample_count);
    for (int k = 0; k < spec.sample_count; ++k) {
      pts.push_back({spec.center.x + spec.radius * tab.cos[k],
                     spec.center.y + spec.radius * tab.sin[k]});
    }
    return pts;
  }
  for (int k = 0; k < spec.sample_count; ++k) {
    const double th = kTwoPi * k / spec.sample_count + phase;
    pts.push_back({spec.center.x + spec.radius * std::cos(th),
                   spec.center.y + spec.radius * std::sin(th)});
  }
  return pts;
}

const UnitCircleTable& unit_circle_table(int n) {
  static std::shared_mutex mutex;
  static std::map<int, std::unique_ptr<UnitCircleTable>> cache;
  {
    std::shared_lock lock(mutex);
    if (auto it = cache.find(n); it != cache.end()) return *it->second;
  }
  auto table = std::make_unique<UnitCircleTable>();
  table->cos.resize(static_cast<std::size_t>(n));
  table->sin.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double th = kTwoPi * k / n;
    table->cos[k] = std::cos(th);
    table->sin[k] = std::sin(th);
  }
  std::unique_lock lock(mutex);
  auto [it, inserted] = cache.emplace(n, std::move(table));
  return *it->second;
}

}  // namespace medgrad
