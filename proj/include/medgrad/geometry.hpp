#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace medgrad {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

/// Distance from p to the closed segment [a, b].
double segment_distance(Point2 p, Point2 a, Point2 b);

/// Reduces t to [0, 2π).
double wrap_angle(double t);

struct BBox {
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
};

struct Disk {
  Point2 center;
  double radius = 1.0;
};

/// Counterclockwise simple polygon. `convex` records whether every turn is a
/// strict left turn; only convex polygons are accepted by the constructive
/// solvers.
struct Polygon {
  std::vector<Point2> vertices;
  std::vector<double> cumulative;  // arc length at each vertex, size n+1
  bool convex = true;
};

/// A planar domain: a disk or a counterclockwise polygon.
class Domain {
 public:
  static Domain disk(Point2 center, double radius);
  static Domain unit_disk() { return disk({0.0, 0.0}, 1.0); }
  /// Throws ValidationError unless the vertices form a strictly convex
  /// counterclockwise polygon (or, with allow_nonconvex, a simple ccw one).
  static Domain polygon(std::vector<Point2> vertices, bool allow_nonconvex = false);

  /// Parses `disk cx cy r` or `poly x1 y1 x2 y2 ...`.
  static Domain parse(std::string_view text);
  std::string serialize() const;

  bool is_disk() const { return std::holds_alternative<Disk>(shape_); }
  bool strictly_convex() const;
  const Disk& as_disk() const { return std::get<Disk>(shape_); }
  const Polygon& as_polygon() const { return std::get<Polygon>(shape_); }

  double boundary_length() const;
  BBox bbox() const;
  double diameter() const;

  /// Positive inside, zero on the boundary, negative outside.
  double signed_distance(Point2 p) const;
  /// Boundary point at parameter t; t ∈ [0, 2π) traverses ∂Ω once ccw,
  /// proportionally to arc length.
  Point2 boundary_point(double t) const;
  /// Parameter of the boundary point closest to p.
  double nearest_parameter(Point2 p) const;

 private:
  explicit Domain(std::variant<Disk, Polygon> shape) : shape_(std::move(shape)) {}
  std::variant<Disk, Polygon> shape_;
};

double distance_to_boundary(const Domain& domain, Point2 p);
/// True iff the closed ball B(c, r) is compactly inside the domain.
bool contains_ball(const Domain& domain, Point2 c, double r);
Point2 boundary_point(const Domain& domain, double t);

struct CircleSpec {
  Point2 center;
  double radius = 1.0;
  int sample_count = 64;
};

/// Angle-uniform samples center + r(cos θ_k, sin θ_k), θ_k = 2πk/n + phase.
std::vector<Point2> sample_circle(const CircleSpec& spec, double phase = 0.0);

/// Cached cos/sin table for n equally spaced angles starting at 0.
struct UnitCircleTable {
  std::vector<double> cos;
  std::vector<double> sin;
};
const UnitCircleTable& unit_circle_table(int n);

}  // namespace medgrad
