#pragma once

#include <memory>
#include <string>
#include <vector>

#include "medgrad/boundary.hpp"
#include "medgrad/field.hpp"
#include "medgrad/geometry.hpp"

namespace medgrad {

/// Sorted parameters in [0, 2π) where g crosses `lam`, found by sign-change
/// bisection on a grid of `resolution` points and refined to 1e-10. A flat
/// stretch of g at the level contributes both of its ends.
/// Throws ValidationError("level outside range") unless min g < lam < max g,
/// and ValidationError("resolution too coarse") when doubling the grid
/// changes the count.
std::vector<double> level_endpoints(const BoundaryData& g, double lam, int resolution);

struct SolutionElement {
  enum class Kind { chord, boundary_arc };
  Kind kind;
  double level;
  double t_a;  // chord endpoint, or arc start
  double t_b;  // chord endpoint, or arc end (ccw from t_a)
};

struct Plateau {
  double level;
  std::vector<std::size_t> elements;  // indices into ChordSolution::elements
};

namespace detail {
struct SectorNode;

struct PolygonEdge {
  double t_a;
  double t_b;  // ccw from t_a
  std::unique_ptr<SectorNode> sector;  // null: the cap belongs to the plateau
};

struct PolygonNode {
  double level;
  std::vector<PolygonEdge> edges;  // ccw chain; closed for the seed polygon
};

struct SectorChord {
  double level;
  double t_a;
  double t_b;
};

struct SectorNode {
  double entry_level;
  int orientation;  // sign of g − entry level inside the sector
  std::vector<SectorChord> chords;  // nested caps; chords[0] is the entry edge
  std::unique_ptr<PolygonNode> child;  // branching polygon past the last chord
};
}  // namespace detail

/// Output of the chord construction: every chord joins two boundary points at
/// equal g-level; polygons at constant level become plateaus.
class ChordSolution {
 public:
  ChordSolution(Domain domain, BoundaryData g, double base_level,
                std::unique_ptr<detail::PolygonNode> root);

  double base_level() const { return base_level_; }
  const std::vector<SolutionElement>& elements() const { return elements_; }
  const std::vector<Plateau>& plateaus() const { return plateaus_; }
  const Domain& domain() const { return domain_; }
  const BoundaryData& boundary() const { return g_; }
  std::size_t chord_count() const;

  /// Level at a point of the closed domain.
  double value_at(Point2 p) const;

  /// CSV with header `kind,level,t_a,t_b`.
  std::string to_csv() const;
  /// Boundary plus chords, coloured by level.
  std::string to_svg(int pixels = 600) const;

 private:
  double polygon_value(const detail::PolygonNode& poly, Point2 p) const;
  double sector_value(const detail::SectorNode& sector, Point2 p) const;

  Domain domain_;
  BoundaryData g_;
  double base_level_;
  std::shared_ptr<const detail::PolygonNode> root_;
  std::vector<SolutionElement> elements_;
  std::vector<Plateau> plateaus_;
};

struct BuildOptions {
  double level_step_control = 1e-2;
  int resolution = 4096;
  double max_endpoint_move = 0.02;  // radians of boundary parameter per chord
};

/// Seeds with the generalized polygon at level `lam`, then sweeps each sector
/// monotonically in level, joining the two endpoints by a chord and branching
/// into a new polygon whenever a level first acquires three or more endpoints.
/// Throws ValidationError("not strictly convex") for unsuitable domains.
ChordSolution build_solution(const Domain& domain, const BoundaryData& g, double lam,
                             const BuildOptions& options = {});

/// Samples the solution on the lattice used by from_function(domain, n, ·).
/// Between two chords the level is interpolated linearly in the distances to
/// the two chord lines.
GridField rasterize(const ChordSolution& sol, int n);
GridField rasterize(const ChordSolution& sol, int nx, int ny);

/// True when two chords cross in the open domain (1e-12 guard).
bool chords_cross(const Domain& domain, const SolutionElement& a, const SolutionElement& b);

}  // namespace medgrad
