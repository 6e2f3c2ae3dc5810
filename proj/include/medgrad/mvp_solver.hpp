#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "medgrad/boundary.hpp"
#include "medgrad/field.hpp"

namespace medgrad {

/// R(x) = r0 for every center.
struct FixedRadius {
  double r0;
};
/// R(x) = c · distance_to_boundary(x), 0 < c ≤ 1.
struct FractionRadius {
  double c;
};

enum class SeedKind { boundary_harmonic_blend, constant_mean, provided };

struct SolverConfig {
  std::variant<FixedRadius, FractionRadius> radius_rule = FractionRadius{0.5};
  double tol = 1e-6;
  int max_iter = 10000;
  /// 0 selects default_sample_count(R, h) per center.
  int samples_per_circle = 0;
  SeedKind seed = SeedKind::constant_mean;
  std::optional<GridField> seed_field;  // used when seed == provided
  double band = kDefaultBoundaryBand;

  /// Throws ValidationError on out-of-range parameters.
  void validate() const;
};

struct ResidualSample {
  Point2 point;
  double radius;
  double residual;
};

struct ResidualReport {
  double max_residual = 0.0;
  double mean_residual = 0.0;
  Point2 worst_point;
  double worst_radius = 0.0;
  std::size_t checked_count = 0;
  std::size_t skipped_count = 0;
  std::vector<ResidualSample> per_point;  // filled only when requested

  /// CSV with header `x,y,r,residual`.
  std::string to_csv() const;
};

/// Effective local radius at a node: min(rule, d − band·h), or 0 when the
/// node is too close to the boundary to host a circle.
double effective_radius(const SolverConfig& config, double dist, double h);

/// Checks u(x) = med over ∂B(x, r) for every unpinned node x at distance at
/// least band·h from ∂Ω and r ∈ {R(x), R(x)/2, R(x)/4}.
ResidualReport local_residual(const GridField& field, const SolverConfig& config,
                              bool keep_samples = false);

struct IterationRecord {
  int iter;
  double sup_update;
  double max_residual;  // NaN when not evaluated at this iteration
};

struct SolveResult {
  GridField field;
  ResidualReport report;
  std::vector<IterationRecord> log;
  bool converged = false;
  double final_update = 0.0;
  std::string diagnostic;

  /// CSV with header `iter,sup_update,max_residual`.
  std::string log_csv() const;
};

/// Jacobi fixed-point iteration u ← med over ∂B(x, R(x)) of u at every
/// unpinned node. Converged when the sup-norm update drops below tol and the
/// local residual is below 10·tol + 2h. Does not throw on non-convergence;
/// check `converged`.
SolveResult solve_local_dirichlet(const Domain& domain, const BoundaryData& g, int n,
                                  const SolverConfig& config);

/// Same iteration on an already prepared field (mask, pinned nodes, seed
/// values). Radii come from the field's domain.
SolveResult solve_local_dirichlet(GridField prepared, const SolverConfig& config);

/// Seed values for the unpinned nodes.
GridField make_seed(const GridField& pinned_field, const BoundaryData& g, SeedKind kind);

struct CenterPlan {
  std::vector<Point2> centers;

  static CenterPlan single(Point2 c) { return {{c}}; }
  /// Masked lattice points spaced by `spacing`, always including the node
  /// nearest the domain's centroid of the box.
  static CenterPlan lattice(const GridField& field, double spacing);
};

/// Checks the median value identity on circles of geometrically spaced radii
/// from 2h up to min(max_radius, d − band·h) around each planned center.
ResidualReport verify_global(const GridField& field, const CenterPlan& plan,
                             int radii_per_center, double max_radius = 0.0,
                             double band = kDefaultBoundaryBand, bool keep_samples = false);

struct MaxPrincipleReport {
  std::size_t checked_count = 0;
  std::size_t flagged_count = 0;
  std::vector<Point2> maxima;
  std::vector<Point2> minima;
};

/// Flags interior nodes that exceed every value on the surrounding circle of
/// radius 3h by more than `strictness` (or fall below every value).
MaxPrincipleReport max_principle_check(const GridField& field, double strictness,
                                       double band = kDefaultBoundaryBand);

struct LevelComponent {
  std::vector<Point2> points;
  double deviation = 0.0;          // max perpendicular distance to the fitted line
  double start_boundary_distance;  // distance of the endpoints to ∂Ω
  double end_boundary_distance;
  bool start_truncated = false;  // endpoint created by the gradient floor
  bool end_truncated = false;
  Point2 direction;              // unit direction of the fitted line
};

struct StraightnessReport {
  double level = 0.0;
  double grad_floor = 0.0;
  std::vector<LevelComponent> components;
  double max_deviation = 0.0;
  /// Largest endpoint distance to ∂Ω over endpoints not created by the floor.
  double max_endpoint_distance = 0.0;
  std::size_t discarded_points = 0;

  bool straight(double tol) const { return max_deviation <= tol; }
  bool endpoints_on_boundary(double tol) const { return max_endpoint_distance <= tol; }
};

/// Default gradient floor: 0.5 · range / diam(Ω) · 0.1.
double default_grad_floor(const GridField& field);

/// Marching-squares level curves with low-gradient stretches removed, each
/// remaining piece fitted by a total-least-squares line. Throws
/// ValidationError("level not attained") when the contour is empty.
StraightnessReport level_set_straightness(const GridField& field, double level,
                                          double grad_floor);

}  // namespace medgrad
