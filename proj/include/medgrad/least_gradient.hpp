#pragma once

#include <optional>
#include <string>
#include <vector>

#include "medgrad/boundary.hpp"
#include "medgrad/field.hpp"
#include "medgrad/mvp_solver.hpp"

namespace medgrad {

/// Σ over cells with four masked corners of h·|(u(i+1,j) − u(i,j), u(i,j+1) − u(i,j))|.
double discrete_tv(const GridField& field);

struct TVConfig {
  /// Non-positive steps select τ = σ = 0.99·h/√8.
  double primal_step = 0.0;
  double dual_step = 0.0;
  int max_iter = 20000;
  double gap_tol = 1e-5;
  double band = kDefaultBoundaryBand;

  /// Throws ValidationError unless τσ·8/h² ≤ 1 for the grid spacing h.
  void validate(double h) const;
};

struct TVResult {
  GridField field;
  int iterations = 0;
  double tv = 0.0;
  bool converged = false;
  double last_relative_change = 0.0;
  std::string diagnostic;
  std::vector<std::pair<int, double>> tv_history;  // every 100 iterations
};

/// Primal-dual (Chambolle–Pock) minimization of discrete_tv over fields
/// pinned to g within band·h of ∂Ω and kept inside [min g, max g]. Stops when
/// the relative TV change over a 100-iteration window is below gap_tol.
/// Does not throw on non-convergence; check `converged`.
TVResult minimize_tv_dirichlet(const Domain& domain, const BoundaryData& g, int n,
                               const TVConfig& config = {});

struct FieldDistance {
  double sup = 0.0;
  double l1 = 0.0;  // h²-weighted
  double l2 = 0.0;
};

/// Distances over the common mask. ValidationError("grid mismatch") unless the
/// grids and masks agree.
FieldDistance compare_fields(const GridField& a, const GridField& b);

struct ConjectureConfig {
  /// Levels for the chord construction. Empty selects 9 evenly spaced
  /// interior levels of g's range; a non-empty list is used as given.
  std::vector<double> lambdas;
  std::vector<SeedKind> solver_seeds{SeedKind::constant_mean};
  SolverConfig solver;
  TVConfig tv;
  double center_spacing = 0.25;
  int radii_per_center = 12;
  double threshold_cells = 3.0;  // global filter passes at ≤ threshold_cells·h
  double match_tol = 0.05;       // survivor vs TV minimizer, sup-norm
};

struct ConjectureCandidate {
  std::string name;
  std::string source;  // "construction" or "solver"
  double lambda = 0.0;  // construction level, NaN for solver candidates
  GridField field;
  double global_residual = 0.0;
  double tv = 0.0;
  double dist_sup_to_ustar = 0.0;
  bool survives = false;
};

struct ConjectureReport {
  GridField ustar;
  double ustar_tv = 0.0;
  bool ustar_converged = false;
  std::vector<ConjectureCandidate> candidates;
  double threshold = 0.0;
  double match_tol = 0.0;

  std::vector<std::size_t> survivors() const;
  /// Survivors among the construction candidates only.
  std::vector<std::size_t> construction_survivors() const;
  /// CSV with header `candidate,source,global_residual,tv,dist_sup_to_ustar`.
  std::string to_csv() const;
  /// Human-readable summary ending with the conclusion line.
  std::string summary() const;
};

inline constexpr const char* kUniquenessCaveat =
    "Sampling finitely many candidates cannot certify uniqueness: this report is evidence, "
    "not proof.";

/// Compares candidate global median-value solutions (chord constructions over
/// a level grid and fixed-point limits over a seed set, filtered by
/// verify_global) with the discrete least-gradient field.
ConjectureReport conjecture_report(const Domain& domain, const BoundaryData& g, int n,
                                   const ConjectureConfig& config = {});

}  // namespace medgrad
