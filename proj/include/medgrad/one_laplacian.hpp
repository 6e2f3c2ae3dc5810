#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "medgrad/field.hpp"
#include "medgrad/geometry.hpp"

namespace medgrad {

/// Symmetric 2×2 matrix [[xx, xy], [xy, yy]].
struct Sym2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
};

/// A C² test function with analytic or central-difference derivatives.
class SmoothTestFunction {
 public:
  using Value = std::function<double(Point2)>;
  using Gradient = std::function<Point2(Point2)>;
  using Hessian = std::function<Sym2(Point2)>;

  /// Derivatives by central differences with step `hd`.
  explicit SmoothTestFunction(Value f, double hd = 1e-4);
  /// Analytic derivatives, checked against central differences at random
  /// probes in `probe_box` (ValidationError on mismatch).
  SmoothTestFunction(Value f, Gradient grad, Hessian hess, BBox probe_box = {-1, 1, -1, 1},
                     double hd = 1e-4);

  double operator()(Point2 p) const { return f_(p); }
  Point2 gradient(Point2 p) const;
  Sym2 hessian(Point2 p) const;

  /// Quadratic q + ℓ·(p − x0) + ½ (p − x0)ᵀ M (p − x0) with exact derivatives.
  static SmoothTestFunction quadratic(Point2 x0, double q, Point2 l, Sym2 m);

 private:
  Value f_;
  std::optional<Gradient> grad_;
  std::optional<Hessian> hess_;
  double hd_;
};

inline constexpr double kDefaultGradEps = 1e-8;

/// Δ₁φ = Δφ − ⟨D²φ Dφ, Dφ⟩ / |Dφ|². Throws ValidationError
/// ("vanishing gradient: Δ₁ undefined here") when |Dφ(p)| ≤ grad_eps.
double delta1(const SmoothTestFunction& phi, Point2 p, double grad_eps = kDefaultGradEps);
double delta1(Point2 grad, Sym2 hess, double grad_eps = kDefaultGradEps);

struct ExpansionResidual {
  double lhs;  // φ(p) − median of φ over the circle
  double rhs;  // −(r²/2) Δ₁φ(p)
  double normalized() const;  // |lhs − rhs| / (r²/2)
  double r;
};

/// Compares the circle-median defect with its second-order prediction.
/// Requires n ≥ 1024.
ExpansionResidual expansion_residual(const SmoothTestFunction& phi, Point2 p, double r, int n,
                                     double grad_eps = kDefaultGradEps);

struct TouchTrial {
  int trial;
  Point2 x0;
  int side;  // +1 touching from below (supersolution test), −1 from above
  double delta1;
  bool admissible;
  bool violation;
};

struct ViscosityReport {
  std::vector<TouchTrial> trials;
  std::size_t admissible = 0;
  std::size_t violations = 0;
  std::size_t inadmissible = 0;
  double tol = 0.0;

  /// CSV with header `trial,x0x,x0y,side,delta1,admissible,violation`.
  std::string to_csv() const;
};

struct ViscosityOptions {
  double tol = -1.0;           // negative: 10·h
  double disk_cells = 6.0;     // strict touching checked on nodes within this many h
  double band = kDefaultBoundaryBand;
};

/// Random quadratic touches from below and from above at random interior
/// nodes. From below an admissible touch must have −Δ₁φ(x0) ≥ −tol; from
/// above, −Δ₁φ(x0) ≤ tol. Each trial draws from its own stream derived from
/// (seed, trial), so the report does not depend on the thread count.
ViscosityReport viscosity_touch_scan(const GridField& u, int trials, std::uint64_t seed,
                                     const ViscosityOptions& options = {});

}  // namespace medgrad
