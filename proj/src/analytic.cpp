#include "medgrad/analytic.hpp"

#include <cmath>
#include <numbers>

#include "medgrad/error.hpp"

namespace medgrad {

UAlphaParams::UAlphaParams(double a) : alpha(a) {
  if (!(a > 0.0 && a < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
}

double u_alpha_eval(const UAlphaParams& params, Point2 p) {
  if (!(norm(p) <= 1.0 + 1e-12)) throw OutsideDomainError("point outside domain");
  const double a = params.alpha;
  const double ay = std::abs(p.y);
  if (ay > a) return ay;
  const double corner = std::sqrt(1.0 - a * a);
  if (ay < a && std::abs(p.x) > corner) return std::sqrt(std::max(0.0, 1.0 - p.x * p.x));
  return a;
}

double g_abs_y(double t) { return std::abs(std::sin(t)); }

double tv_u_alpha_analytic(const UAlphaParams& params) {
  const double a = params.alpha;
  return 2.0 * a * a + std::numbers::pi - 2.0 * a * std::sqrt(1.0 - a * a) - 2.0 * std::asin(a);
}

}  // namespace medgrad
