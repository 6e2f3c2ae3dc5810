#pragma once

#include "medgrad/geometry.hpp"

namespace medgrad {

/// Parameter of the plateau family on the unit disk with trace |y|.
struct UAlphaParams {
  double alpha;

  /// Throws ValidationError unless 0 < alpha < 1.
  explicit UAlphaParams(double a);
};

/// Member of the family with boundary values |y| on the unit circle:
///   |y|          when |y| > α,
///   √(1 − x²)    when |y| < α and |x| > √(1 − α²),
///   α            otherwise (ties go to the plateau).
/// Throws OutsideDomainError for points outside the closed unit disk.
double u_alpha_eval(const UAlphaParams& params, Point2 p);

/// |sin t|: the trace of |y| on the unit circle.
double g_abs_y(double t);

/// Total variation of u_α by the coarea formula:
///   2α² + π − 2α√(1 − α²) − 2 arcsin α.
double tv_u_alpha_analytic(const UAlphaParams& params);

}  // namespace medgrad
