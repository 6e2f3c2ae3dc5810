#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "medgrad/error.hpp"
#include "medgrad/geometry.hpp"

namespace medgrad {

/// Median of equally weighted samples: the central order statistic for odd
/// counts, the midpoint of the two central ones for even counts. Reorders
/// `values`. Expected linear time (nth_element).
double median_in_place(std::span<double> values);

/// Same as median_in_place on a copy. Throws ValidationError on empty input.
double median_samples(std::span<const double> values);

/// Mean absolute deviation of the samples from m; minimized by the median.
double variational_certificate(std::span<const double> values, double m);

/// Default circle sample count for a consumer grid of spacing h:
/// max(64, ceil(8·2πr/h)), rounded up to an even count.
int default_sample_count(double radius, double h);

/// Median of f over the angle-uniform samples of the circle.
/// f must be callable as double(Point2); exceptions from f propagate.
template <class F>
double median_on_circle(F&& f, const CircleSpec& spec) {
  if (spec.sample_count < 8) throw ValidationError("circle needs at least 8 samples");
  const auto& tab = unit_circle_table(spec.sample_count);
  std::vector<double> values(static_cast<std::size_t>(spec.sample_count));
  for (int k = 0; k < spec.sample_count; ++k) {
    values[k] = f(Point2{spec.center.x + spec.radius * tab.cos[k],
                         spec.center.y + spec.radius * tab.sin[k]});
  }
  return median_in_place(values);
}

}  // namespace medgrad
