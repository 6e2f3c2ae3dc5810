#include "medgrad/median.hpp"

#include <numeric>

namespace medgrad {

double median_in_place(std::span<double> values) {
  const std::size_t n = values.size();
  if (n == 0) throw ValidationError("empty sample set");
  const std::size_t mid = n / 2;
  auto upper = values.begin() + static_cast<std::ptrdiff_t>(mid);
  std::nth_element(values.begin(), upper, values.end());
  if (n % 2 == 1) return *upper;
  // nth_element leaves every element of [begin, upper) <= *upper.
  const double lower = *std::max_element(values.begin(), upper);
  return 0.5 * (lower + *upper);
}

double median_samples(std::span<const double> values) {
  std::vector<double> copy(values.begin(), values.end());
  return median_in_place(copy);
}

double variational_certificate(std::span<const double> values, double m) {
  if (values.empty()) throw ValidationError("empty sample set");
  double sum = 0.0;
  for (double v : values) sum += std::abs(v - m);
  return sum / static_cast<double>(values.size());
}

int default_sample_count(double radius, double h) {
  const double n = std::ceil(8.0 * kTwoPi * radius / h);
  const int count = std::max(64, static_cast<int>(std::min(n, 1e8)));
  // Even counts keep antipodal pairs, which makes affine data exact.
  return count + (count & 1);
}

}  // namespace medgrad
