#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace medgrad {

/// Dirichlet datum g as a continuous 2π-periodic function of the boundary
/// parameter. Either analytic (a named callable) or tabulated with periodic
/// linear interpolation.
class BoundaryData {
 public:
  enum class Kind { analytic, tabulated };

  static BoundaryData analytic(std::string name, std::function<double(double)> fn);
  /// `samples` are (t, value) with t strictly increasing in [0, 2π). The
  /// largest jump between neighbours (including the wrap-around) must not
  /// exceed `tol_continuity`; a negative tolerance selects the default,
  /// 10 × the median jump.
  static BoundaryData tabulated(std::vector<std::pair<double, double>> samples,
                                double tol_continuity = -1.0);

  static BoundaryData abs_sin();
  static BoundaryData sin();
  static BoundaryData constant(double c);
  /// a·cos t + b·sin t + c; the trace of an affine function on the unit circle.
  static BoundaryData affine(double a, double b, double c);

  /// Registry lookup: `abs-sin`, `sin`, `const:<c>`, `affine:<a>,<b>,<c>`,
  /// `file:<path>` (CSV with `t,value` rows).
  static BoundaryData from_name(std::string_view spec);
  static BoundaryData read_csv(const std::string& path);

  double operator()(double t) const;
  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const std::vector<std::pair<double, double>>& table() const { return table_; }

  /// Min and max over a fine parameter grid (exact over the knots for
  /// tabulated data).
  std::pair<double, double> range() const;
  /// Mean over the boundary parameter.
  double mean() const;
  /// Tolerance for "g equals a level" when detecting flat boundary pieces.
  double flat_tolerance() const;

 private:
  BoundaryData() = default;
  Kind kind_ = Kind::analytic;
  std::string name_;
  std::function<double(double)> fn_;
  std::vector<std::pair<double, double>> table_;
};

}  // namespace medgrad
