#include "medgrad/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "medgrad/error.hpp"
#include "medgrad/format.hpp"
#include "medgrad/geometry.hpp"

namespace medgrad {

namespace {
constexpr int kRangeSamples = 8192;
}

BoundaryData BoundaryData::analytic(std::string name, std::function<double(double)> fn) {
  BoundaryData g;
  g.kind_ = Kind::analytic;
  g.name_ = std::move(name);
  g.fn_ = std::move(fn);
  return g;
}

BoundaryData BoundaryData::tabulated(std::vector<std::pair<double, double>> samples,
                                     double tol_continuity) {
  if (samples.size() < 2) throw ValidationError("tabulated boundary data needs 2+ samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto [t, v] = samples[i];
    if (!std::isfinite(t) || !std::isfinite(v)) throw ValidationError("non-finite boundary sample");
    if (t < 0.0 || t >= kTwoPi) throw ValidationError("boundary parameter outside [0, 2pi)");
    if (i > 0 && !(t > samples[i - 1].first)) {
      throw ValidationError("boundary parameters must be strictly increasing");
    }
  }
  std::vector<double> jumps;
  jumps.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    jumps.push_back(std::abs(samples[(i + 1) % samples.size()].second - samples[i].second));
  }
  if (tol_continuity < 0.0) {
    std::vector<double> sorted = jumps;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    tol_continuity = 10.0 * sorted[sorted.size() / 2];
  }
  const double worst = *std::max_element(jumps.begin(), jumps.end());
  if (worst > tol_continuity) {
    throw ValidationError("boundary data is not continuous: jump " + format_double(worst) +
                          " exceeds " + format_double(tol_continuity));
  }
  BoundaryData g;
  g.kind_ = Kind::tabulated;
  g.name_ = "tabulated";
  g.table_ = std::move(samples);
  return g;
}

BoundaryData BoundaryData::abs_sin() {
  return analytic("abs-sin", [](double t) { return std::abs(std::sin(t)); });
}

BoundaryData BoundaryData::sin() {
  return analytic("sin", [](double t) { return std::sin(t); });
}

BoundaryData BoundaryData::constant(double c) {
  return analytic("const:" + format_double(c), [c](double) { return c; });
}

BoundaryData BoundaryData::affine(double a, double b, double c) {
  return analytic("affine:" + format_double(a) + "," + format_double(b) + "," + format_double(c),
                  [a, b, c](double t) { return a * std::cos(t) + b * std::sin(t) + c; });
}

BoundaryData BoundaryData::from_name(std::string_view spec) {
  if (spec == "abs-sin") return abs_sin();
  if (spec == "sin") return sin();
  if (spec.starts_with("const:")) return constant(parse_double(spec.substr(6)));
  if (spec.starts_with("affine:")) {
    std::string rest(spec.substr(7));
    std::replace(rest.begin(), rest.end(), ',', ' ');
    std::istringstream in(rest);
    std::string a, b, c;
    if (!(in >> a >> b >> c)) throw ValidationError("affine:<a>,<b>,<c> expected");
    return affine(parse_double(a), parse_double(b), parse_double(c));
  }
  if (spec.starts_with("file:")) return read_csv(std::string(spec.substr(5)));
  throw ValidationError("unknown boundary data '" + std::string(spec) + "'");
}

BoundaryData BoundaryData::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open boundary file " + path);
  std::vector<std::pair<double, double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ValidationError("expected t,value in " + path);
    const std::string_view lhs(line.data(), comma);
    if (lhs == "t") continue;  // header
    rows.emplace_back(parse_double(lhs), parse_double(std::string_view(line).substr(comma + 1)));
  }
  auto g = tabulated(std::move(rows));
  g.name_ = "file:" + path;
  return g;
}

double BoundaryData::operator()(double t) const {
  if (kind_ == Kind::analytic) return fn_(t);
  const double w = wrap_angle(t);
  const auto& tab = table_;
  auto it = std::upper_bound(tab.begin(), tab.end(), w,
                             [](double x, const auto& s) { return x < s.first; });
  // Interpolate on the periodic extension; the last knot wraps to the first + 2π.
  std::pair<double, double> lo, hi;
  if (it == tab.begin()) {
    lo = {tab.back().first - kTwoPi, tab.back().second};
    hi = tab.front();
  } else if (it == tab.end()) {
    lo = tab.back();
    hi = {tab.front().first + kTwoPi, tab.front().second};
  } else {
    lo = *(it - 1);
    hi = *it;
  }
  const double f = (w - lo.first) / (hi.first - lo.first);
  return lo.second + f * (hi.second - lo.second);
}

std::pair<double, double> BoundaryData::range() const {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  if (kind_ == Kind::tabulated) {
    for (const auto& [t, v] : table_) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return {lo, hi};
  }
  for (int k = 0; k < kRangeSamples; ++k) {
    const double v = fn_(kTwoPi * k / kRangeSamples);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

double BoundaryData::mean() const {
  double sum = 0.0;
  for (int k = 0; k < kRangeSamples; ++k) sum += (*this)(kTwoPi * k / kRangeSamples);
  return sum / kRangeSamples;
}

double BoundaryData::flat_tolerance() const {
  const auto [lo, hi] = range();
  return 1e-12 * (1.0 + std::max(std::abs(lo), std::abs(hi)));
}

}  // namespace medgrad
