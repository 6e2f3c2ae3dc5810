#pragma once

// Reference computations written without the library's kernels, used to cross
// check them.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

// Full sort, no selection tricks.
inline double sorted_median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Median of f(cos θ, sin θ)·r + c over n equally spaced angles, by sorting.
inline double brute_circle_median(const std::function<double(double, double)>& f, double cx,
                                  double cy, double r, int n, double phase = 0.0) {
  std::vector<double> v(n);
  for (int k = 0; k < n; ++k) {
    const double th = phase + 2.0 * std::numbers::pi * k / n;
    v[k] = f(cx + r * std::cos(th), cy + r * std::sin(th));
  }
  return sorted_median(std::move(v));
}

// The arc where |sin θ| < m has measure 4·asin(m); half the circle when m = sin(π/4).
inline double abs_sin_median_closed_form() { return std::sin(std::numbers::pi / 4.0); }

// Piecewise formula for the plateau family, written from the branch geometry:
// the caps |y| ≥ α keep |y|, the side lenses keep the height of the circle
// above x, the rest is flat.
inline double u_alpha(double alpha, double x, double y) {
  const double ay = std::fabs(y);
  if (ay >= alpha) return ay;
  const double side = std::sqrt(std::max(0.0, 1.0 - alpha * alpha));
  if (std::fabs(x) >= side) return std::sqrt(std::max(0.0, 1.0 - x * x));
  return alpha;
}

// Closed-form TV of the plateau family.
inline double tv_alpha(double a) {
  return 2.0 * a * a + std::numbers::pi - 2.0 * a * std::sqrt(1.0 - a * a) - 2.0 * std::asin(a);
}

// Coarea oracle: Σ_levels length(level)·Δlevel with marching-squares segment
// lengths computed cell by cell (no linking). Values are row-major, NaN where
// unmasked; cells with a NaN corner are skipped.
inline double level_length(const std::vector<double>& u, int nx, int ny, double h, double lev) {
  double total = 0.0;
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const double c[4] = {u[j * nx + i], u[j * nx + i + 1], u[(j + 1) * nx + i + 1],
                           u[(j + 1) * nx + i]};
      const double px[4] = {0, 1, 1, 0};
      const double py[4] = {0, 0, 1, 1};
      bool bad = false;
      for (double v : c) bad = bad || std::isnan(v);
      if (bad) continue;
      double xs[4], ys[4];
      int m = 0;
      for (int e = 0; e < 4; ++e) {
        const double a = c[e] - lev;
        const double b = c[(e + 1) % 4] - lev;
        if ((a < 0) != (b < 0)) {
          const double s = a / (a - b);
          xs[m] = px[e] + s * (px[(e + 1) % 4] - px[e]);
          ys[m] = py[e] + s * (py[(e + 1) % 4] - py[e]);
          ++m;
        }
      }
      if (m == 2) {
        total += std::hypot(xs[1] - xs[0], ys[1] - ys[0]);
      } else if (m == 4) {
        total += std::hypot(xs[1] - xs[0], ys[1] - ys[0]) + std::hypot(xs[3] - xs[2], ys[3] - ys[2]);
      }
    }
  }
  return total * h;
}

inline double coarea_tv(const std::vector<double>& u, int nx, int ny, double h, int levels) {
  double lo = INFINITY, hi = -INFINITY;
  for (double v : u) {
    if (std::isnan(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(hi > lo)) return 0.0;
  const double dl = (hi - lo) / levels;
  double sum = 0.0;
  for (int k = 0; k < levels; ++k) sum += level_length(u, nx, ny, h, lo + (k + 0.5) * dl) * dl;
  return sum;
}

// Δ₁ from a five-point/cross stencil of f at step hd.
inline double cd_delta1(const std::function<double(double, double)>& f, double x, double y,
                        double hd) {
  const double c = f(x, y);
  const double fx = (f(x + hd, y) - f(x - hd, y)) / (2 * hd);
  const double fy = (f(x, y + hd) - f(x, y - hd)) / (2 * hd);
  const double fxx = (f(x + hd, y) - 2 * c + f(x - hd, y)) / (hd * hd);
  const double fyy = (f(x, y + hd) - 2 * c + f(x, y - hd)) / (hd * hd);
  const double fxy =
      (f(x + hd, y + hd) - f(x + hd, y - hd) - f(x - hd, y + hd) + f(x - hd, y - hd)) /
      (4 * hd * hd);
  const double g2 = fx * fx + fy * fy;
  return fxx + fyy - (fxx * fx * fx + 2 * fxy * fx * fy + fyy * fy * fy) / g2;
}

}  // namespace oracle
