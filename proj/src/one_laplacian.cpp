#include "medgrad/one_laplacian.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "medgrad/error.hpp"
#include "medgrad/format.hpp"
#include "medgrad/median.hpp"
#include "medgrad/parallel.hpp"

namespace medgrad {

namespace {

Point2 cd_gradient(const SmoothTestFunction::Value& f, Point2 p, double hd) {
  return {(f({p.x + hd, p.y}) - f({p.x - hd, p.y})) / (2.0 * hd),
          (f({p.x, p.y + hd}) - f({p.x, p.y - hd})) / (2.0 * hd)};
}

Sym2 cd_hessian(const SmoothTestFunction::Value& f, Point2 p, double hd) {
  const double c = f(p);
  const double h2 = hd * hd;
  Sym2 m;
  m.xx = (f({p.x + hd, p.y}) - 2.0 * c + f({p.x - hd, p.y})) / h2;
  m.yy = (f({p.x, p.y + hd}) - 2.0 * c + f({p.x, p.y - hd})) / h2;
  m.xy = (f({p.x + hd, p.y + hd}) - f({p.x + hd, p.y - hd}) - f({p.x - hd, p.y + hd}) +
          f({p.x - hd, p.y - hd})) /
         (4.0 * h2);
  return m;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

SmoothTestFunction::SmoothTestFunction(Value f, double hd) : f_(std::move(f)), hd_(hd) {
  if (!(hd > 0.0)) throw ValidationError("difference step must be positive");
}

SmoothTestFunction::SmoothTestFunction(Value f, Gradient grad, Hessian hess, BBox probe_box,
                                       double hd)
    : f_(std::move(f)), grad_(std::move(grad)), hess_(std::move(hess)), hd_(hd) {
  if (!(hd > 0.0)) throw ValidationError("difference step must be positive");
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> ux(probe_box.xmin, probe_box.xmax);
  std::uniform_real_distribution<double> uy(probe_box.ymin, probe_box.ymax);
  for (int probe = 0; probe < 8; ++probe) {
    const Point2 p{ux(rng), uy(rng)};
    const Point2 ga = (*grad_)(p);
    const Point2 gn = cd_gradient(f_, p, hd_);
    const Sym2 ha = (*hess_)(p);
    const Sym2 hn = cd_hessian(f_, p, hd_);
    const double scale = 1.0 + std::abs(f_(p));
    const double tol = 1e-5 * scale;
    if (norm(ga - gn) > tol) throw ValidationError("analytic gradient disagrees with differences");
    if (std::abs(ha.xx - hn.xx) > 1e3 * tol || std::abs(ha.xy - hn.xy) > 1e3 * tol ||
        std::abs(ha.yy - hn.yy) > 1e3 * tol) {
      throw ValidationError("analytic hessian disagrees with differences");
    }
  }
}

Point2 SmoothTestFunction::gradient(Point2 p) const {
  return grad_ ? (*grad_)(p) : cd_gradient(f_, p, hd_);
}

Sym2 SmoothTestFunction::hessian(Point2 p) const {
  return hess_ ? (*hess_)(p) : cd_hessian(f_, p, hd_);
}

SmoothTestFunction SmoothTestFunction::quadratic(Point2 x0, double q, Point2 l, Sym2 m) {
  auto f = [=](Point2 p) {
    const Point2 d = p - x0;
    return q + dot(l, d) + 0.5 * (m.xx * d.x * d.x + 2.0 * m.xy * d.x * d.y + m.yy * d.y * d.y);
  };
  auto g = [=](Point2 p) {
    const Point2 d = p - x0;
    return Point2{l.x + m.xx * d.x + m.xy * d.y, l.y + m.xy * d.x + m.yy * d.y};
  };
  auto h = [=](Point2) { return m; };
  return SmoothTestFunction(f, g, h, {x0.x - 1, x0.x + 1, x0.y - 1, x0.y + 1});
}

double delta1(Point2 g, Sym2 m, double grad_eps) {
  const double n2 = dot(g, g);
  if (!(std::sqrt(n2) > grad_eps)) throw ValidationError("vanishing gradient: Δ₁ undefined here");
  const double hgg = m.xx * g.x * g.x + 2.0 * m.xy * g.x * g.y + m.yy * g.y * g.y;
  return m.xx + m.yy - hgg / n2;
}

double delta1(const SmoothTestFunction& phi, Point2 p, double grad_eps) {
  return delta1(phi.gradient(p), phi.hessian(p), grad_eps);
}

double ExpansionResidual::normalized() const { return std::abs(lhs - rhs) / (0.5 * r * r); }

ExpansionResidual expansion_residual(const SmoothTestFunction& phi, Point2 p, double r, int n,
                                     double grad_eps) {
  if (n < 1024) throw ValidationError("expansion check needs at least 1024 samples");
  if (!(r > 0.0)) throw ValidationError("radius must be positive");
  const double d1 = delta1(phi, p, grad_eps);
  const double med = median_on_circle([&](Point2 q) { return phi(q); }, CircleSpec{p, r, n});
  return {phi(p) - med, -0.5 * r * r * d1, r};
}

std::string ViscosityReport::to_csv() const {
  std::ostringstream out;
  out << "trial,x0x,x0y,side,delta1,admissible,violation\n";
  for (const auto& t : trials) {
    out << t.trial << ',' << format_double(t.x0.x) << ',' << format_double(t.x0.y) << ','
        << t.side << ',' << format_double(t.delta1) << ',' << (t.admissible ? 1 : 0) << ','
        << (t.violation ? 1 : 0) << '\n';
  }
  return out.str();
}

ViscosityReport viscosity_touch_scan(const GridField& u, int trials, std::uint64_t seed,
                                     const ViscosityOptions& options) {
  if (trials < 0) throw ValidationError("trial count must be non-negative");
  const double h = u.h();
  const int nx = u.nx();
  const int reach = static_cast<int>(std::ceil(options.disk_cells));
  const double disk2 = options.disk_cells * options.disk_cells;

  // Centers: unpinned nodes whose whole test disk and difference stencil are masked.
  std::vector<std::size_t> centers;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!u.masked(k) || u.pinned(k)) continue;
    if (u.domain().signed_distance(u.node(k)) < options.band * h) continue;
    const int i = static_cast<int>(k % nx);
    const int j = static_cast<int>(k / nx);
    bool ok = true;
    for (int dj = -reach; dj <= reach && ok; ++dj) {
      for (int di = -reach; di <= reach && ok; ++di) {
        if (di * di + dj * dj > disk2 && (std::abs(di) > 1 || std::abs(dj) > 1)) continue;
        ok = u.masked(i + di, j + dj);
      }
    }
    if (ok) centers.push_back(k);
  }

  ViscosityReport rep;
  rep.tol = options.tol >= 0.0 ? options.tol : 10.0 * h;
  rep.trials.resize(static_cast<std::size_t>(trials) * 2);
  if (centers.empty()) {
    for (int t = 0; t < trials; ++t) {
      rep.trials[2 * t] = {t, {}, 1, 0.0, false, false};
      rep.trials[2 * t + 1] = {t, {}, -1, 0.0, false, false};
    }
    rep.inadmissible = rep.trials.size();
    return rep;
  }

  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      std::mt19937_64 rng(splitmix64(seed ^ splitmix64(t + 1)));
      std::uniform_int_distribution<std::size_t> pick(0, centers.size() - 1);
      std::normal_distribution<double> normal(0.0, 1.0);
      const std::size_t k = centers[pick(rng)];
      const int i0 = static_cast<int>(k % nx);
      const int j0 = static_cast<int>(k / nx);
      const Point2 x0 = u.node(k);

      for (int side : {1, -1}) {
        // Touch s·u from below; s = −1 gives a touch of u from above.
        auto val = [&](int i, int j) { return side * u.value(u.index(i, j)); };
        const Point2 grad{(val(i0 + 1, j0) - val(i0 - 1, j0)) / (2.0 * h),
                          (val(i0, j0 + 1) - val(i0, j0 - 1)) / (2.0 * h)};
        const double c0 = val(i0, j0);
        Sym2 m;
        m.xx = (val(i0 + 1, j0) - 2.0 * c0 + val(i0 - 1, j0)) / (h * h);
        m.yy = (val(i0, j0 + 1) - 2.0 * c0 + val(i0, j0 - 1)) / (h * h);
        m.xy = (val(i0 + 1, j0 + 1) - val(i0 + 1, j0 - 1) - val(i0 - 1, j0 + 1) +
                val(i0 - 1, j0 - 1)) /
               (4.0 * h * h);
        const Point2 l{grad.x + h * normal(rng), grad.y + h * normal(rng)};
        m.xx += normal(rng);
        m.yy += normal(rng);
        m.xy += normal(rng);

        TouchTrial rec{static_cast<int>(t), x0, side, 0.0, false, false};
        auto strict = [&](double c) {
          for (int dj = -reach; dj <= reach; ++dj) {
            for (int di = -reach; di <= reach; ++di) {
              if ((di == 0 && dj == 0) || di * di + dj * dj > disk2) continue;
              const double dx = di * h;
              const double dy = dj * h;
              const double phi = c0 + l.x * dx + l.y * dy +
                                 0.5 * (m.xx * dx * dx + 2.0 * m.xy * dx * dy + m.yy * dy * dy) -
                                 c * (dx * dx + dy * dy);
              if (!(phi < val(i0 + di, j0 + dj))) return false;
            }
          }
          return true;
        };
        double c = 0.0;
        bool found = strict(c);
        for (double bump = 1e-3; !found && bump < 1e9; bump *= 2.0) {
          c = bump;
          found = strict(c);
        }
        if (found && norm(l) > kDefaultGradEps) {
          const Sym2 hess{m.xx - 2.0 * c, m.xy, m.yy - 2.0 * c};
          const double d1 = delta1(l, hess);
          // Report Δ₁ of the test function for u itself.
          rec.delta1 = side * d1;
          rec.admissible = true;
          rec.violation = -d1 < -rep.tol;
        }
        rep.trials[2 * t + (side == 1 ? 0 : 1)] = rec;
      }
    }
  });

  for (const auto& t : rep.trials) {
    if (!t.admissible) ++rep.inadmissible;
    else ++rep.admissible;
    if (t.violation) ++rep.violations;
  }
  return rep;
}

}  // namespace medgrad
