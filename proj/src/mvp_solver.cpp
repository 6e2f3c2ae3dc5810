#include "medgrad/mvp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "medgrad/contour.hpp"
#include "medgrad/error.hpp"
#include "medgrad/format.hpp"
#include "medgrad/median.hpp"
#include "medgrad/parallel.hpp"

namespace medgrad {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Median of the field over a circle; NaN when any sample leaves the mask.
double circle_median(const GridField& field, Point2 c, double r, int n,
                     std::vector<double>& buf) {
  const auto& tab = unit_circle_table(n);
  buf.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double v = field.try_eval({c.x + r * tab.cos[k], c.y + r * tab.sin[k]});
    if (std::isnan(v)) return kNaN;
    buf[k] = v;
  }
  return median_in_place(buf);
}

// Samples of a circle of radius rr (in cells) around node k, in lattice
// coordinates. Valid only where lattice_circle_fits holds.
double lattice_circle_median(const GridField& field, std::size_t k, double rr, int n,
                             std::vector<double>& buf) {
  const auto& tab = unit_circle_table(n);
  buf.resize(static_cast<std::size_t>(n));
  const int nx = field.nx();
  const double cx = static_cast<double>(k % nx);
  const double cy = static_cast<double>(k / nx);
  const double* v = field.data();
  const double* cs = tab.cos.data();
  const double* sn = tab.sin.data();
  double* out = buf.data();
  for (int s = 0; s < n; ++s) {
    const double fx = cx + rr * cs[s];
    const double fy = cy + rr * sn[s];
    const int i = static_cast<int>(fx);
    const int j = static_cast<int>(fy);
    const double a = fx - i;
    const double b = fy - j;
    const double* p = v + static_cast<std::size_t>(j) * nx + i;
    const double lo = p[0] + a * (p[1] - p[0]);
    const double hi = p[nx] + a * (p[nx + 1] - p[nx]);
    out[s] = lo + b * (hi - lo);
  }
  return median_in_place(buf);
}

bool lattice_circle_fits(const GridField& field, std::size_t k, double rr, int n) {
  const auto& tab = unit_circle_table(n);
  const int nx = field.nx();
  const double cx = static_cast<double>(k % nx);
  const double cy = static_cast<double>(k / nx);
  for (int s = 0; s < n; ++s) {
    const double fx = cx + rr * tab.cos[s];
    const double fy = cy + rr * tab.sin[s];
    if (!(fx >= 0.0 && fy >= 0.0)) return false;
    const int i = static_cast<int>(fx);
    const int j = static_cast<int>(fy);
    if (i > nx - 2 || j > field.ny() - 2) return false;
    if (!field.masked(i, j) || !field.masked(i + 1, j) || !field.masked(i, j + 1) ||
        !field.masked(i + 1, j + 1)) {
      return false;
    }
  }
  return true;
}

int samples_for(const SolverConfig& config, double r, double h) {
  return config.samples_per_circle > 0 ? config.samples_per_circle : default_sample_count(r, h);
}

bool is_check_center(const GridField& field, std::size_t k, double band) {
  if (!field.masked(k) || field.pinned(k)) return false;
  return field.domain().signed_distance(field.node(k)) >= band * field.h();
}

// Warm the cos/sin cache serially so parallel sweeps only read it.
void warm_tables(const std::vector<int>& counts) {
  std::vector<int> sorted = counts;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (int n : sorted) {
    if (n >= 8) unit_circle_table(n);
  }
}

ResidualReport reduce(const std::vector<ResidualSample>& samples, std::size_t skipped,
                      bool keep) {
  ResidualReport rep;
  rep.skipped_count = skipped;
  double sum = 0.0;
  for (const auto& s : samples) {
    if (std::isnan(s.residual)) continue;
    ++rep.checked_count;
    sum += s.residual;
    if (s.residual > rep.max_residual || rep.checked_count == 1) {
      rep.max_residual = s.residual;
      rep.worst_point = s.point;
      rep.worst_radius = s.radius;
    }
  }
  rep.mean_residual = rep.checked_count ? sum / static_cast<double>(rep.checked_count) : 0.0;
  if (keep) {
    for (const auto& s : samples) {
      if (!std::isnan(s.residual)) rep.per_point.push_back(s);
    }
  }
  return rep;
}

}  // namespace

void SolverConfig::validate() const {
  if (const auto* f = std::get_if<FractionRadius>(&radius_rule)) {
    if (!(f->c > 0.0 && f->c <= 1.0)) throw ValidationError("radius fraction must lie in (0, 1]");
  } else if (!(std::get<FixedRadius>(radius_rule).r0 > 0.0)) {
    throw ValidationError("fixed radius must be positive");
  }
  if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
  if (max_iter < 1) throw ValidationError("max_iter must be positive");
  if (samples_per_circle != 0 && samples_per_circle < 8) {
    throw ValidationError("circles need at least 8 samples");
  }
  if (seed == SeedKind::provided && !seed_field) throw ValidationError("provided seed missing");
}

std::string ResidualReport::to_csv() const {
  std::ostringstream out;
  out << "x,y,r,residual\n";
  for (const auto& s : per_point) {
    out << format_double(s.point.x) << ',' << format_double(s.point.y) << ','
        << format_double(s.radius) << ',' << format_double(s.residual) << '\n';
  }
  return out.str();
}

std::string SolveResult::log_csv() const {
  std::ostringstream out;
  out << "iter,sup_update,max_residual\n";
  for (const auto& r : log) {
    out << r.iter << ',' << format_double(r.sup_update) << ',' << format_double(r.max_residual)
        << '\n';
  }
  return out.str();
}

double effective_radius(const SolverConfig& config, double dist, double h) {
  const double cap = dist - config.band * h;
  double r = 0.0;
  if (const auto* f = std::get_if<FractionRadius>(&config.radius_rule)) {
    r = f->c * dist;
  } else {
    r = std::get<FixedRadius>(config.radius_rule).r0;
  }
  r = std::min(r, cap);
  return r > 0.0 ? r : 0.0;
}

ResidualReport local_residual(const GridField& field, const SolverConfig& config,
                              bool keep_samples) {
  config.validate();
  const double h = field.h();
  std::vector<std::size_t> centers;
  for (std::size_t k = 0; k < field.size(); ++k) {
    if (is_check_center(field, k, config.band)) centers.push_back(k);
  }
  std::vector<ResidualSample> samples(centers.size() * 3, {{}, 0.0, kNaN});
  std::vector<double> radius(centers.size());
  std::vector<int> counts;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    radius[c] = effective_radius(config, field.domain().signed_distance(field.node(centers[c])), h);
    for (int s = 0; s < 3; ++s) counts.push_back(samples_for(config, radius[c] / (1 << s), h));
  }
  warm_tables(counts);
  parallel_for(centers.size(), [&](std::size_t begin, std::size_t end) {
    std::vector<double> buf;
    for (std::size_t c = begin; c < end; ++c) {
      const Point2 x = field.node(centers[c]);
      const double u = field.value(centers[c]);
      for (int s = 0; s < 3; ++s) {
        const double r = radius[c] / (1 << s);
        auto& out = samples[3 * c + s];
        out.point = x;
        out.radius = r;
        if (!(r > 0.0)) continue;
        const double m = circle_median(field, x, r, samples_for(config, r, h), buf);
        out.residual = std::isnan(m) ? kNaN : std::abs(u - m);
      }
    }
  });
  std::size_t skipped = 0;
  for (const auto& s : samples) skipped += std::isnan(s.residual) ? 1 : 0;
  return reduce(samples, skipped, keep_samples);
}

GridField make_seed(const GridField& pinned_field, const BoundaryData& g, SeedKind kind) {
  GridField field = pinned_field;
  if (kind == SeedKind::provided) return field;
  if (kind == SeedKind::constant_mean) {
    const double mean = g.mean();
    for (std::size_t k = 0; k < field.size(); ++k) {
      if (field.masked(k) && !field.pinned(k)) field.value(k) = mean;
    }
    return field;
  }
  // Inverse-distance (Shepard) blend of boundary samples.
  constexpr int kSamples = 512;
  std::vector<Point2> pts(kSamples);
  std::vector<double> vals(kSamples);
  for (int s = 0; s < kSamples; ++s) {
    const double t = kTwoPi * s / kSamples;
    pts[s] = field.domain().boundary_point(t);
    vals[s] = g(t);
  }
  for (std::size_t k = 0; k < field.size(); ++k) {
    if (!field.masked(k) || field.pinned(k)) continue;
    const Point2 p = field.node(k);
    double wsum = 0.0;
    double vsum = 0.0;
    for (int s = 0; s < kSamples; ++s) {
      const Point2 d = p - pts[s];
      const double w = 1.0 / std::max(dot(d, d), 1e-300);
      wsum += w;
      vsum += w * vals[s];
    }
    field.value(k) = vsum / wsum;
  }
  return field;
}

SolveResult solve_local_dirichlet(const Domain& domain, const BoundaryData& g, int n,
                                  const SolverConfig& config) {
  config.validate();
  GridField grid = apply_dirichlet(from_function(domain, n, [](Point2) { return 0.0; }), g,
                                   config.band);
  if (config.seed == SeedKind::provided) {
    const GridField& seed = *config.seed_field;
    if (seed.nx() != grid.nx() || seed.ny() != grid.ny()) {
      throw ValidationError("provided seed has a different grid");
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
      if (!grid.masked(k) || grid.pinned(k)) continue;
      if (!seed.masked(k)) throw ValidationError("provided seed does not cover the domain");
      grid.value(k) = seed.value(k);
    }
  } else {
    grid = make_seed(grid, g, config.seed);
  }
  return solve_local_dirichlet(std::move(grid), config);
}

SolveResult solve_local_dirichlet(GridField prepared, const SolverConfig& config) {
  config.validate();
  const double h = prepared.h();
  const Domain& domain = prepared.domain();

  std::vector<std::size_t> active;
  std::vector<double> radius;
  std::vector<int> counts;
  for (std::size_t k = 0; k < prepared.size(); ++k) {
    if (!prepared.masked(k) || prepared.pinned(k)) continue;
    const double r = effective_radius(config, domain.signed_distance(prepared.node(k)), h);
    if (!(r > 0.0)) continue;
    active.push_back(k);
    radius.push_back(r);
    counts.push_back(samples_for(config, r, h));
  }
  warm_tables(counts);

  SolveResult result{prepared, {}, {}, false, 0.0, {}};
  GridField current = std::move(prepared);
  GridField next = current;
  std::vector<double> update(active.size(), 0.0);
  int last_check = -1000000;
  const double residual_target = 10.0 * config.tol + 2.0 * h;

  // Circles that stay inside masked cells take the unchecked lattice path.
  std::vector<char> fits(active.size());
  for (std::size_t a = 0; a < active.size(); ++a) {
    fits[a] = lattice_circle_fits(current, active[a], radius[a] / h, counts[a]) ? 1 : 0;
  }

  for (int it = 1; it <= config.max_iter; ++it) {
    parallel_for(active.size(), [&](std::size_t begin, std::size_t end) {
      std::vector<double> buf;
      for (std::size_t a = begin; a < end; ++a) {
        const std::size_t k = active[a];
        double m;
        if (fits[a]) {
          m = lattice_circle_median(current, k, radius[a] / h, counts[a], buf);
        } else {
          m = circle_median(current, current.node(k), radius[a], counts[a], buf);
        }
        // A circle leaving the mask (only possible on non-convex masks) keeps the old value.
        const double v = std::isnan(m) ? current.value(k) : m;
        next.value(k) = v;
        update[a] = std::abs(v - current.value(k));
      }
    });
    double sup = 0.0;
    for (double u : update) sup = std::max(sup, u);
    std::swap(current, next);
    IterationRecord rec{it, sup, kNaN};
    result.final_update = sup;

    if (sup < config.tol && it - last_check >= 10) {
      last_check = it;
      const ResidualReport rep = local_residual(current, config);
      rec.max_residual = rep.max_residual;
      if (rep.max_residual < residual_target) {
        result.log.push_back(rec);
        result.converged = true;
        result.report = rep;
        break;
      }
    }
    result.log.push_back(rec);
  }

  if (!result.converged) {
    result.report = local_residual(current, config);
    result.diagnostic = "did not converge: sup update " + format_double(result.final_update) +
                        " after " + std::to_string(config.max_iter) +
                        " iterations, local max residual " +
                        format_double(result.report.max_residual);
  }
  result.field = std::move(current);
  return result;
}

CenterPlan CenterPlan::lattice(const GridField& field, double spacing) {
  if (!(spacing > 0.0)) throw ValidationError("center spacing must be positive");
  const BBox& b = field.bbox();
  const Point2 mid{0.5 * (b.xmin + b.xmax), 0.5 * (b.ymin + b.ymax)};
  const int ix = static_cast<int>(std::ceil(0.5 * (b.xmax - b.xmin) / spacing));
  const int iy = static_cast<int>(std::ceil(0.5 * (b.ymax - b.ymin) / spacing));
  CenterPlan plan;
  for (int j = -iy; j <= iy; ++j) {
    for (int i = -ix; i <= ix; ++i) {
      const Point2 p{mid.x + i * spacing, mid.y + j * spacing};
      if (field.domain().signed_distance(p) > 0.0 && !std::isnan(field.try_eval(p))) {
        plan.centers.push_back(p);
      }
    }
  }
  return plan;
}

ResidualReport verify_global(const GridField& field, const CenterPlan& plan,
                             int radii_per_center, double max_radius, double band,
                             bool keep_samples) {
  if (radii_per_center < 1) throw ValidationError("need at least one radius per center");
  const double h = field.h();
  const std::size_t nc = plan.centers.size();
  const auto per = static_cast<std::size_t>(radii_per_center);
  std::vector<ResidualSample> samples(nc * per, {{}, 0.0, kNaN});
  std::vector<int> counts;
  std::vector<double> rmin(nc), rmax(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    rmin[c] = 2.0 * h;
    rmax[c] = field.domain().signed_distance(plan.centers[c]) - band * h;
    if (max_radius > 0.0) rmax[c] = std::min(rmax[c], max_radius);
    counts.push_back(default_sample_count(std::max(rmax[c], rmin[c]), h));
  }
  std::vector<std::vector<double>> radii(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    if (rmax[c] < rmin[c]) continue;
    for (std::size_t s = 0; s < per; ++s) {
      const double r = per == 1 ? rmax[c]
                                : rmin[c] * std::pow(rmax[c] / rmin[c],
                                                     static_cast<double>(s) / (per - 1));
      radii[c].push_back(r);
      counts.push_back(default_sample_count(r, h));
    }
  }
  warm_tables(counts);
  parallel_for(nc, [&](std::size_t begin, std::size_t end) {
    std::vector<double> buf;
    for (std::size_t c = begin; c < end; ++c) {
      const Point2 x = plan.centers[c];
      const double u = field.try_eval(x);
      for (std::size_t s = 0; s < radii[c].size(); ++s) {
        const double r = radii[c][s];
        auto& out = samples[c * per + s];
        out.point = x;
        out.radius = r;
        if (std::isnan(u)) continue;
        const double m = circle_median(field, x, r, default_sample_count(r, h), buf);
        out.residual = std::isnan(m) ? kNaN : std::abs(u - m);
      }
    }
  });
  std::size_t skipped = 0;
  for (const auto& s : samples) skipped += std::isnan(s.residual) ? 1 : 0;
  return reduce(samples, skipped, keep_samples);
}

MaxPrincipleReport max_principle_check(const GridField& field, double strictness, double band) {
  const double h = field.h();
  const double r = 3.0 * h;
  const int n = default_sample_count(r, h);
  unit_circle_table(n);
  std::vector<std::size_t> centers;
  for (std::size_t k = 0; k < field.size(); ++k) {
    if (is_check_center(field, k, band)) centers.push_back(k);
  }
  // 0 = not checked, 1 = fine, 2 = strict max, 3 = strict min
  std::vector<int> status(centers.size(), 0);
  parallel_for(centers.size(), [&](std::size_t begin, std::size_t end) {
    const auto& tab = unit_circle_table(n);
    for (std::size_t c = begin; c < end; ++c) {
      const Point2 x = field.node(centers[c]);
      const double u = field.value(centers[c]);
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      bool ok = true;
      for (int k = 0; k < n && ok; ++k) {
        const double v = field.try_eval({x.x + r * tab.cos[k], x.y + r * tab.sin[k]});
        if (std::isnan(v)) ok = false;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (!ok) continue;
      status[c] = u > hi + strictness ? 2 : (u < lo - strictness ? 3 : 1);
    }
  });
  MaxPrincipleReport rep;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    if (status[c] == 0) continue;
    ++rep.checked_count;
    if (status[c] == 2) rep.maxima.push_back(field.node(centers[c]));
    if (status[c] == 3) rep.minima.push_back(field.node(centers[c]));
  }
  rep.flagged_count = rep.maxima.size() + rep.minima.size();
  return rep;
}

double default_grad_floor(const GridField& field) {
  const auto [lo, hi] = field.range();
  return 0.5 * (hi - lo) / field.domain().diameter() * 0.1;
}

namespace {

// Nodal gradient by central differences, one-sided next to the mask edge.
std::pair<std::vector<double>, std::vector<double>> nodal_gradient(const GridField& f) {
  std::vector<double> gx(f.size(), 0.0), gy(f.size(), 0.0);
  const double h = f.h();
  for (int j = 0; j < f.ny(); ++j) {
    for (int i = 0; i < f.nx(); ++i) {
      const std::size_t k = f.index(i, j);
      if (!f.masked(k)) continue;
      auto diff = [&](int di, int dj) {
        const bool fwd = f.masked(i + di, j + dj);
        const bool bwd = f.masked(i - di, j - dj);
        if (fwd && bwd) {
          return (f.value(f.index(i + di, j + dj)) - f.value(f.index(i - di, j - dj))) / (2 * h);
        }
        if (fwd) return (f.value(f.index(i + di, j + dj)) - f.value(k)) / h;
        if (bwd) return (f.value(k) - f.value(f.index(i - di, j - dj))) / h;
        return 0.0;
      };
      gx[k] = diff(1, 0);
      gy[k] = diff(0, 1);
    }
  }
  return {std::move(gx), std::move(gy)};
}

double interpolate(const GridField& f, const std::vector<double>& nodal, Point2 p) {
  const double fx = (p.x - f.bbox().xmin) / f.h();
  const double fy = (p.y - f.bbox().ymin) / f.h();
  const int i = std::clamp(static_cast<int>(fx), 0, f.nx() - 2);
  const int j = std::clamp(static_cast<int>(fy), 0, f.ny() - 2);
  const double a = std::clamp(fx - i, 0.0, 1.0);
  const double b = std::clamp(fy - j, 0.0, 1.0);
  const std::size_t k = f.index(i, j);
  return (1 - b) * ((1 - a) * nodal[k] + a * nodal[k + 1]) +
         b * ((1 - a) * nodal[k + f.nx()] + a * nodal[k + f.nx() + 1]);
}

LevelComponent fit_component(std::vector<Point2> pts, const Domain& domain, bool start_cut,
                             bool end_cut) {
  LevelComponent comp;
  Point2 c{0.0, 0.0};
  for (const auto& p : pts) c = c + p;
  c = (1.0 / static_cast<double>(pts.size())) * c;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : pts) {
    const Point2 d = p - c;
    sxx += d.x * d.x;
    sxy += d.x * d.y;
    syy += d.y * d.y;
  }
  // Principal axis of the 2x2 scatter matrix.
  const double theta = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  comp.direction = {std::cos(theta), std::sin(theta)};
  for (const auto& p : pts) {
    comp.deviation = std::max(comp.deviation, std::abs(cross(comp.direction, p - c)));
  }
  comp.start_truncated = start_cut;
  comp.end_truncated = end_cut;
  comp.start_boundary_distance = std::abs(domain.signed_distance(pts.front()));
  comp.end_boundary_distance = std::abs(domain.signed_distance(pts.back()));
  comp.points = std::move(pts);
  return comp;
}

}  // namespace

StraightnessReport level_set_straightness(const GridField& field, double level,
                                          double grad_floor) {
  const auto lines = extract_contours(field, level);
  if (lines.empty()) throw ValidationError("level not attained");
  const auto [gx, gy] = nodal_gradient(field);

  StraightnessReport rep;
  rep.level = level;
  rep.grad_floor = grad_floor;
  for (const auto& line : lines) {
    const std::size_t n = line.points.size();
    std::vector<char> keep(n);
    bool all = true;
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 p = line.points[i];
      keep[i] = std::hypot(interpolate(field, gx, p), interpolate(field, gy, p)) >= grad_floor;
      if (!keep[i]) {
        ++rep.discarded_points;
        all = false;
      }
    }
    if (line.closed && all) {
      // A closed loop has no endpoints to test.
      rep.components.push_back(fit_component(line.points, field.domain(), true, true));
      continue;
    }
    std::size_t i = 0;
    while (i < n) {
      if (!keep[i]) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < n && keep[j]) ++j;
      if (j - i >= 2) {
        std::vector<Point2> run(line.points.begin() + static_cast<std::ptrdiff_t>(i),
                                line.points.begin() + static_cast<std::ptrdiff_t>(j));
        const bool start_cut = i > 0 || line.closed;
        const bool end_cut = j < n || line.closed;
        rep.components.push_back(fit_component(std::move(run), field.domain(), start_cut, end_cut));
      }
      i = j;
    }
  }
  for (const auto& c : rep.components) {
    rep.max_deviation = std::max(rep.max_deviation, c.deviation);
    if (!c.start_truncated) rep.max_endpoint_distance = std::max(rep.max_endpoint_distance, c.start_boundary_distance);
    if (!c.end_truncated) rep.max_endpoint_distance = std::max(rep.max_endpoint_distance, c.end_boundary_distance);
  }
  return rep;
}

}  // namespace medgrad
