#include "medgrad/least_gradient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "medgrad/error.hpp"
#include "medgrad/format.hpp"
#include "medgrad/level_set.hpp"
#include "medgrad/parallel.hpp"

namespace medgrad {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Cells are indexed by their lower-left node; a cell counts when all four
// corners are masked.
std::vector<char> valid_cells(const GridField& f) {
  std::vector<char> cell(f.size(), 0);
  for (int j = 0; j + 1 < f.ny(); ++j) {
    for (int i = 0; i + 1 < f.nx(); ++i) {
      cell[f.index(i, j)] = f.masked(i, j) && f.masked(i + 1, j) && f.masked(i, j + 1) &&
                            f.masked(i + 1, j + 1);
    }
  }
  return cell;
}

double tv_of(const std::vector<double>& u, const std::vector<char>& cell, int nx, double h) {
  double sum = 0.0;
  for (std::size_t k = 0; k < cell.size(); ++k) {
    if (!cell[k]) continue;
    const double dx = u[k + 1] - u[k];
    const double dy = u[k + nx] - u[k];
    sum += std::sqrt(dx * dx + dy * dy);
  }
  return h * sum;
}

}  // namespace

double discrete_tv(const GridField& field) {
  std::vector<double> u(field.size());
  for (std::size_t k = 0; k < field.size(); ++k) u[k] = field.masked(k) ? field.value(k) : 0.0;
  return tv_of(u, valid_cells(field), field.nx(), field.h());
}

void TVConfig::validate(double h) const {
  if (max_iter < 1) throw ValidationError("max_iter must be positive");
  if (!(gap_tol > 0.0)) throw ValidationError("gap_tol must be positive");
  if (primal_step > 0.0 || dual_step > 0.0) {
    if (!(primal_step > 0.0 && dual_step > 0.0)) {
      throw ValidationError("primal and dual steps must both be positive");
    }
    if (primal_step * dual_step * 8.0 / (h * h) > 1.0) {
      throw ValidationError("step sizes violate tau*sigma*8/h^2 <= 1");
    }
  }
}

TVResult minimize_tv_dirichlet(const Domain& domain, const BoundaryData& g, int n,
                               const TVConfig& config) {
  if (!domain.strictly_convex()) throw ValidationError("not strictly convex");
  GridField field = apply_dirichlet(from_function(domain, n, [](Point2) { return 0.0; }), g,
                                    config.band);
  const double h = field.h();
  config.validate(h);
  const double tau = config.primal_step > 0.0 ? config.primal_step : 0.99 * h / std::sqrt(8.0);
  const double sigma = config.dual_step > 0.0 ? config.dual_step : 0.99 * h / std::sqrt(8.0);
  const auto [glo, ghi] = g.range();
  const double mean = g.mean();

  const int nx = field.nx();
  const std::size_t size = field.size();
  const std::vector<char> cell = valid_cells(field);
  std::vector<char> free_node(size, 0);
  std::vector<double> u(size, 0.0);
  for (std::size_t k = 0; k < size; ++k) {
    if (!field.masked(k)) continue;
    if (field.pinned(k)) {
      u[k] = field.value(k);
    } else {
      free_node[k] = 1;
      u[k] = mean;
    }
  }
  std::vector<double> ubar = u;
  std::vector<double> unew = u;
  std::vector<double> px(size, 0.0);
  std::vector<double> py(size, 0.0);

  TVResult result{field, 0, 0.0, false, 0.0, {}, {}};
  double window_tv = tv_of(u, cell, nx, h);
  result.tv_history.emplace_back(0, window_tv);
  const double inv_h = 1.0 / h;

  for (int it = 1; it <= config.max_iter; ++it) {
    // Dual ascent, projected onto the unit disk per cell.
    parallel_for(size, [&](std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k) {
        if (!cell[k]) continue;
        const double qx = px[k] + sigma * (ubar[k + 1] - ubar[k]) * inv_h;
        const double qy = py[k] + sigma * (ubar[k + nx] - ubar[k]) * inv_h;
        const double s = std::max(1.0, std::sqrt(qx * qx + qy * qy));
        px[k] = qx / s;
        py[k] = qy / s;
      }
    });
    // Primal descent along the divergence, then the box and the pinned data.
    parallel_for(size, [&](std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k) {
        if (!free_node[k]) continue;
        double kt = 0.0;  // (∇ᵀp)_k
        if (cell[k]) kt -= px[k] + py[k];
        if (k >= 1 && cell[k - 1]) kt += px[k - 1];
        if (k >= static_cast<std::size_t>(nx) && cell[k - nx]) kt += py[k - nx];
        const double v = u[k] - tau * kt * inv_h;
        unew[k] = std::clamp(v, glo, ghi);
      }
    });
    for (std::size_t k = 0; k < size; ++k) {
      if (!free_node[k]) continue;
      ubar[k] = 2.0 * unew[k] - u[k];
      u[k] = unew[k];
    }
    result.iterations = it;

    if (it % 100 == 0) {
      const double tv = tv_of(u, cell, nx, h);
      result.tv_history.emplace_back(it, tv);
      const double change = window_tv > 0.0 ? std::abs(window_tv - tv) / window_tv
                                            : (tv == 0.0 ? 0.0 : 1.0);
      result.last_relative_change = change;
      window_tv = tv;
      if (change < config.gap_tol) {
        result.converged = true;
        break;
      }
    }
  }

  for (std::size_t k = 0; k < size; ++k) {
    if (field.masked(k)) field.value(k) = u[k];
  }
  result.field = std::move(field);
  result.tv = discrete_tv(result.field);
  if (!result.converged) {
    result.diagnostic = "did not converge: relative TV change " +
                        format_double(result.last_relative_change) + " after " +
                        std::to_string(result.iterations) + " iterations";
  }
  return result;
}

FieldDistance compare_fields(const GridField& a, const GridField& b) {
  const auto& ba = a.bbox();
  const auto& bb = b.bbox();
  const double eps = 1e-12 * (1.0 + std::abs(ba.xmax - ba.xmin));
  if (a.nx() != b.nx() || a.ny() != b.ny() || std::abs(ba.xmin - bb.xmin) > eps ||
      std::abs(ba.ymin - bb.ymin) > eps || std::abs(a.h() - b.h()) > eps) {
    throw ValidationError("grid mismatch");
  }
  FieldDistance d;
  double s1 = 0.0;
  double s2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a.masked(k) != b.masked(k)) throw ValidationError("grid mismatch");
    if (!a.masked(k)) continue;
    const double e = std::abs(a.value(k) - b.value(k));
    d.sup = std::max(d.sup, e);
    s1 += e;
    s2 += e * e;
  }
  const double area = a.h() * a.h();
  d.l1 = area * s1;
  d.l2 = std::sqrt(area * s2);
  return d;
}

std::vector<std::size_t> ConjectureReport::survivors() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].survives) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> ConjectureReport::construction_survivors() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].survives && candidates[i].source == "construction") out.push_back(i);
  }
  return out;
}

std::string ConjectureReport::to_csv() const {
  std::ostringstream out;
  out << "candidate,source,global_residual,tv,dist_sup_to_ustar\n";
  for (const auto& c : candidates) {
    out << c.name << ',' << c.source << ',' << format_double(c.global_residual) << ','
        << format_double(c.tv) << ',' << format_double(c.dist_sup_to_ustar) << '\n';
  }
  return out.str();
}

std::string ConjectureReport::summary() const {
  std::ostringstream out;
  out << "least-gradient field: tv " << format_double(ustar_tv)
      << (ustar_converged ? "" : " (minimizer did not reach gap_tol)") << '\n';
  out << "global filter threshold: " << format_double(threshold) << '\n';
  for (const auto& c : candidates) {
    out << "  " << c.name << " [" << c.source << "] residual " << format_double(c.global_residual)
        << " tv " << format_double(c.tv) << " sup-distance " << format_double(c.dist_sup_to_ustar)
        << (c.survives ? "  SURVIVES" : "  rejected") << '\n';
  }
  const auto surv = survivors();
  for (std::size_t a = 0; a < surv.size(); ++a) {
    for (std::size_t b = a + 1; b < surv.size(); ++b) {
      const FieldDistance d = compare_fields(candidates[surv[a]].field, candidates[surv[b]].field);
      out << "  survivors " << candidates[surv[a]].name << " vs " << candidates[surv[b]].name
          << ": sup " << format_double(d.sup) << " l1 " << format_double(d.l1) << " l2 "
          << format_double(d.l2) << '\n';
    }
  }
  const bool unique = surv.size() == 1;
  const bool matches = unique && candidates[surv[0]].dist_sup_to_ustar <= match_tol;
  out << "conclusion: " << surv.size() << " candidate(s) survived the global filter";
  if (unique) {
    out << "; the survivor " << candidates[surv[0]].name
        << (matches ? " matches" : " does not match") << " the least-gradient field within "
        << format_double(match_tol);
  }
  out << ".\n" << kUniquenessCaveat << '\n';
  return out.str();
}

ConjectureReport conjecture_report(const Domain& domain, const BoundaryData& g, int n,
                                   const ConjectureConfig& config) {
  if (!domain.strictly_convex()) throw ValidationError("not strictly convex");
  TVResult star = minimize_tv_dirichlet(domain, g, n, config.tv);
  const double h = star.field.h();
  ConjectureReport rep{std::move(star.field), star.tv, star.converged, {},
                       config.threshold_cells * h, config.match_tol};

  auto add = [&](std::string name, std::string source, double lambda, GridField f) {
    ConjectureCandidate c{std::move(name), std::move(source), lambda, std::move(f)};
    rep.candidates.push_back(std::move(c));
  };

  const auto [lo, hi] = g.range();
  if (hi - lo <= g.flat_tolerance()) {
    add("constant", "construction", lo, from_function(domain, n, [v = lo](Point2) { return v; }));
  } else {
    std::vector<double> lambdas = config.lambdas;
    if (lambdas.empty()) {
      for (int k = 1; k <= 9; ++k) lambdas.push_back(lo + (hi - lo) * k / 10.0);
    }
    for (double lam : lambdas) {
      const ChordSolution sol = build_solution(domain, g, lam);
      // Same discrete boundary data as the minimizer and the solver.
      add("lambda=" + format_double(lam), "construction", lam,
          apply_dirichlet(rasterize(sol, n), g, config.tv.band));
    }
    for (SeedKind seed : config.solver_seeds) {
      if (seed == SeedKind::provided) continue;
      SolverConfig sc = config.solver;
      sc.seed = seed;
      SolveResult res = solve_local_dirichlet(domain, g, n, sc);
      const std::string tag =
          seed == SeedKind::constant_mean ? "solver:constant-mean" : "solver:harmonic-blend";
      if (!res.converged) throw ConvergenceError(tag + " " + res.diagnostic);
      add(tag, "solver", kNaN, std::move(res.field));
    }
  }

  for (auto& c : rep.candidates) {
    const CenterPlan plan = CenterPlan::lattice(c.field, config.center_spacing);
    c.global_residual = verify_global(c.field, plan, config.radii_per_center).max_residual;
    c.tv = discrete_tv(c.field);
    c.dist_sup_to_ustar = compare_fields(c.field, rep.ustar).sup;
    c.survives = c.global_residual <= rep.threshold;
  }
  return rep;
}

}  // namespace medgrad
