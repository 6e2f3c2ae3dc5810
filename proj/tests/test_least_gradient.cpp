#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "medgrad/analytic.hpp"
#include "medgrad/error.hpp"
#include "medgrad/least_gradient.hpp"
#include "oracles.hpp"

using namespace medgrad;
using std::numbers::pi;

TEST_CASE("discrete TV examples") {
  const Domain d = Domain::unit_disk();
  CHECK(discrete_tv(from_function(d, 64, [](Point2) { return 3.0; })) == 0.0);
  CHECK(std::abs(discrete_tv(from_function(d, 256, [](Point2 p) { return p.y; })) / pi - 1) < 0.02);
  const UAlphaParams a(1 / std::sqrt(2.0));
  const GridField u = from_function(d, 512, [&](Point2 p) { return u_alpha_eval(a, p); });
  CHECK(std::abs(discrete_tv(u) / (pi / 2) - 1) < 0.03);
}

TEST_CASE("discrete TV is homogeneous, shift invariant and convex") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> un(-1, 1);
  const Domain d = Domain::unit_disk();
  for (int trial = 0; trial < 10; ++trial) {
    const GridField f = from_function(d, 40, [&](Point2) { return un(rng); });
    const GridField g = from_function(d, 40, [&](Point2) { return un(rng); });
    const double a = 3 * un(rng), c = un(rng);
    GridField af = f, shifted = f, mid = f;
    for (std::size_t k = 0; k < f.size(); ++k) {
      if (!f.masked(k)) continue;
      af.value(k) = a * f.value(k);
      shifted.value(k) = f.value(k) + c;
      mid.value(k) = 0.5 * (f.value(k) + g.value(k));
    }
    CHECK(discrete_tv(af) == doctest::Approx(std::abs(a) * discrete_tv(f)).epsilon(1e-12));
    CHECK(discrete_tv(shifted) == doctest::Approx(discrete_tv(f)).epsilon(1e-12));
    CHECK(discrete_tv(mid) <= 0.5 * (discrete_tv(f) + discrete_tv(g)) + 1e-12);
  }
}

TEST_CASE("coarea cross-check") {
  const Domain d = Domain::unit_disk();
  const std::function<double(Point2)> fields[] = {
      [](Point2 p) { return p.y; },
      [](Point2 p) { return dot(p, p); },
      [](Point2 p) { return std::abs(p.x) + 0.5 * p.y; },
      [](Point2 p) { return u_alpha_eval(UAlphaParams(0.4), p); },
  };
  for (const auto& fn : fields) {
    const GridField f = from_function(d, 256, fn);
    const double coarea = oracle::coarea_tv(f.values(), f.nx(), f.ny(), f.h(), 200);
    CHECK(std::abs(discrete_tv(f) / coarea - 1) < 0.05);
  }
}

TEST_CASE("TV minimizer examples") {
  const Domain d = Domain::unit_disk();
  const TVResult s = minimize_tv_dirichlet(d, BoundaryData::sin(), 128);
  double err = 0;
  for (std::size_t k = 0; k < s.field.size(); ++k) {
    if (s.field.masked(k)) err = std::max(err, std::abs(s.field.value(k) - s.field.node(k).y));
  }
  CHECK(err <= 3 * s.field.h());

  const TVResult c = minimize_tv_dirichlet(d, BoundaryData::constant(0.7), 64);
  CHECK(c.tv == 0.0);
  for (std::size_t k = 0; k < c.field.size(); ++k) {
    if (c.field.masked(k)) CHECK(c.field.value(k) == 0.7);
  }
  CHECK_THROWS_AS(minimize_tv_dirichlet(Domain::polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}, true),
                                        BoundaryData::sin(), 32),
                  ValidationError);
  TVConfig bad;
  bad.primal_step = 1.0;
  bad.dual_step = 1.0;
  CHECK_THROWS_AS(minimize_tv_dirichlet(d, BoundaryData::sin(), 32, bad), ValidationError);
}

TEST_CASE("minimizer output stays in range and resists bump perturbations") {
  const Domain d = Domain::unit_disk();
  const BoundaryData g = BoundaryData::abs_sin();
  const TVResult r = minimize_tv_dirichlet(d, g, 64);
  const auto [lo, hi] = r.field.range();
  CHECK(lo >= 0.0);
  CHECK(hi <= 1.0);
  const double base = discrete_tv(r.field);
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> un(-1, 1);
  TVConfig cfg;
  for (int trial = 0; trial < 100; ++trial) {
    const Point2 c{0.6 * un(rng), 0.6 * un(rng)};
    const double width = 0.05 + 0.2 * std::abs(un(rng));
    const double amp = 0.05 * un(rng);
    GridField p = r.field;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (!p.masked(k) || p.pinned(k)) continue;
      const double s = distance(p.node(k), c) / width;
      if (s < 1) p.value(k) += amp * (1 - s * s) * (1 - s * s);
    }
    CHECK(discrete_tv(p) >= base - cfg.gap_tol * base);
  }
}

TEST_CASE("compare_fields") {
  const Domain d = Domain::unit_disk();
  const GridField a = from_function(d, 101, [](Point2 p) { return p.x; });
  const FieldDistance z = compare_fields(a, a);
  CHECK(z.sup == 0.0);
  CHECK(z.l1 == 0.0);
  CHECK(z.l2 == 0.0);
  const GridField zero = from_function(d, 101, [](Point2) { return 0.0; });
  const GridField one = from_function(d, 101, [](Point2) { return 1.0; });
  const FieldDistance u = compare_fields(zero, one);
  CHECK(u.sup == 1.0);
  CHECK(std::abs(u.l1 / pi - 1) < 0.05);
  const GridField u3 = from_function(d, 128, [](Point2 p) { return oracle::u_alpha(0.3, p.x, p.y); });
  const GridField u7 = from_function(d, 128, [](Point2 p) { return oracle::u_alpha(0.7, p.x, p.y); });
  CHECK(std::abs(compare_fields(u3, u7).sup - 0.4) <= 2 * u3.h());
  CHECK_THROWS_WITH_AS(compare_fields(a, from_function(d, 100, [](Point2) { return 0.0; })),
                       "grid mismatch", ValidationError);
}

TEST_CASE("conjecture harness on simple data") {
  const Domain d = Domain::unit_disk();
  ConjectureConfig cfg;
  cfg.solver_seeds.clear();
  const ConjectureReport c = conjecture_report(d, BoundaryData::constant(2.0), 48, cfg);
  REQUIRE(c.candidates.size() == 1);
  CHECK(c.candidates[0].survives);
  CHECK(c.candidates[0].dist_sup_to_ustar == 0.0);
  CHECK(c.summary().find(kUniquenessCaveat) != std::string::npos);

  cfg.lambdas = {-0.5, 0.0, 0.5};
  const ConjectureReport s = conjecture_report(d, BoundaryData::sin(), 64, cfg);
  CHECK(s.survivors().size() == 3);
  for (const auto& cand : s.candidates) CHECK(cand.dist_sup_to_ustar <= 3 * s.ustar.h());
  CHECK(s.to_csv().rfind("candidate,source,global_residual,tv,dist_sup_to_ustar\n", 0) == 0);
}
