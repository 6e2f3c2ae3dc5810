#include <cmath>
#include <random>

#include "doctest.h"
#include "medgrad/error.hpp"
#include "medgrad/mvp_solver.hpp"
#include "medgrad/one_laplacian.hpp"
#include "medgrad/parallel.hpp"
#include "oracles.hpp"

using namespace medgrad;

namespace {
SmoothTestFunction ellipse() {
  return SmoothTestFunction(
      [](Point2 p) { return p.x * p.x + 2 * p.y * p.y; },
      [](Point2 p) { return Point2{2 * p.x, 4 * p.y}; }, [](Point2) { return Sym2{2, 0, 4}; });
}
}  // namespace

TEST_CASE("delta1 examples") {
  const SmoothTestFunction aff([](Point2 p) { return 3 * p.x - p.y + 1; });
  CHECK(std::abs(delta1(aff, {0.2, 0.7})) < 1e-6);
  CHECK(delta1(ellipse(), {1, 0}) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(std::abs(oracle::cd_delta1([](double x, double y) { return x * x + 2 * y * y; }, 1, 0, 1e-5) -
                 4.0) < 1e-4);
  const SmoothTestFunction radial([](Point2 p) { return norm(p); });
  CHECK(delta1(radial, {1, 0}) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_THROWS_WITH_AS(delta1(ellipse(), {0, 0}), "vanishing gradient: Δ₁ undefined here",
                       ValidationError);
}

TEST_CASE("analytic derivatives are validated") {
  CHECK_THROWS_AS(SmoothTestFunction([](Point2 p) { return p.x * p.x; },
                                     [](Point2 p) { return Point2{3 * p.x, 0}; },
                                     [](Point2) { return Sym2{2, 0, 0}; }),
                  ValidationError);
}

TEST_CASE("delta1 of random quadratics against the difference oracle") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 200; ++k) {
    const Point2 x0{u(rng), u(rng)};
    const Point2 l{u(rng), u(rng)};
    const Sym2 m{u(rng), u(rng), u(rng)};
    const double q = u(rng);
    const SmoothTestFunction phi = SmoothTestFunction::quadratic(x0, q, l, m);
    const Point2 p{u(rng) * 0.5, u(rng) * 0.5};
    if (norm(phi.gradient(p)) < 0.1) continue;
    const double want =
        oracle::cd_delta1([&](double x, double y) { return phi({x, y}); }, p.x, p.y, 1e-3);
    CHECK(std::abs(delta1(phi, p) - want) < 1e-6 * (1 + std::abs(want)) * 10);
    // Scale covariance.
    const double c = 0.5 + std::abs(u(rng)) * 3;
    const Sym2 cm{c * m.xx, c * m.xy, c * m.yy};
    CHECK(delta1(SmoothTestFunction::quadratic(x0, c * q, c * l, cm), p) ==
          doctest::Approx(c * delta1(phi, p)).epsilon(1e-10));
    // Adding an affine function changes only the gradient direction.
    const Point2 a{u(rng), u(rng)};
    const Point2 g2 = phi.gradient(p) + a;
    if (norm(g2) < 0.1) continue;
    const double tr = m.xx + m.yy;
    const double hand = tr - (m.xx * g2.x * g2.x + 2 * m.xy * g2.x * g2.y + m.yy * g2.y * g2.y) / dot(g2, g2);
    CHECK(delta1(SmoothTestFunction::quadratic(x0, q, l + a, m), p) == doctest::Approx(hand).epsilon(1e-10));
  }
}

TEST_CASE("expansion residual") {
  const SmoothTestFunction aff([](Point2 p) { return 3 * p.x - p.y + 1; });
  for (double r : {0.5, 0.1, 0.01}) {
    const ExpansionResidual e = expansion_residual(aff, {0.1, 0.2}, r, 4096);
    CHECK(std::abs(e.lhs) < 1e-12);
    CHECK(std::abs(e.rhs) < 1e-6 * r * r);
  }
  const ExpansionResidual e = expansion_residual(ellipse(), {1, 0}, 0.1, 65536);
  CHECK(e.rhs == doctest::Approx(-0.02).epsilon(1e-12));
  CHECK_THROWS_AS(expansion_residual(ellipse(), {1, 0}, 0.1, 512), ValidationError);

  // lhs scales with c under c·φ + b.
  const SmoothTestFunction scaled([](Point2 p) { return 3 * (p.x * p.x + 2 * p.y * p.y) - 7; });
  const ExpansionResidual s = expansion_residual(scaled, {1, 0}, 0.1, 65536);
  CHECK(s.lhs == doctest::Approx(3 * e.lhs).epsilon(1e-9));
  CHECK(s.rhs == doctest::Approx(3 * e.rhs).epsilon(1e-5));
}

TEST_CASE("expansion error decays for a cubic perturbation") {
  // The quadratic case is exact to rounding, and so is any perturbation even
  // in y. A y³ term breaks that symmetry and makes the o(r²) remainder visible.
  const SmoothTestFunction phi([](Point2 p) { return p.x * p.x + 2 * p.y * p.y + p.y * p.y * p.y; });
  double prev = 0;
  for (double r : {0.1, 0.05, 0.025}) {
    const double err = expansion_residual(phi, {1, 0}, r, 65536).normalized();
    if (prev > 0) CHECK(prev / err >= 1.5);
    prev = err;
  }
}

TEST_CASE("viscosity scan controls") {
  const Domain d = Domain::unit_disk();
  GridField aff = apply_dirichlet(from_function(d, 65, [](Point2 p) { return p.x - 0.5 * p.y; }),
                                  BoundaryData::affine(1, -0.5, 0));
  const ViscosityReport ra = viscosity_touch_scan(aff, 200, 7);
  CHECK(ra.trials.size() == 400);
  CHECK(ra.violations == 0);
  CHECK(ra.admissible > 0);

  const GridField para = apply_dirichlet(from_function(d, 65, [](Point2 p) { return dot(p, p); }),
                                         BoundaryData::constant(1.0));
  const ViscosityReport rp = viscosity_touch_scan(para, 200, 7);
  CHECK(rp.violations >= 1);
  CHECK(rp.to_csv().rfind("trial,x0x,x0y,side,delta1,admissible,violation\n", 0) == 0);

  set_thread_count(3);
  const ViscosityReport rp3 = viscosity_touch_scan(para, 200, 7);
  set_thread_count(1);
  CHECK(rp3.to_csv() == rp.to_csv());
}
