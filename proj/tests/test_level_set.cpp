#include <cmath>
#include <numbers>

#include "doctest.h"
#include "medgrad/analytic.hpp"
#include "medgrad/error.hpp"
#include "medgrad/least_gradient.hpp"
#include "medgrad/level_set.hpp"
#include "medgrad/mvp_solver.hpp"
#include "oracles.hpp"

using namespace medgrad;
using std::numbers::pi;

namespace {
void check_params(const std::vector<double>& got, const std::vector<double>& want) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) < 1e-9);
}

double sup_vs(const GridField& f, const std::function<double(Point2)>& ref) {
  double e = 0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (f.masked(k)) e = std::max(e, std::abs(f.value(k) - ref(f.node(k))));
  }
  return e;
}

// Two-valued data: 1 on the upper arc, 0 on the lower one, joined by steep
// linear ramps around t = 0 and t = π.
BoundaryData two_level() {
  return BoundaryData::analytic("two-level", [](double t) {
    t = wrap_angle(t);
    const double w = 0.1;
    auto ramp = [&](double s) { return std::clamp(0.5 + s / (2 * w), 0.0, 1.0); };
    if (t < pi) return std::min(ramp(t), ramp(pi - t));
    return 0.0;
  });
}
}  // namespace

TEST_CASE("level endpoints") {
  check_params(level_endpoints(BoundaryData::abs_sin(), 0.5, 4096),
               {pi / 6, 5 * pi / 6, 7 * pi / 6, 11 * pi / 6});
  check_params(level_endpoints(BoundaryData::sin(), 0.0, 4096), {0.0, pi});
  check_params(level_endpoints(BoundaryData::abs_sin(), std::sqrt(0.5), 4096),
               {pi / 4, 3 * pi / 4, 5 * pi / 4, 7 * pi / 4});
  CHECK_THROWS_WITH_AS(level_endpoints(BoundaryData::abs_sin(), 1.5, 4096), "level outside range",
                       ValidationError);
  CHECK_THROWS_WITH_AS(level_endpoints(BoundaryData::abs_sin(), 0.0, 4096), "level outside range",
                       ValidationError);
  const BoundaryData wiggle =
      BoundaryData::analytic("wiggle", [](double t) { return std::sin(50 * t); });
  CHECK_THROWS_WITH_AS(level_endpoints(wiggle, 0.1, 64), "resolution too coarse", ValidationError);
}

TEST_CASE("construction at alpha reproduces the plateau family") {
  for (double lam : {0.5, 1 / std::sqrt(2.0)}) {
    const ChordSolution sol = build_solution(Domain::unit_disk(), BoundaryData::abs_sin(), lam);
    CHECK(sol.value_at({0, 0}) == doctest::Approx(lam).epsilon(1e-12));
    const GridField f = rasterize(sol, 256);
    const UAlphaParams a(lam);
    CHECK(sup_vs(f, [&](Point2 p) { return oracle::u_alpha(lam, p.x, p.y); }) <= 2 * f.h());
  }
}

TEST_CASE("sin data gives horizontal chords and the field y") {
  for (double lam : {-0.6, 0.0, 0.4}) {
    const ChordSolution sol = build_solution(Domain::unit_disk(), BoundaryData::sin(), lam);
    for (const auto& e : sol.elements()) {
      if (e.kind != SolutionElement::Kind::chord) continue;
      CHECK(std::abs(std::sin(e.t_a) - std::sin(e.t_b)) < 1e-8);
    }
    const GridField f = rasterize(sol, 128);
    CHECK(sup_vs(f, [](Point2 p) { return p.y; }) <= 2 * f.h());
  }
}

TEST_CASE("two-valued data splits into two plateaus") {
  const ChordSolution sol = build_solution(Domain::unit_disk(), two_level(), 0.5);
  CHECK(sol.value_at({0, 0.5}) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sol.value_at({0, -0.5}) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(sol.value_at({0.3, 0.9}) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("chords never cross and levels are monotone between them") {
  const BoundaryData g = BoundaryData::analytic(
      "bumpy", [](double t) { return std::sin(t) + 0.4 * std::cos(3 * t) + 0.2 * std::sin(5 * t); });
  for (double lam : {-0.5, 0.1, 0.7}) {
    const ChordSolution sol = build_solution(Domain::unit_disk(), g, lam);
    std::vector<SolutionElement> chords;
    for (const auto& e : sol.elements()) {
      if (e.kind == SolutionElement::Kind::chord) chords.push_back(e);
    }
    CHECK(chords.size() > 10);
    for (std::size_t a = 0; a < chords.size(); ++a) {
      for (std::size_t b = a + 1; b < chords.size(); ++b) {
        CHECK_FALSE(chords_cross(sol.domain(), chords[a], chords[b]));
      }
    }
    // Along a segment between midpoints of consecutive chords of one family
    // the value stays between the two chord levels.
    for (std::size_t a = 0; a + 1 < chords.size(); ++a) {
      const auto& c1 = chords[a];
      const auto& c2 = chords[a + 1];
      const Point2 m1 = 0.5 * (boundary_point(sol.domain(), c1.t_a) + boundary_point(sol.domain(), c1.t_b));
      const Point2 m2 = 0.5 * (boundary_point(sol.domain(), c2.t_a) + boundary_point(sol.domain(), c2.t_b));
      const double lo = std::min(c1.level, c2.level) - 1e-9;
      const double hi = std::max(c1.level, c2.level) + 1e-9;
      if (distance(m1, m2) > 0.2) continue;  // not neighbours in one sector
      for (int s = 0; s <= 10; ++s) {
        const double v = sol.value_at(m1 + (s / 10.0) * (m2 - m1));
        CHECK(v >= lo);
        CHECK(v <= hi);
      }
    }
    // Boundary trace.
    const GridField f = rasterize(sol, 128);
    for (int k = 0; k < 360; ++k) {
      const double t = 2 * pi * k / 360;
      CHECK(std::abs(sol.value_at(0.999999 * boundary_point(sol.domain(), t)) - g(t)) <= 2 * f.h());
    }
  }
}

TEST_CASE("constructed fields pass the local and maximum principle checks") {
  for (double lam : {0.5, 1 / std::sqrt(2.0), 0.9}) {
    const ChordSolution sol = build_solution(Domain::unit_disk(), BoundaryData::abs_sin(), lam);
    const GridField f = apply_dirichlet(rasterize(sol, 128), BoundaryData::abs_sin());
    CHECK(local_residual(f, SolverConfig{}).max_residual <= 3 * f.h());
    CHECK(max_principle_check(f, 2 * f.h()).flagged_count == 0);
  }
}

TEST_CASE("low plateaus need radii below sqrt(2) times the level") {
  // On the circle of radius r about the origin the median of u_λ is
  // max(λ, r/√2), so R(0) = 0.5 breaks the identity for λ = 0.3.
  const double lam = 0.3;
  const double brute = oracle::brute_circle_median(
      [&](double x, double y) { return oracle::u_alpha(lam, x, y); }, 0, 0, 0.5, 100000);
  CHECK(std::abs(brute - 0.5 / std::sqrt(2.0)) < 1e-4);
  const ChordSolution sol = build_solution(Domain::unit_disk(), BoundaryData::abs_sin(), lam);
  const GridField f = apply_dirichlet(rasterize(sol, 128), BoundaryData::abs_sin());
  const ResidualReport wide = local_residual(f, SolverConfig{});
  CHECK(wide.max_residual == doctest::Approx(brute - lam).epsilon(0.1));
  SolverConfig narrow;
  narrow.radius_rule = FractionRadius{0.4};
  CHECK(local_residual(f, narrow).max_residual <= 3 * f.h());
  CHECK(max_principle_check(f, 2 * f.h()).flagged_count == 0);
}

TEST_CASE("different levels give different solutions") {
  const GridField a = rasterize(build_solution(Domain::unit_disk(), BoundaryData::abs_sin(), 0.3), 128);
  const GridField b = rasterize(build_solution(Domain::unit_disk(), BoundaryData::abs_sin(), 0.7), 128);
  const FieldDistance d = compare_fields(a, b);
  CHECK(d.sup >= 0.2);
  CHECK(std::abs(d.sup - 0.4) <= 2 * a.h());
}

TEST_CASE("construction rejects unsuitable input") {
  const Domain l = Domain::polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}, true);
  CHECK_THROWS_WITH_AS(build_solution(l, BoundaryData::sin(), 0.0), "not strictly convex", ValidationError);
  CHECK_THROWS_AS(build_solution(Domain::unit_disk(), BoundaryData::sin(), 1.0), ValidationError);
}

TEST_CASE("polygon domains") {
  const Domain hex = Domain::polygon(
      {{1, 0}, {0.5, 0.9}, {-0.5, 0.9}, {-1, 0}, {-0.5, -0.9}, {0.5, -0.9}});
  const BoundaryData g = BoundaryData::analytic("cos", [](double t) { return std::cos(t); });
  const ChordSolution sol = build_solution(hex, g, 0.2);
  const GridField f = rasterize(sol, 96);
  const auto [lo, hi] = f.range();
  CHECK(lo >= -1 - 1e-12);
  CHECK(hi <= 1 + 1e-12);
  CHECK(sol.to_csv().rfind("kind,level,t_a,t_b\n", 0) == 0);
  CHECK(sol.to_svg().find("<svg") != std::string::npos);
}
