#include "medgrad/level_set.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "medgrad/error.hpp"
#include "medgrad/format.hpp"

namespace medgrad {

using detail::PolygonEdge;
using detail::PolygonNode;
using detail::SectorChord;
using detail::SectorNode;

namespace {

constexpr double kLevelCollapse = 1e-9;
constexpr double kMinStep = 1e-9;
constexpr double kParamTol = 1e-10;

// g sampled on an open parameter interval (t0, t0 + len) through the local
// coordinate s ∈ [0, len].
struct ArcSamples {
  const BoundaryData* g;
  double t0;
  double len;
  std::vector<double> s;
  std::vector<double> v;

  ArcSamples(const BoundaryData& data, double start, double length, int intervals)
      : g(&data), t0(start), len(length) {
    s.resize(static_cast<std::size_t>(intervals) + 1);
    v.resize(s.size());
    for (int i = 0; i <= intervals; ++i) {
      s[i] = len * i / intervals;
      v[i] = at(s[i]);
    }
  }

  double at(double local) const { return (*g)(wrap_angle(t0 + local)); }
};

int classify(double v, double level, double tol) {
  const double d = v - level;
  if (std::abs(d) <= tol) return 0;
  return d > 0.0 ? 1 : -1;
}

// Bisects on [lo, hi] for the switch of `inside`, with inside(lo) false and
// inside(hi) true.
template <class Pred>
double bisect(double lo, double hi, Pred inside) {
  while (hi - lo > kParamTol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (inside(mid)) hi = mid; else lo = mid;
  }
  return 0.5 * (lo + hi);
}

// Local parameters where g − level changes class along the samples. Zero runs
// (|g − level| ≤ tol) contribute both ends, except a single sample at a
// transversal crossing.
std::vector<double> crossings(const ArcSamples& arc, double level, double tol) {
  const std::size_t m = arc.s.size();
  std::vector<int> c(m);
  for (std::size_t i = 0; i < m; ++i) c[i] = classify(arc.v[i], level, tol);
  auto zero = [&](double s) { return classify(arc.at(s), level, tol) == 0; };

  std::vector<double> out;
  std::size_t i = 0;
  while (i + 1 < m) {
    if (c[i] != 0 && c[i + 1] != 0) {
      if (c[i] != c[i + 1]) {
        const int from = c[i];
        out.push_back(bisect(arc.s[i], arc.s[i + 1], [&](double s) {
          return classify(arc.at(s), level, tol) != from;
        }));
      }
      ++i;
      continue;
    }
    if (c[i] == 0) {  // zero run touching the start of the interval
      ++i;
      continue;
    }
    // c[i] != 0 and c[i + 1] == 0: a zero run starts.
    std::size_t k = i + 1;
    while (k + 1 < m && c[k + 1] == 0) ++k;
    const double start = bisect(arc.s[i], arc.s[i + 1], zero);
    if (k + 1 >= m) {
      out.push_back(start);
      break;
    }
    const double end = bisect(arc.s[k], arc.s[k + 1], [&](double s) { return !zero(s); });
    if (k == i + 1 && c[i] != c[k + 1]) {
      out.push_back(0.5 * (start + end));
    } else {
      out.push_back(start);
      out.push_back(end);
    }
    i = k + 1;
  }
  return out;
}

int intervals_for(double len, int resolution) {
  return std::max(32, static_cast<int>(std::ceil(resolution * len / kTwoPi)));
}

std::vector<double> endpoints_once(const BoundaryData& g, double lam, int resolution) {
  // Start the scan where g is farthest from the level so that no crossing
  // sits at the seam.
  double start = 0.0;
  double best = -1.0;
  for (int i = 0; i < resolution; ++i) {
    const double t = kTwoPi * i / resolution;
    const double d = std::abs(g(t) - lam);
    if (d > best) {
      best = d;
      start = t;
    }
  }
  const ArcSamples arc(g, start, kTwoPi, resolution);
  std::vector<double> out;
  for (double s : crossings(arc, lam, g.flat_tolerance())) out.push_back(wrap_angle(start + s));
  std::sort(out.begin(), out.end());
  return out;
}

struct Builder {
  const Domain& domain;
  const BoundaryData& g;
  BuildOptions options;
  double tol;

  std::unique_ptr<SectorNode> edge_sector(double t0, double len, double level) {
    if (len < 1e-12) return nullptr;
    const ArcSamples arc(g, t0, len, intervals_for(len, options.resolution));
    double dev = 0.0;
    for (double v : arc.v) {
      if (std::abs(v - level) > std::abs(dev)) dev = v - level;
    }
    if (std::abs(dev) <= std::max(kLevelCollapse, tol)) return nullptr;
    return sweep(arc, level, dev > 0.0 ? 1 : -1);
  }

  std::unique_ptr<PolygonNode> polygon(double level, const std::vector<double>& t,
                                       bool closed) {
    auto poly = std::make_unique<PolygonNode>();
    poly->level = level;
    const std::size_t n = t.size();
    const std::size_t edges = closed ? n : n - 1;
    for (std::size_t j = 0; j < edges; ++j) {
      const double a = t[j];
      const double b = t[(j + 1) % n];
      double len = b - a;
      if (closed && j + 1 == n) len += kTwoPi;
      if (closed && n == 1) len = kTwoPi;
      PolygonEdge e{wrap_angle(a), wrap_angle(b), edge_sector(a, len, level)};
      poly->edges.push_back(std::move(e));
    }
    return poly;
  }

  std::unique_ptr<SectorNode> sweep(const ArcSamples& arc, double entry, int sigma) {
    double ext = entry;
    for (double v : arc.v) {
      if (sigma * (v - ext) > 0.0) ext = v;
    }
    auto node = std::make_unique<SectorNode>();
    node->entry_level = entry;
    node->orientation = sigma;
    node->chords.push_back({entry, wrap_angle(arc.t0), wrap_angle(arc.t0 + arc.len)});

    double level = entry;
    double sa = 0.0;
    double sb = arc.len;
    double step = options.level_step_control;
    while (true) {
      const double remaining = sigma * (ext - level);
      if (remaining <= kLevelCollapse) break;
      step = std::min(step, remaining);
      const double trial = level + sigma * step;
      const std::vector<double> e = crossings(arc, trial, tol);
      const bool paired = e.size() == 2;
      const bool small_move = paired && std::abs(e[0] - sa) <= options.max_endpoint_move &&
                              std::abs(e[1] - sb) <= options.max_endpoint_move;
      if (paired && (small_move || step <= kMinStep)) {
        node->chords.push_back({trial, wrap_angle(arc.t0 + e[0]), wrap_angle(arc.t0 + e[1])});
        level = trial;
        sa = e[0];
        sb = e[1];
        step = std::min(2.0 * step, options.level_step_control);
        continue;
      }
      if (step > kMinStep) {
        step *= 0.5;
        continue;
      }
      if (e.size() >= 3) {
        // First level with three or more endpoints: a new generalized polygon.
        node->chords.push_back(
            {trial, wrap_angle(arc.t0 + e.front()), wrap_angle(arc.t0 + e.back())});
        std::vector<double> t;
        for (double s : e) t.push_back(arc.t0 + s);
        node->child = polygon(trial, t, false);
      }
      break;
    }
    return node;
  }
};

Point2 bp(const Domain& d, double t) { return d.boundary_point(t); }

// Positive when p lies on the cap side of the chord a→b (the side holding the
// ccw arc from a to b).
double cap_side(const Domain& d, double ta, double tb, Point2 p) {
  const Point2 a = bp(d, ta);
  const Point2 b = bp(d, tb);
  return -cross(b - a, p - a);
}

double line_distance(const Domain& d, double ta, double tb, Point2 p) {
  const Point2 a = bp(d, ta);
  const Point2 b = bp(d, tb);
  const double len = norm(b - a);
  if (len == 0.0) return distance(a, p);
  return std::abs(cross(b - a, p - a)) / len;
}

}  // namespace

std::vector<double> level_endpoints(const BoundaryData& g, double lam, int resolution) {
  if (resolution < 8) throw ValidationError("resolution must be at least 8");
  const auto [lo, hi] = g.range();
  if (!(lam > lo && lam < hi)) throw ValidationError("level outside range");
  std::vector<double> coarse = endpoints_once(g, lam, resolution);
  const std::vector<double> fine = endpoints_once(g, lam, 2 * resolution);
  if (coarse.size() != fine.size()) throw ValidationError("resolution too coarse");
  return coarse;
}

ChordSolution::ChordSolution(Domain domain, BoundaryData g, double base_level,
                             std::unique_ptr<PolygonNode> root)
    : domain_(std::move(domain)), g_(std::move(g)), base_level_(base_level),
      root_(std::move(root)) {
  const double tol = g_.flat_tolerance();
  auto flat_arc = [&](double ta, double tb, double level) {
    double len = tb - ta;
    if (len <= 0.0) len += kTwoPi;
    for (int i = 0; i <= 64; ++i) {
      if (std::abs(g_(wrap_angle(ta + len * i / 64)) - level) > tol) return false;
    }
    return true;
  };
  auto add_chord = [&](double level, double ta, double tb) {
    for (std::size_t i = 0; i < elements_.size(); ++i) {
      const auto& e = elements_[i];
      if (e.kind == SolutionElement::Kind::chord && e.level == level &&
          ((e.t_a == ta && e.t_b == tb) || (e.t_a == tb && e.t_b == ta))) {
        return i;
      }
    }
    elements_.push_back({SolutionElement::Kind::chord, level, ta, tb});
    return elements_.size() - 1;
  };
  // Depth-first flattening; the closing chord of a child polygon is the last
  // chord of its parent sector.
  auto visit_polygon = [&](auto&& self, const PolygonNode& poly,
                           std::optional<std::size_t> closing) -> void {
    Plateau plateau{poly.level, {}};
    if (closing) plateau.elements.push_back(*closing);
    std::vector<std::pair<const SectorNode*, std::size_t>> pending;
    for (const auto& e : poly.edges) {
      std::size_t idx;
      if (!e.sector && flat_arc(e.t_a, e.t_b, poly.level)) {
        elements_.push_back({SolutionElement::Kind::boundary_arc, poly.level, e.t_a, e.t_b});
        idx = elements_.size() - 1;
      } else {
        idx = add_chord(poly.level, e.t_a, e.t_b);
      }
      plateau.elements.push_back(idx);
      if (e.sector) pending.emplace_back(e.sector.get(), idx);
    }
    plateaus_.push_back(std::move(plateau));
    for (const auto& [sector, idx] : pending) {
      std::size_t last = idx;
      for (std::size_t c = 1; c < sector->chords.size(); ++c) {
        const auto& ch = sector->chords[c];
        last = add_chord(ch.level, ch.t_a, ch.t_b);
      }
      if (sector->child) self(self, *sector->child, last);
    }
  };
  visit_polygon(visit_polygon, *root_, std::nullopt);
}

std::size_t ChordSolution::chord_count() const {
  return static_cast<std::size_t>(std::count_if(elements_.begin(), elements_.end(), [](const auto& e) {
    return e.kind == SolutionElement::Kind::chord;
  }));
}

double ChordSolution::polygon_value(const PolygonNode& poly, Point2 p) const {
  for (const auto& e : poly.edges) {
    if (cap_side(domain_, e.t_a, e.t_b, p) > 0.0) {
      return e.sector ? sector_value(*e.sector, p) : poly.level;
    }
  }
  return poly.level;
}

double ChordSolution::sector_value(const SectorNode& sector, Point2 p) const {
  const auto& ch = sector.chords;
  auto inside = [&](std::size_t i) { return cap_side(domain_, ch[i].t_a, ch[i].t_b, p) > 0.0; };
  // Caps are nested, so the deepest cap holding p is found by bisection.
  std::size_t lo = 0;
  std::size_t hi = ch.size();
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (inside(mid)) lo = mid; else hi = mid;
  }
  const SectorChord& a = ch[lo];
  const double da = line_distance(domain_, a.t_a, a.t_b, p);
  if (lo + 1 < ch.size()) {
    const SectorChord& b = ch[lo + 1];
    const double db = line_distance(domain_, b.t_a, b.t_b, p);
    if (da + db == 0.0) return a.level;
    return a.level + (b.level - a.level) * da / (da + db);
  }
  if (sector.child) return polygon_value(*sector.child, p);
  // Past the last chord: blend toward the boundary datum.
  const double db = std::max(0.0, domain_.signed_distance(p));
  if (da + db == 0.0) return a.level;
  const double gb = g_(domain_.nearest_parameter(p));
  return a.level + (gb - a.level) * da / (da + db);
}

double ChordSolution::value_at(Point2 p) const {
  if (!root_) throw InternalError("empty chord solution");
  return polygon_value(*root_, p);
}

std::string ChordSolution::to_csv() const {
  std::ostringstream out;
  out << "kind,level,t_a,t_b\n";
  for (const auto& e : elements_) {
    out << (e.kind == SolutionElement::Kind::chord ? "chord" : "arc") << ','
        << format_double(e.level) << ',' << format_double(e.t_a) << ','
        << format_double(e.t_b) << '\n';
  }
  return out.str();
}

std::string ChordSolution::to_svg(int pixels) const {
  const BBox b = domain_.bbox();
  const double span = std::max(b.xmax - b.xmin, b.ymax - b.ymin);
  const double scale = (pixels - 20) / span;
  auto sx = [&](double x) { return 10.0 + (x - b.xmin) * scale; };
  auto sy = [&](double y) { return 10.0 + (b.ymax - y) * scale; };
  double lo = base_level_;
  double hi = base_level_;
  for (const auto& e : elements_) {
    lo = std::min(lo, e.level);
    hi = std::max(hi, e.level);
  }
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pixels << "\" height=\""
      << pixels << "\">\n<polygon fill=\"none\" stroke=\"black\" points=\"";
  for (int i = 0; i < 720; ++i) {
    const Point2 q = domain_.boundary_point(kTwoPi * i / 720);
    out << sx(q.x) << ',' << sy(q.y) << ' ';
  }
  out << "\"/>\n";
  for (const auto& e : elements_) {
    if (e.kind != SolutionElement::Kind::chord) continue;
    const double f = hi > lo ? (e.level - lo) / (hi - lo) : 0.5;
    const int red = static_cast<int>(std::lround(255 * f));
    const Point2 a = domain_.boundary_point(e.t_a);
    const Point2 c = domain_.boundary_point(e.t_b);
    out << "<line x1=\"" << sx(a.x) << "\" y1=\"" << sy(a.y) << "\" x2=\"" << sx(c.x)
        << "\" y2=\"" << sy(c.y) << "\" stroke=\"rgb(" << red << ",0," << 255 - red
        << ")\" stroke-width=\"0.5\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

ChordSolution build_solution(const Domain& domain, const BoundaryData& g, double lam,
                             const BuildOptions& options) {
  if (!domain.strictly_convex()) throw ValidationError("not strictly convex");
  if (!(options.level_step_control > 0.0)) throw ValidationError("level step must be positive");
  if (!(options.max_endpoint_move > 0.0)) throw ValidationError("endpoint move must be positive");
  std::vector<double> seed;
  try {
    seed = level_endpoints(g, lam, options.resolution);
  } catch (const ValidationError& e) {
    if (std::string(e.what()) == "resolution too coarse") {
      throw ValidationError("endpoint resolution exceeded");
    }
    throw;
  }
  Builder builder{domain, g, options, g.flat_tolerance()};
  auto root = builder.polygon(lam, seed, true);
  return ChordSolution(domain, g, lam, std::move(root));
}

GridField rasterize(const ChordSolution& sol, int n) {
  return from_function(sol.domain(), n, [&](Point2 p) { return sol.value_at(p); });
}

GridField rasterize(const ChordSolution& sol, int nx, int ny) {
  return from_function(sol.domain(), nx, ny, [&](Point2 p) { return sol.value_at(p); });
}

bool chords_cross(const Domain& domain, const SolutionElement& a, const SolutionElement& b) {
  if (a.kind != SolutionElement::Kind::chord || b.kind != SolutionElement::Kind::chord) {
    return false;
  }
  const Point2 a1 = domain.boundary_point(a.t_a);
  const Point2 a2 = domain.boundary_point(a.t_b);
  const Point2 b1 = domain.boundary_point(b.t_a);
  const Point2 b2 = domain.boundary_point(b.t_b);
  constexpr double kGuard = 1e-12;
  auto side = [&](Point2 p, Point2 q, Point2 r) {
    const double len = norm(q - p);
    if (len == 0.0) return 0.0;
    const double s = cross(q - p, r - p) / len;
    return std::abs(s) <= kGuard ? 0.0 : s;
  };
  const double o1 = side(a1, a2, b1);
  const double o2 = side(a1, a2, b2);
  const double o3 = side(b1, b2, a1);
  const double o4 = side(b1, b2, a2);
  return o1 * o2 < 0.0 && o3 * o4 < 0.0;
}

}  // namespace medgrad
