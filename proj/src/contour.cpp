#include "medgrad/contour.hpp"

#include <array>
#include <cstdint>
#include <unordered_map>

namespace medgrad {

namespace {

struct Segment {
  std::int64_t edge_a;
  std::int64_t edge_b;
  Point2 a;
  Point2 b;
};

// Edge ids: horizontal edge from node (i,j) to (i+1,j) is 2k, vertical edge
// from (i,j) to (i,j+1) is 2k+1, with k the node index.
std::vector<Segment> march(const GridField& field, double level) {
  std::vector<Segment> segs;
  const int nx = field.nx();
  const int ny = field.ny();
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const std::size_t k0 = field.index(i, j);
      const std::size_t k1 = k0 + 1;
      const std::size_t k3 = k0 + nx;
      const std::size_t k2 = k3 + 1;
      if (!field.masked(k0) || !field.masked(k1) || !field.masked(k2) || !field.masked(k3)) {
        continue;
      }
      const std::array<double, 4> v{field.value(k0), field.value(k1), field.value(k2),
                                    field.value(k3)};
      const std::array<Point2, 4> p{field.node(i, j), field.node(i + 1, j),
                                    field.node(i + 1, j + 1), field.node(i, j + 1)};
      int code = 0;
      for (int c = 0; c < 4; ++c) {
        if (v[c] >= level) code |= 1 << c;
      }
      if (code == 0 || code == 15) continue;

      // Cell edges in order bottom (0-1), right (1-2), top (3-2), left (0-3).
      const std::array<std::int64_t, 4> ids{
          2 * static_cast<std::int64_t>(k0), 2 * static_cast<std::int64_t>(k1) + 1,
          2 * static_cast<std::int64_t>(k3), 2 * static_cast<std::int64_t>(k0) + 1};
      constexpr std::array<std::array<int, 2>, 4> ends{{{0, 1}, {1, 2}, {3, 2}, {0, 3}}};
      auto crossing = [&](int e) {
        const int a = ends[e][0];
        const int b = ends[e][1];
        const double t = (level - v[a]) / (v[b] - v[a]);
        return p[a] + t * (p[b] - p[a]);
      };
      auto emit = [&](int e0, int e1) {
        segs.push_back({ids[e0], ids[e1], crossing(e0), crossing(e1)});
      };
      const bool centre_above = 0.25 * (v[0] + v[1] + v[2] + v[3]) >= level;
      switch (code) {
        case 1: case 14: emit(3, 0); break;
        case 2: case 13: emit(0, 1); break;
        case 3: case 12: emit(3, 1); break;
        case 4: case 11: emit(1, 2); break;
        case 6: case 9: emit(0, 2); break;
        case 7: case 8: emit(3, 2); break;
        case 5:  // corners 0 and 2 above
          if (centre_above) { emit(3, 2); emit(0, 1); } else { emit(3, 0); emit(1, 2); }
          break;
        case 10:  // corners 1 and 3 above
          if (centre_above) { emit(3, 0); emit(1, 2); } else { emit(0, 1); emit(3, 2); }
          break;
        default: break;
      }
    }
  }
  return segs;
}

}  // namespace

std::vector<Polyline> extract_contours(const GridField& field, double level) {
  const std::vector<Segment> segs = march(field, level);
  std::unordered_map<std::int64_t, std::array<int, 2>> by_edge;
  by_edge.reserve(segs.size() * 2);
  auto attach = [&](std::int64_t e, int s) {
    auto [it, inserted] = by_edge.try_emplace(e, std::array<int, 2>{-1, -1});
    auto& slot = it->second;
    if (slot[0] < 0) slot[0] = s; else slot[1] = s;
  };
  for (int s = 0; s < static_cast<int>(segs.size()); ++s) {
    attach(segs[s].edge_a, s);
    attach(segs[s].edge_b, s);
  }
  auto other = [&](std::int64_t e, int s) {
    const auto& slot = by_edge.at(e);
    return slot[0] == s ? slot[1] : slot[0];
  };

  std::vector<char> used(segs.size(), 0);
  std::vector<Polyline> out;
  // Walk from open ends first, then close the remaining loops.
  auto walk = [&](int start, std::int64_t start_edge) {
    Polyline line;
    int s = start;
    std::int64_t entry = start_edge;
    line.points.push_back(segs[s].edge_a == entry ? segs[s].a : segs[s].b);
    while (s >= 0 && !used[s]) {
      used[s] = 1;
      const bool forward = segs[s].edge_a == entry;
      const std::int64_t exit = forward ? segs[s].edge_b : segs[s].edge_a;
      line.points.push_back(forward ? segs[s].b : segs[s].a);
      const int next = other(exit, s);
      if (next >= 0 && used[next]) {
        line.closed = (next == start);
        break;
      }
      s = next;
      entry = exit;
    }
    out.push_back(std::move(line));
  };
  for (int s = 0; s < static_cast<int>(segs.size()); ++s) {
    if (used[s]) continue;
    if (other(segs[s].edge_a, s) < 0) walk(s, segs[s].edge_a);
    else if (other(segs[s].edge_b, s) < 0) walk(s, segs[s].edge_b);
  }
  for (int s = 0; s < static_cast<int>(segs.size()); ++s) {
    if (!used[s]) walk(s, segs[s].edge_a);
  }
  return out;
}

double contour_length(const GridField& field, double level) {
  double total = 0.0;
  for (const auto& s : march(field, level)) total += distance(s.a, s.b);
  return total;
}

}  // namespace medgrad
