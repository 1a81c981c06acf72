#pragma once

// Slow, obviously-correct reference implementations used only by tests.
// They deliberately avoid sharing code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "planar_homotopy/raster.hpp"

namespace oracle {

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int a) { return p[a] == a ? a : p[a] = find(p[a]); }
  void join(int a, int b) { p[find(a)] = find(b); }
};

// Partition of occupied cells (plus infinity as index n*n) into classes,
// returned as a canonical label per cell: classes numbered by smallest
// member index. -1 for unoccupied.
inline std::vector<int> components(const ph::Raster& r, bool eight) {
  const int n = r.side();
  const int inf = n * n;
  UnionFind uf(n * n + 1);
  auto occ = [&](int x, int y) { return x >= 0 && y >= 0 && x < n && y < n && r.test(x, y); };
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      if (!occ(x, y)) continue;
      if (occ(x + 1, y)) uf.join(y * n + x, y * n + x + 1);
      if (occ(x, y + 1)) uf.join(y * n + x, (y + 1) * n + x);
      if (eight && occ(x + 1, y + 1)) uf.join(y * n + x, (y + 1) * n + x + 1);
      if (eight && occ(x - 1, y + 1)) uf.join(y * n + x, (y + 1) * n + x - 1);
      if (r.includes_infinity() && (x == 0 || y == 0 || x == n - 1 || y == n - 1)) uf.join(y * n + x, inf);
    }
  std::vector<int> label(n * n + 1, -1), rootlabel(n * n + 1, -1);
  int next = 0;
  for (int i = 0; i <= n * n; ++i) {
    bool o = i == inf ? r.includes_infinity() : r.test(i % n, i / n);
    if (!o) continue;
    int root = uf.find(i);
    if (rootlabel[root] == -1) rootlabel[root] = next++;
    label[i] = rootlabel[root];
  }
  return label;
}

inline int component_count(const ph::Raster& r, bool eight) {
  auto l = components(r, eight);
  return l.empty() ? 0 : *std::max_element(l.begin(), l.end()) + 1;
}

inline double diameter(const std::vector<ph::Cell>& cells, int k) {
  double best = 0;
  for (auto& a : cells)
    for (auto& b : cells) best = std::max(best, std::hypot(double(a.x - b.x), double(a.y - b.y)));
  return best / double(1 << k);
}

inline double hausdorff(const ph::Raster& a, const ph::Raster& b) {
  auto pa = ph::occupied_cells(a), pb = ph::occupied_cells(b);
  auto directed = [](const std::vector<ph::Cell>& p, const std::vector<ph::Cell>& q) {
    double worst = 0;
    for (auto& s : p) {
      double best = 1e300;
      for (auto& t : q) best = std::min(best, std::hypot(double(s.x - t.x), double(s.y - t.y)));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(pa, pb), directed(pb, pa)) / double(1 << a.resolution());
}

// Sierpinski carpet holes by cell-centre test, written independently of the
// scenes module: a cell is a hole cell iff its centre lies strictly inside a
// removed middle square of depth <= d.
inline bool carpet_hole_cell(int x, int y, int k, int depth) {
  double cx = (x + 0.5) / double(1 << k), cy = (y + 0.5) / double(1 << k);
  for (int j = 1; j <= depth; ++j) {
    double s = std::pow(3.0, j);
    double fx = cx * s, fy = cy * s;
    int ix = int(std::floor(fx)), iy = int(std::floor(fy));
    if (ix % 3 == 1 && iy % 3 == 1 && fx - ix > 0 && fy - iy > 0) return true;
  }
  return false;
}

inline ph::Raster random_raster(std::mt19937_64& rng, int k, double density) {
  ph::Raster r(k);
  std::bernoulli_distribution bit(density);
  for (int y = 0; y < r.side(); ++y)
    for (int x = 0; x < r.side(); ++x) r.set(x, y, bit(rng));
  return r;
}

// Maximal vertical runs and their horizontal contacts, counted the slow way.
struct RunCounts {
  int nodes = 0;
  int edges = 0;
};

inline RunCounts run_graph_counts(const ph::Raster& m) {
  struct Run {
    int x, y0, y1;
  };
  std::vector<Run> runs;
  for (int x = 0; x < m.side(); ++x)
    for (int y = 0; y < m.side(); ++y) {
      if (!m.test(x, y)) continue;
      if (y > 0 && m.test(x, y - 1)) continue;
      int e = y;
      while (e + 1 < m.side() && m.test(x, e + 1)) ++e;
      runs.push_back({x, y, e});
    }
  std::set<std::pair<int, int>> edges;
  for (std::size_t i = 0; i < runs.size(); ++i)
    for (std::size_t j = 0; j < runs.size(); ++j) {
      if (runs[j].x != runs[i].x + 1) continue;
      if (std::max(runs[i].y0, runs[j].y0) <= std::min(runs[i].y1, runs[j].y1)) edges.insert({int(i), int(j)});
    }
  return {int(runs.size()), int(edges.size())};
}

}  // namespace oracle
