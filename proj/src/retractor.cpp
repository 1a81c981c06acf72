#include "planar_homotopy/retractor.hpp"

#include <algorithm>
#include <stdexcept>

#include "planar_homotopy/parallel.hpp"

namespace ph {

bool Spine::bijective() const {
  if (region_puncture.size() != regions.size()) return false;
  for (int p : region_puncture)
    if (p < 0) return false;
  std::vector<int> hits(regions.size(), 0);
  for (int r : puncture_region) {
    if (r < 0 || static_cast<std::size_t>(r) >= regions.size()) return false;
    ++hits[r];
  }
  for (int h : hits)
    if (h != 1) return false;
  return true;
}

namespace {

constexpr int d4x[4] = {1, -1, 0, 0}, d4y[4] = {0, 0, 1, -1};

Raster outer_ring(const Raster& u) {
  Raster ring(u.resolution());
  const int n = u.side();
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      if (u.test(x, y)) continue;
      bool near = u.includes_infinity() && (x == 0 || y == 0 || x == n - 1 || y == n - 1);
      for (int dy = -1; dy <= 1 && !near; ++dy)
        for (int dx = -1; dx <= 1 && !near; ++dx) near = u.get(x + dx, y + dy);
      if (near) ring.set(x, y);
    }
  return ring;
}

bool near8(const Raster& r, int x, int y) {
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx)
      if (r.get(x + dx, y + dy)) return true;
  return false;
}

// would adding c to r complete a filled 2x2 block?
bool closes_block(const Raster& r, Cell c) {
  for (int oy = -1; oy <= 0; ++oy)
    for (int ox = -1; ox <= 0; ++ox) {
      int filled = 0;
      for (int dy = 0; dy <= 1; ++dy)
        for (int dx = 0; dx <= 1; ++dx) {
          int x = c.x + ox + dx, y = c.y + oy + dy;
          if (x == c.x && y == c.y) continue;
          filled += r.get(x, y);
        }
      if (filled == 3) return true;
    }
  return false;
}

std::vector<Component> regions_of(const Raster& u, const Raster& skeleton) {
  Raster free = subtract(u, skeleton);
  free.set_includes_infinity(u.includes_infinity());
  return label_components(free, Adjacency::Four).members;
}

void assign_regions(Spine& s, const Raster& u, const std::vector<Cell>& punctures, bool root_at_infinity) {
  Raster free = subtract(u, s.skeleton);
  free.set_includes_infinity(u.includes_infinity());
  auto fam = label_components(free, Adjacency::Four);
  s.regions = fam.members;
  s.region_puncture.assign(s.regions.size(), -1);
  s.puncture_region.clear();
  auto note = [&](int idx, int label) {
    s.puncture_region.push_back(label);
    if (label < 0) return;
    s.region_puncture[label] = s.region_puncture[label] == -1 ? idx : -2;  // -2: shared
  };
  int idx = 0;
  if (root_at_infinity) note(idx++, fam.infinity_label());
  for (Cell c : punctures) note(idx++, fam.label_at(c));
}

}  // namespace

Spine build_spine(const Raster& u, const std::vector<Cell>& punctures, bool root_at_infinity) {
  if (u.empty()) throw std::invalid_argument("build_spine needs a nonempty domain");
  if (punctures.empty() && !root_at_infinity) throw std::invalid_argument("build_spine needs a puncture");
  if (root_at_infinity && !u.includes_infinity()) throw std::invalid_argument("root at infinity but the domain misses infinity");
  for (Cell c : punctures)
    if (!u.get(c.x, c.y)) throw std::invalid_argument("puncture outside the domain");
  for (std::size_t i = 0; i < punctures.size(); ++i)
    for (std::size_t j = i + 1; j < punctures.size(); ++j)
      if (std::max(std::abs(punctures[i].x - punctures[j].x), std::abs(punctures[i].y - punctures[j].y)) < 4)
        throw std::invalid_argument("resolution too coarse: punctures closer than 4 cells");
  const std::size_t first = root_at_infinity ? 0 : 1;
  for (std::size_t i = first; i < punctures.size(); ++i)
    for (int dy = -2; dy <= 2; ++dy)
      for (int dx = -2; dx <= 2; ++dx)
        if (!u.get(punctures[i].x + dx, punctures[i].y + dy))
          throw std::invalid_argument("resolution too coarse: puncture within 2 cells of the boundary");

  Spine s;
  s.boundary = outer_ring(u);
  s.skeleton = s.boundary;
  Raster circles(u.resolution());
  for (std::size_t i = first; i < punctures.size(); ++i) {
    std::vector<Cell> ring;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx)
        if (dx || dy) ring.push_back({punctures[i].x + dx, punctures[i].y + dy});
    for (Cell c : ring) {
      circles.set(c);
      s.skeleton.set(c);
    }
    s.circles.push_back(std::move(ring));
  }

  // radial arcs: shortest 4-paths from a circle to a cell touching the boundary
  Raster arcs(u.resolution());
  Raster puncture_cells(u.resolution());
  for (Cell c : punctures) puncture_cells.set(c);
  const int n = u.side();
  for (std::size_t i = first; i < punctures.size(); ++i) {
    const Cell p = punctures[i];
    auto allowed = [&](int x, int y) {
      if (!u.get(x, y) || s.skeleton.test(x, y) || puncture_cells.test(x, y) || near8(arcs, x, y)) return false;
      // keep clear of every other circle
      for (std::size_t j = first; j < punctures.size(); ++j)
        if (j != i && std::max(std::abs(punctures[j].x - x), std::abs(punctures[j].y - y)) <= 2) return false;
      return true;
    };
    std::vector<int> from(u.cell_count(), -2);
    std::vector<Cell> q;
    for (int dy = -2; dy <= 2; ++dy)
      for (int dx = -2; dx <= 2; ++dx) {
        int x = p.x + dx, y = p.y + dy;
        if (std::max(std::abs(dx), std::abs(dy)) != 2 || (std::abs(dx) == 2 && std::abs(dy) == 2)) continue;
        if (!allowed(x, y)) continue;
        from[u.index(x, y)] = -1;
        q.push_back({x, y});
      }
    int hit = -1;
    for (std::size_t h = 0; h < q.size() && hit < 0; ++h) {
      Cell c = q[h];
      // a domain holding infinity may also run out to the square's frame
      bool frame = u.includes_infinity() && (c.x == 0 || c.y == 0 || c.x == n - 1 || c.y == n - 1);
      if ((frame || near8(s.boundary, c.x, c.y)) && !closes_block(s.skeleton, c)) {
        hit = static_cast<int>(u.index(c.x, c.y));
        break;
      }
      for (int d = 0; d < 4; ++d) {
        int x = c.x + d4x[d], y = c.y + d4y[d];
        if (!u.in_bounds(x, y) || from[u.index(x, y)] != -2 || !allowed(x, y)) continue;
        from[u.index(x, y)] = static_cast<int>(u.index(c.x, c.y));
        q.push_back({x, y});
      }
    }
    if (hit < 0) throw std::invalid_argument("resolution too coarse: no radial arc reaches the boundary");
    std::vector<Cell> path;
    for (int v = hit; v >= 0; v = from[v]) path.push_back({v % n, v / n});
    std::reverse(path.begin(), path.end());  // circle first
    for (Cell c : path) {
      arcs.set(c);
      s.skeleton.set(c);
    }
    s.arcs.push_back(std::move(path));
  }
  assign_regions(s, u, punctures, root_at_infinity);
  return s;
}

std::vector<Component> regions_without(const Raster& u, const Spine& s, int circle, int arc) {
  Raster sk = s.skeleton;
  if (circle >= 0)
    for (Cell c : s.circles.at(circle)) sk.set(c, false);
  if (arc >= 0)
    for (Cell c : s.arcs.at(arc)) sk.set(c, false);
  return regions_of(u, sk);
}

SpineUnionReport spine_union_dimension_check(const Raster& bad, const std::vector<Spine>& spines, const std::vector<Raster>& domains) {
  // domains: every open cell set of the tiling (domains and the residual).
  // Their shared boundaries sit on cell edges, so only spine cells inside a
  // domain or outside all of them count.
  Raster open(bad.resolution());
  for (auto& d : domains) open = unite(open, d);
  open.set_includes_infinity(false);
  Raster all = bad;
  all.set_includes_infinity(false);
  for (auto& s : spines) {
    for (std::size_t i = 0; i < s.skeleton.cell_count(); ++i) {
      Cell c = s.skeleton.cell(i);
      if (!s.skeleton.test(c)) continue;
      if (s.boundary.test(c) && open.test(c)) continue;
      all.set(c);
    }
  }
  SpineUnionReport rep;
  rep.spines = static_cast<int>(spines.size());
  rep.block = find_2x2_block(all);
  rep.passed = !rep.block;
  if (rep.block) rep.witness = "2x2 block at " + std::to_string(rep.block->x) + "," + std::to_string(rep.block->y);
  return rep;
}

std::vector<Spine> tiling_spines(const PeanoTiling& tiling, const Scene& scene) {
  std::vector<Spine> out(tiling.domains.size());
  parallel_for(tiling.domains.size(), [&](std::size_t i) {
    const Domain& d = tiling.domains[i];
    std::vector<Cell> cells;
    bool at_inf = false;
    for (int p : d.punctures) {
      const Puncture& pu = scene.punctures.at(p);
      if (pu.infinity) at_inf = true;
      else cells.push_back(puncture_cell(pu, tiling.resolution));
    }
    out[i] = build_spine(d.cells, cells, at_inf);
  });
  return out;
}

SpineUnionReport spine_union_dimension_check(const PeanoTiling& tiling, const Scene& scene) {
  auto spines = tiling_spines(tiling, scene);
  std::vector<Raster> open;
  for (auto& d : tiling.domains) open.push_back(d.cells);
  if (tiling.residual.resolution() == tiling.resolution && tiling.residual.cell_count() > 1) open.push_back(tiling.residual);
  return spine_union_dimension_check(scene.bad_at(tiling.resolution), spines, open);
}

}  // namespace ph
