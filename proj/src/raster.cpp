#include "planar_homotopy/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace ph {

IndexRect DyadicSquare::at(int k) const {
  if (k < level) throw std::invalid_argument("DyadicSquare::at: resolution coarser than square");
  int s = 1 << (k - level);
  return {x * s, y * s, (x + 1) * s, (y + 1) * s};
}

Raster::Raster(int k, bool includes_infinity) : k_(k), inf_(includes_infinity) {
  if (k < 0 || k > kMaxResolution) throw std::invalid_argument("raster resolution out of range: " + std::to_string(k));
  side_ = 1 << k;
  bits_.assign(static_cast<std::size_t>(side_) * side_, 0);
}

double Raster::cell_width() const { return std::ldexp(1.0, -k_); }

std::size_t Raster::count() const { return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1)); }

void Raster::fill(bool v) { std::fill(bits_.begin(), bits_.end(), v ? 1 : 0); }

namespace {

void require_same(const Raster& a, const Raster& b) {
  if (a.resolution() != b.resolution()) throw std::invalid_argument("rasters at different resolutions");
}

template <class F>
Raster zip(const Raster& a, const Raster& b, F f) {
  require_same(a, b);
  Raster r(a.resolution(), f(a.includes_infinity(), b.includes_infinity()));
  for (int y = 0; y < a.side(); ++y)
    for (int x = 0; x < a.side(); ++x)
      if (f(a.test(x, y), b.test(x, y))) r.set(x, y);
  return r;
}

}  // namespace

Raster complement(const Raster& r) {
  Raster c(r.resolution(), !r.includes_infinity());
  for (int y = 0; y < r.side(); ++y)
    for (int x = 0; x < r.side(); ++x) c.set(x, y, !r.test(x, y));
  return c;
}

Raster unite(const Raster& a, const Raster& b) { return zip(a, b, [](bool p, bool q) { return p || q; }); }
Raster intersect(const Raster& a, const Raster& b) { return zip(a, b, [](bool p, bool q) { return p && q; }); }
Raster subtract(const Raster& a, const Raster& b) { return zip(a, b, [](bool p, bool q) { return p && !q; }); }

bool intersects(const Raster& a, const Raster& b) {
  require_same(a, b);
  if (a.includes_infinity() && b.includes_infinity()) return true;
  for (std::size_t i = 0; i < a.bits().size(); ++i)
    if (a.bits()[i] && b.bits()[i]) return true;
  return false;
}

bool is_subset(const Raster& a, const Raster& b) {
  require_same(a, b);
  if (a.includes_infinity() && !b.includes_infinity()) return false;
  for (std::size_t i = 0; i < a.bits().size(); ++i)
    if (a.bits()[i] && !b.bits()[i]) return false;
  return true;
}

Raster coarsen_any(const Raster& r) {
  if (r.resolution() == 0) throw std::invalid_argument("cannot coarsen below k=0");
  Raster c(r.resolution() - 1, r.includes_infinity());
  for (int y = 0; y < r.side(); ++y)
    for (int x = 0; x < r.side(); ++x)
      if (r.test(x, y)) c.set(x / 2, y / 2);
  return c;
}

Raster coarsen_all(const Raster& r) {
  if (r.resolution() == 0) throw std::invalid_argument("cannot coarsen below k=0");
  Raster c(r.resolution() - 1, r.includes_infinity());
  for (int y = 0; y < c.side(); ++y)
    for (int x = 0; x < c.side(); ++x)
      c.set(x, y, r.test(2 * x, 2 * y) && r.test(2 * x + 1, 2 * y) && r.test(2 * x, 2 * y + 1) && r.test(2 * x + 1, 2 * y + 1));
  return c;
}

Raster refine(const Raster& r) {
  Raster f(r.resolution() + 1, r.includes_infinity());
  for (int y = 0; y < f.side(); ++y)
    for (int x = 0; x < f.side(); ++x)
      if (r.test(x / 2, y / 2)) f.set(x, y);
  return f;
}

Raster refine_to(const Raster& r, int k) {
  if (k < r.resolution()) throw std::invalid_argument("refine_to: target coarser than source");
  int shift = k - r.resolution();
  Raster f(k, r.includes_infinity());
  for (int y = 0; y < f.side(); ++y)
    for (int x = 0; x < f.side(); ++x)
      if (r.test(x >> shift, y >> shift)) f.set(x, y);
  return f;
}

Raster dilate(const Raster& r, Adjacency adj) {
  Raster d = r;
  for (int y = 0; y < r.side(); ++y)
    for (int x = 0; x < r.side(); ++x) {
      if (!r.test(x, y)) continue;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (adj == Adjacency::Four && dx != 0 && dy != 0) continue;
          if (r.in_bounds(x + dx, y + dy)) d.set(x + dx, y + dy);
        }
    }
  return d;
}

Raster inner_boundary(const Raster& r, Adjacency adj) {
  Raster b(r.resolution());
  for (int y = 0; y < r.side(); ++y)
    for (int x = 0; x < r.side(); ++x) {
      if (!r.test(x, y)) continue;
      bool edge = false;
      for (int dy = -1; dy <= 1 && !edge; ++dy)
        for (int dx = -1; dx <= 1 && !edge; ++dx) {
          if ((dx == 0 && dy == 0) || (adj == Adjacency::Four && dx != 0 && dy != 0)) continue;
          int nx = x + dx, ny = y + dy;
          if (r.in_bounds(nx, ny)) edge = !r.test(nx, ny);
          else edge = !r.includes_infinity();
        }
      if (edge) b.set(x, y);
    }
  return b;
}

std::optional<Cell> find_2x2_block(const Raster& r) {
  for (int y = 0; y + 1 < r.side(); ++y)
    for (int x = 0; x + 1 < r.side(); ++x)
      if (r.test(x, y) && r.test(x + 1, y) && r.test(x, y + 1) && r.test(x + 1, y + 1)) return Cell{x, y};
  return std::nullopt;
}

std::vector<Cell> occupied_cells(const Raster& r) {
  std::vector<Cell> out;
  for (int y = 0; y < r.side(); ++y)
    for (int x = 0; x < r.side(); ++x)
      if (r.test(x, y)) out.push_back({x, y});
  return out;
}

// --- components ---------------------------------------------------------------

namespace {

void finish_component(Component& c, int k) {
  std::sort(c.cells.begin(), c.cells.end(), [](Cell a, Cell b) { return std::tie(a.y, a.x) < std::tie(b.y, b.x); });
  if (c.cells.empty()) {
    c.bbox = {};
    c.diameter = 0.0;
    return;
  }
  IndexRect bb{c.cells[0].x, c.cells[0].y, c.cells[0].x + 1, c.cells[0].y + 1};
  for (Cell p : c.cells) {
    bb.x0 = std::min(bb.x0, p.x);
    bb.y0 = std::min(bb.y0, p.y);
    bb.x1 = std::max(bb.x1, p.x + 1);
    bb.y1 = std::max(bb.y1, p.y + 1);
  }
  c.bbox = bb;
  c.diameter = std::sqrt(static_cast<double>(diameter2_cells(c.cells))) * std::ldexp(1.0, -k);
}

}  // namespace

ComponentFamily label_components(const Raster& raster, Adjacency adjacency) {
  const int n = raster.side();
  const std::size_t cells = raster.cell_count();
  const std::size_t inf = cells;
  ComponentFamily fam;
  fam.resolution = raster.resolution();
  fam.adjacency = adjacency;
  fam.label_of.assign(cells + 1, -1);

  std::vector<std::size_t> border;
  if (raster.includes_infinity()) {
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x)
        if ((x == 0 || y == 0 || x == n - 1 || y == n - 1) && raster.test(x, y)) border.push_back(raster.index(x, y));
  }

  std::vector<std::size_t> queue;
  auto occupied = [&](std::size_t i) { return i == inf ? raster.includes_infinity() : raster.bits()[i] != 0; };

  for (std::size_t start = 0; start <= cells; ++start) {
    if (!occupied(start) || fam.label_of[start] != -1) continue;
    Component comp;
    comp.label = static_cast<int>(fam.members.size());
    queue.clear();
    queue.push_back(start);
    fam.label_of[start] = comp.label;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      std::size_t i = queue[head];
      auto visit = [&](std::size_t j) {
        if (occupied(j) && fam.label_of[j] == -1) {
          fam.label_of[j] = comp.label;
          queue.push_back(j);
        }
      };
      if (i == inf) {
        comp.has_infinity = true;
        for (std::size_t j : border) visit(j);
        continue;
      }
      Cell c = raster.cell(i);
      comp.cells.push_back(c);
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if ((dx == 0 && dy == 0) || (adjacency == Adjacency::Four && dx != 0 && dy != 0)) continue;
          int nx = c.x + dx, ny = c.y + dy;
          if (raster.in_bounds(nx, ny)) visit(raster.index(nx, ny));
        }
      if (raster.includes_infinity() && (c.x == 0 || c.y == 0 || c.x == n - 1 || c.y == n - 1)) visit(inf);
    }
    finish_component(comp, raster.resolution());
    fam.members.push_back(std::move(comp));
  }
  return fam;
}

std::vector<Component> label_window(const Raster& raster, Adjacency adjacency, const IndexRect& w) {
  std::vector<Component> out;
  if (w.empty()) return out;
  const int ww = w.width(), wh = w.height();
  std::vector<int> label(static_cast<std::size_t>(ww) * wh, -1);
  std::vector<Cell> queue;
  for (int y = w.y0; y < w.y1; ++y)
    for (int x = w.x0; x < w.x1; ++x) {
      if (!raster.test(x, y) || label[static_cast<std::size_t>(y - w.y0) * ww + (x - w.x0)] != -1) continue;
      Component comp;
      comp.label = static_cast<int>(out.size());
      queue.clear();
      queue.push_back({x, y});
      label[static_cast<std::size_t>(y - w.y0) * ww + (x - w.x0)] = comp.label;
      for (std::size_t head = 0; head < queue.size(); ++head) {
        Cell c = queue[head];
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            if ((dx == 0 && dy == 0) || (adjacency == Adjacency::Four && dx != 0 && dy != 0)) continue;
            Cell d{c.x + dx, c.y + dy};
            if (!w.contains(d) || !raster.test(d)) continue;
            int& l = label[static_cast<std::size_t>(d.y - w.y0) * ww + (d.x - w.x0)];
            if (l != -1) continue;
            l = comp.label;
            queue.push_back(d);
          }
      }
      comp.cells = queue;
      finish_component(comp, raster.resolution());
      out.push_back(std::move(comp));
    }
  return out;
}

// --- metric --------------------------------------------------------------------

std::int64_t diameter2_cells_bruteforce(std::span<const Cell> cells) {
  std::int64_t best = 0;
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (std::size_t j = i + 1; j < cells.size(); ++j) {
      std::int64_t dx = cells[i].x - cells[j].x, dy = cells[i].y - cells[j].y;
      best = std::max(best, dx * dx + dy * dy);
    }
  return best;
}

std::int64_t diameter2_cells_hull(std::span<const Cell> cells) {
  if (cells.empty()) return 0;
  // Only the leftmost and rightmost cell of each row can be hull vertices.
  int ymin = cells[0].y, ymax = cells[0].y;
  for (Cell c : cells) {
    ymin = std::min(ymin, c.y);
    ymax = std::max(ymax, c.y);
  }
  std::vector<int> lo(ymax - ymin + 1, std::numeric_limits<int>::max()), hi(ymax - ymin + 1, std::numeric_limits<int>::min());
  for (Cell c : cells) {
    lo[c.y - ymin] = std::min(lo[c.y - ymin], c.x);
    hi[c.y - ymin] = std::max(hi[c.y - ymin], c.x);
  }
  std::vector<Cell> pts;
  for (int r = 0; r <= ymax - ymin; ++r) {
    if (lo[r] > hi[r]) continue;
    pts.push_back({lo[r], ymin + r});
    if (hi[r] != lo[r]) pts.push_back({hi[r], ymin + r});
  }
  std::sort(pts.begin(), pts.end(), [](Cell a, Cell b) { return std::tie(a.x, a.y) < std::tie(b.x, b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() <= 2) return diameter2_cells_bruteforce(pts);

  auto cross = [](Cell o, Cell a, Cell b) {
    return static_cast<std::int64_t>(a.x - o.x) * (b.y - o.y) - static_cast<std::int64_t>(a.y - o.y) * (b.x - o.x);
  };
  std::vector<Cell> hull(2 * pts.size());
  std::size_t h = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (h >= 2 && cross(hull[h - 2], hull[h - 1], pts[i]) <= 0) --h;
    hull[h++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = h + 1; i-- > 0;) {
    while (h >= t && cross(hull[h - 2], hull[h - 1], pts[i]) <= 0) --h;
    hull[h++] = pts[i];
  }
  hull.resize(h - 1);
  if (hull.size() <= 2) return diameter2_cells_bruteforce(hull);

  // rotating calipers
  auto d2 = [](Cell a, Cell b) {
    std::int64_t dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
  };
  const std::size_t m = hull.size();
  std::int64_t best = 0;
  std::size_t j = 1;
  for (std::size_t i = 0; i < m; ++i) {
    Cell a = hull[i], b = hull[(i + 1) % m];
    while (cross(a, b, hull[(j + 1) % m]) > cross(a, b, hull[j])) j = (j + 1) % m;
    best = std::max({best, d2(a, hull[j]), d2(b, hull[j])});
  }
  return best;
}

std::int64_t diameter2_cells(std::span<const Cell> cells) {
  // brute force stays exact and is cheap for small sets; the hull route is
  // exact too (integer calipers) and the tests compare the two
  if (cells.size() <= 256) return diameter2_cells_bruteforce(cells);
  return diameter2_cells_hull(cells);
}

double diameter(std::span<const Cell> cells, int k) {
  if (cells.empty()) throw std::invalid_argument("empty set has no diameter");
  return std::sqrt(static_cast<double>(diameter2_cells(cells))) * std::ldexp(1.0, -k);
}

double diameter(const Component& c, int k) {
  if (c.cells.empty() && !c.has_infinity) throw std::invalid_argument("empty set has no diameter");
  if (c.cells.empty()) return 0.0;
  return diameter(c.cells, k);
}

std::vector<DyadicSquare> probe_disks(int k_min, int k_max) {
  if (k_min > k_max) throw std::invalid_argument("probe_disks: k_min > k_max");
  std::vector<DyadicSquare> out;
  for (int l = k_min; l <= k_max; ++l)
    for (int y = 0; y < (1 << l); ++y)
      for (int x = 0; x < (1 << l); ++x) out.push_back({l, x, y});
  return out;
}

namespace {

// Felzenszwalb-Huttenlocher 1-D squared distance transform, in place.
void edt_1d(std::vector<double>& f, std::vector<double>& d, std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  const double inf = std::numeric_limits<double>::infinity();
  int k = 0;
  v[0] = 0;
  z[0] = -inf;
  z[1] = inf;
  int first = -1;
  for (int q = 0; q < n; ++q)
    if (f[q] < inf) {
      first = q;
      break;
    }
  if (first < 0) {
    std::fill(d.begin(), d.end(), inf);
    f = d;
    return;
  }
  v[0] = first;
  for (int q = first + 1; q < n; ++q) {
    if (f[q] == inf) continue;
    double s;
    for (;;) {
      int p = v[k];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * q - 2.0 * p);
      if (s <= z[k] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = inf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
  f = d;
}

// squared distance (cell units) from every cell to the nearest occupied cell of b
std::vector<double> squared_edt(const Raster& b) {
  const int n = b.side();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> grid(static_cast<std::size_t>(n) * n);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = b.bits()[i] ? 0.0 : inf;
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) f[y] = grid[static_cast<std::size_t>(y) * n + x];
    edt_1d(f, d, v, z);
    for (int y = 0; y < n; ++y) grid[static_cast<std::size_t>(y) * n + x] = f[y];
  }
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) f[x] = grid[static_cast<std::size_t>(y) * n + x];
    edt_1d(f, d, v, z);
    for (int x = 0; x < n; ++x) grid[static_cast<std::size_t>(y) * n + x] = f[x];
  }
  return grid;
}

double directed(const Raster& a, const std::vector<double>& to_b) {
  double worst = 0;
  for (std::size_t i = 0; i < a.bits().size(); ++i)
    if (a.bits()[i]) worst = std::max(worst, to_b[i]);
  return worst;
}

}  // namespace

double hausdorff_distance(const Raster& a, const Raster& b) {
  require_same(a, b);
  if (a.count() == 0 || b.count() == 0) throw std::invalid_argument("Hausdorff undefined on empty set");
  double d2 = std::max(directed(a, squared_edt(b)), directed(b, squared_edt(a)));
  return std::sqrt(d2) * a.cell_width();
}

// --- I/O -----------------------------------------------------------------------

void write_raster(std::ostream& os, const Raster& r) {
  os << "PH-RASTER k=" << r.resolution() << " inf=" << (r.includes_infinity() ? 1 : 0) << '\n';
  std::string row(r.side(), '0');
  for (int y = 0; y < r.side(); ++y) {
    for (int x = 0; x < r.side(); ++x) row[x] = r.test(x, y) ? '1' : '0';
    os << row << '\n';
  }
}

Raster read_raster(std::istream& is) {
  std::string header;
  while (std::getline(is, header) && header.empty()) {
  }
  int k = -1, inf = -1;
  char extra = 0;
  if (std::sscanf(header.c_str(), "PH-RASTER k=%d inf=%d%c", &k, &inf, &extra) != 2 || (inf != 0 && inf != 1))
    throw std::runtime_error("malformed raster header: '" + header + "'");
  if (k < 0 || k > kMaxResolution) throw std::runtime_error("raster resolution out of range");
  Raster r(k, inf == 1);
  std::string row;
  for (int y = 0; y < r.side(); ++y) {
    if (!std::getline(is, row)) throw std::runtime_error("raster truncated at row " + std::to_string(y));
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (static_cast<int>(row.size()) != r.side()) throw std::runtime_error("raster row " + std::to_string(y) + " has wrong length");
    for (int x = 0; x < r.side(); ++x) {
      if (row[x] == '1') r.set(x, y);
      else if (row[x] != '0') throw std::runtime_error("raster row " + std::to_string(y) + " has a character other than 0/1");
    }
  }
  return r;
}

std::string to_string(const Raster& r) {
  std::ostringstream os;
  write_raster(os, r);
  return os.str();
}

Raster raster_from_string(const std::string& s) {
  std::istringstream is(s);
  return read_raster(is);
}

Raster raster_from_rows(const std::vector<std::string>& rows, bool includes_infinity) {
  int k = 0;
  while ((1u << k) < rows.size()) ++k;
  if ((1u << k) != rows.size()) throw std::invalid_argument("raster_from_rows: row count must be a power of two");
  Raster r(k, includes_infinity);
  for (int y = 0; y < r.side(); ++y) {
    if (static_cast<int>(rows[y].size()) != r.side()) throw std::invalid_argument("raster_from_rows: ragged rows");
    for (int x = 0; x < r.side(); ++x) r.set(x, y, rows[y][x] == '1' || rows[y][x] == '#');
  }
  return r;
}

}  // namespace ph
