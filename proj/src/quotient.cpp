#include "planar_homotopy/quotient.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ph {

// --- run graph ---------------------------------------------------------------------

int RunGraph::edge_index(int a, int b) const {
  if (a > b) std::swap(a, b);
  auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(a, b));
  return (it != edges.end() && *it == std::make_pair(a, b)) ? static_cast<int>(it - edges.begin()) : -1;
}

RunGraph build_run_graph(const Raster& m) {
  RunGraph g;
  g.resolution = m.resolution();
  const int n = m.side();
  g.node_of.assign(static_cast<std::size_t>(n) * n, -1);
  std::vector<int> first(n + 1, 0);  // runs of column x are [first[x], first[x+1])
  for (int x = 0; x < n; ++x) {
    first[x] = static_cast<int>(g.runs.size());
    for (int y = 0; y < n;) {
      if (!m.test(x, y)) {
        ++y;
        continue;
      }
      int e = y;
      while (e + 1 < n && m.test(x, e + 1)) ++e;
      const int id = static_cast<int>(g.runs.size());
      g.runs.push_back({x, y, e});
      for (int t = y; t <= e; ++t) g.node_of[static_cast<std::size_t>(t) * n + x] = id;
      y = e + 1;
    }
  }
  first[n] = static_cast<int>(g.runs.size());
  // two-pointer sweep over neighbouring columns
  for (int x = 0; x + 1 < n; ++x) {
    int i = first[x], j = first[x + 1];
    while (i < first[x + 1] && j < first[x + 2 > n ? n : x + 2]) {
      const Run &a = g.runs[i], &b = g.runs[j];
      if (std::max(a.y0, b.y0) <= std::min(a.y1, b.y1)) g.edges.push_back({i, j});
      if (a.y1 < b.y1) ++i;
      else ++j;
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.adjacency.assign(g.runs.size(), {});
  for (auto [a, b] : g.edges) {
    g.adjacency[a].push_back(b);
    g.adjacency[b].push_back(a);
  }
  for (auto& l : g.adjacency) std::sort(l.begin(), l.end());
  return g;
}

// --- adjusting M ---------------------------------------------------------------------

int max_vertical_boundary_run(const Raster& m) {
  auto boundary = [&](int x, int y) {
    return m.test(x, y) && (!m.get(x - 1, y) || !m.get(x + 1, y) || !m.get(x, y - 1) || !m.get(x, y + 1));
  };
  int best = 0;
  for (int x = 0; x < m.side(); ++x) {
    int run = 0;
    for (int y = 0; y < m.side(); ++y) {
      run = boundary(x, y) ? run + 1 : 0;
      best = std::max(best, run);
    }
  }
  return best;
}

namespace {

// odd bands of h rows move one cell right; even bands drop their last column
// so that the square's right side is staggered as well
Raster shear(const Raster& r, int h) {
  const int n = r.side();
  Raster out(r.resolution());
  for (int y = 0; y < n; ++y) {
    const bool odd = (y / h) % 2 == 1;
    for (int x = 0; x < n; ++x) {
      if (!r.test(x, y)) continue;
      if (odd) {
        if (x + 1 < n) out.set(x + 1, y);
      } else if (x + 1 < n) {
        out.set(x, y);
      }
    }
  }
  return out;
}

}  // namespace

Raster deverticalize(const Raster& m, double eps) {
  if (m.count() == 0) throw std::invalid_argument("deverticalize needs a nonempty raster");
  if (eps < 2 * m.cell_width() - 1e-15) throw std::invalid_argument("epsilon below resolution");
  if (max_vertical_boundary_run(m) * m.cell_width() < eps) return m;
  const int k2 = m.resolution() + 2;
  if (k2 > kMaxResolution) throw std::invalid_argument("deverticalize would exceed the maximal resolution");
  Raster fine = refine_to(m, k2);
  const double w = fine.cell_width();
  for (int h = std::max(1, static_cast<int>(std::ceil(eps / w - 1e-9)) - 1); h >= 1; --h) {
    Raster out = shear(fine, h);
    if (out.count() == 0) continue;
    if (max_vertical_boundary_run(out) * w < eps && hausdorff_distance(fine, out) <= eps) return out;
  }
  throw std::runtime_error("deverticalize: no shear met the bound");
}

UscReport usc_probe(const std::vector<Raster>& m) {
  if (m.size() < 2) throw std::invalid_argument("usc_probe needs at least two resolutions");
  for (std::size_t i = 0; i + 1 < m.size(); ++i) {
    if (m[i + 1].resolution() != m[i].resolution() + 1) throw std::invalid_argument("malformed ladder: resolutions must be consecutive");
    if (!(coarsen_any(m[i + 1]) == m[i]))
      throw std::invalid_argument("malformed ladder: k=" + std::to_string(m[i].resolution()) + " is not the coarsening of k=" +
                                  std::to_string(m[i + 1].resolution()));
  }
  UscReport rep;
  for (std::size_t i = 0; i + 1 < m.size() && rep.passed; ++i) {
    auto coarse = build_run_graph(m[i]);
    auto fine = build_run_graph(m[i + 1]);
    // runs of the fine rung whose images touch a common coarse cell must land
    // in one coarse run; equivalently every fine run's image is inside a run
    for (std::size_t r = 0; r < fine.runs.size() && rep.passed; ++r) {
      const Run& f = fine.runs[r];
      int node = coarse.node_at({f.x / 2, f.y0 / 2});
      for (int y = f.y0 / 2; y <= f.y1 / 2; ++y) {
        ++rep.pairs_checked;
        if (coarse.node_at({f.x / 2, y}) != node) {
          rep.passed = false;
          rep.witness = "run x=" + std::to_string(f.x) + " rows " + std::to_string(f.y0) + ".." + std::to_string(f.y1) + " at k=" +
                        std::to_string(m[i + 1].resolution()) + " splits across coarse runs";
          break;
        }
      }
    }
  }
  return rep;
}

// --- words -------------------------------------------------------------------------------

std::vector<int> reduce_word(const std::vector<int>& letters) {
  std::vector<int> st;
  for (int l : letters) {
    if (l == 0) throw std::invalid_argument("letter 0 is not a generator");
    if (!st.empty() && st.back() == -l) st.pop_back();
    else st.push_back(l);
  }
  return st;
}

std::vector<int> inverse_word(const std::vector<int>& letters) {
  std::vector<int> out(letters.rbegin(), letters.rend());
  for (int& l : out) l = -l;
  return out;
}

std::string word_string(const std::vector<int>& letters) {
  if (letters.empty()) return "1";
  std::string s;
  for (int l : letters) {
    if (!s.empty()) s += ' ';
    int g = std::abs(l) - 1;
    s += g < 26 ? std::string(1, char('a' + g)) : "g" + std::to_string(g);
    if (l < 0) s += "^-1";
  }
  return s;
}

namespace {

bool four_step(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y) == 1; }

}  // namespace

void check_loop(const Raster& m, const Loop& loop) {
  if (loop.empty()) throw std::invalid_argument("empty loop");
  for (std::size_t i = 0; i < loop.size(); ++i) {
    Cell c = loop[i];
    if (!m.get(c.x, c.y)) throw std::invalid_argument("loop exits M at cell " + std::to_string(c.x) + "," + std::to_string(c.y));
    Cell d = loop[(i + 1) % loop.size()];
    if (!(c == d) && !four_step(c, d))
      throw std::invalid_argument("loop is not 4-connected between " + std::to_string(c.x) + "," + std::to_string(c.y) + " and " +
                                  std::to_string(d.x) + "," + std::to_string(d.y));
  }
}

Loop parse_loop(const std::string& line) {
  Loop loop;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ';')) {
    if (tok.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto comma = tok.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("malformed loop cell '" + tok + "'");
    std::size_t used = 0;
    Cell c;
    c.x = std::stoi(tok.substr(0, comma), &used);
    c.y = std::stoi(tok.substr(comma + 1), &used);
    loop.push_back(c);
  }
  if (loop.empty()) throw std::invalid_argument("empty loop line");
  return loop;
}

std::string format_loop(const Loop& loop) {
  std::string s;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    if (i) s += ';';
    s += std::to_string(loop[i].x) + "," + std::to_string(loop[i].y);
  }
  return s;
}

// --- cuts --------------------------------------------------------------------------------

std::size_t primal_edge(const Raster& m, Cell a, Cell b) {
  if (b < a) std::swap(a, b);
  if (b.y == a.y && b.x == a.x + 1) return 2 * m.index(a.x, a.y);
  if (b.x == a.x && b.y == a.y + 1) return 2 * m.index(a.x, a.y) + 1;
  throw std::invalid_argument("cells are not 4-adjacent");
}

namespace {

// Edmonds-Karp on a unit-capacity graph
struct Flow {
  struct Edge {
    int to, cap;
    std::size_t primal;  // crossed primal edge, or npos
    int from_corner, to_corner;
  };
  std::vector<Edge> e;
  std::vector<std::vector<int>> adj;
  explicit Flow(int n) : adj(n) {}
  void add(int u, int v, std::size_t primal = std::string::npos, int fc = -1, int tc = -1) {
    adj[u].push_back(static_cast<int>(e.size()));
    e.push_back({v, 1, primal, fc, tc});
    adj[v].push_back(static_cast<int>(e.size()));
    e.push_back({u, 0, primal, tc, fc});
  }
  bool augment(int s, int t) {
    std::vector<int> via(adj.size(), -1);
    std::vector<int> q{s};
    via[s] = -2;
    for (std::size_t h = 0; h < q.size() && via[t] == -1; ++h)
      for (int id : adj[q[h]])
        if (e[id].cap > 0 && via[e[id].to] == -1) {
          via[e[id].to] = id;
          q.push_back(e[id].to);
        }
    if (via[t] == -1) return false;
    for (int v = t; v != s; v = e[via[v] ^ 1].to) {
      e[via[v]].cap -= 1;
      e[via[v] ^ 1].cap += 1;
    }
    return true;
  }
};

CutSystem make_cuts(const Raster& m, std::mt19937_64* rng) {
  const int n = m.side();
  Raster outside = complement(m);
  outside.set_includes_infinity(true);
  auto fam = label_components(outside, Adjacency::Eight);
  std::vector<int> hole_id(fam.members.size(), -1);  // component label -> hole
  CutSystem cs;
  cs.resolution = m.resolution();
  cs.hole_of.assign(m.cell_count(), -1);
  int holes = 0;
  for (std::size_t i = 0; i < fam.members.size(); ++i) {
    if (fam.members[i].has_infinity) continue;
    hole_id[i] = holes++;
    for (Cell c : fam.members[i].cells) cs.hole_of[m.index(c.x, c.y)] = hole_id[i];
  }
  cs.paths.assign(holes, {});
  cs.edge_letter.assign(2 * m.cell_count(), 0);
  if (holes == 0) return cs;

  // corner (X, Y), 0 <= X, Y <= n, sits at the top-left of cell (X, Y).
  // face: -1 square (four M cells), else hole id, or `holes` for the outside
  const int nc = (n + 1) * (n + 1);
  auto corner = [&](int X, int Y) { return Y * (n + 1) + X; };
  std::vector<int> face(nc);
  for (int Y = 0; Y <= n; ++Y)
    for (int X = 0; X <= n; ++X) {
      int f = -1;
      for (int dy = -1; dy <= 0 && f != holes; ++dy)
        for (int dx = -1; dx <= 0; ++dx) {
          int x = X + dx, y = Y + dy;
          if (!m.in_bounds(x, y)) {
            f = holes;
            break;
          }
          if (m.test(x, y)) continue;
          int h = hole_id[fam.label_at({x, y})];
          f = h < 0 ? holes : h;
          if (f == holes) break;
        }
      face[corner(X, Y)] = f;
    }
  // nodes: 2c / 2c+1 in/out of square corner c, then holes, outside, source
  const int hole0 = 2 * nc, sink = hole0 + holes, source = sink + 1;
  Flow fl(source + 1);
  for (int c = 0; c < nc; ++c)
    if (face[c] == -1) fl.add(2 * c, 2 * c + 1);
  for (int h = 0; h < holes; ++h) fl.add(source, hole0 + h);
  auto link = [&](int p, int q, std::size_t primal) {  // dual step from corner p to corner q
    const int fp = face[p], fq = face[q];
    if (fq >= 0 && fq < holes) return;  // never enter a hole
    if (fp >= 0 && fp == holes) return;  // never leave the outside
    int from = fp == -1 ? 2 * p + 1 : hole0 + fp;
    int to = fq == -1 ? 2 * q : sink;
    fl.add(from, to, primal, p, q);
  };
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      if (!m.test(x, y)) continue;
      if (x + 1 < n && m.test(x + 1, y)) {  // crossed by the segment on line X = x+1
        int p = corner(x + 1, y), q = corner(x + 1, y + 1);
        link(p, q, 2 * m.index(x, y));
        link(q, p, 2 * m.index(x, y));
      }
      if (y + 1 < n && m.test(x, y + 1)) {
        int p = corner(x, y + 1), q = corner(x + 1, y + 1);
        link(p, q, 2 * m.index(x, y) + 1);
        link(q, p, 2 * m.index(x, y) + 1);
      }
    }
  if (rng)
    for (auto& l : fl.adj) std::shuffle(l.begin(), l.end(), *rng);
  int flow = 0;
  while (flow < holes && fl.augment(source, sink)) ++flow;
  if (flow < holes) throw std::runtime_error("no disjoint cut system: a hole is walled in by M too thin to route a cut");

  for (int h = 0; h < holes; ++h) {
    int v = hole0 + h;
    while (v != sink) {
      int next = -1;
      for (int id : fl.adj[v]) {
        const auto& ed = fl.e[id];
        if (id % 2 == 0 && ed.cap == 0) {  // saturated forward edge
          next = id;
          break;
        }
      }
      if (next < 0) throw std::logic_error("cut flow decomposition failed");
      const auto& ed = fl.e[next];
      if (ed.primal != std::string::npos) {
        // orientation: dual direction d, positive step is the primal +x/+y move
        const int dX = ed.to_corner % (n + 1) - ed.from_corner % (n + 1);
        const int dY = ed.to_corner / (n + 1) - ed.from_corner / (n + 1);
        const int sx = ed.primal % 2 == 0 ? 1 : 0, sy = 1 - sx;
        const bool left = sx == dY && sy == -dX;  // right-to-left crossing on screen
        cs.edge_letter[ed.primal] = left ? h + 1 : -(h + 1);
        cs.paths[h].push_back(ed.primal);
      }
      v = ed.to;
    }
  }
  return cs;
}

}  // namespace

CutSystem canonical_cuts(const Raster& m) { return make_cuts(m, nullptr); }
CutSystem random_cuts(const Raster& m, std::mt19937_64& rng) { return make_cuts(m, &rng); }

LoopWord loop_word_in_M(const Raster& m, const Loop& loop, const CutSystem& cuts) {
  check_loop(m, loop);
  if (cuts.resolution != m.resolution()) throw std::invalid_argument("cut system built for another resolution");
  std::vector<int> letters;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    Cell a = loop[i], b = loop[(i + 1) % loop.size()];
    if (a == b) continue;
    int l = cuts.edge_letter[primal_edge(m, a, b)];
    if (l == 0) continue;
    letters.push_back(a < b ? l : -l);
  }
  return LoopWord{reduce_word(letters), loop.front()};
}

LoopWord loop_word_in_M(const Raster& m, const Loop& loop) { return loop_word_in_M(m, loop, canonical_cuts(m)); }

// --- projection ----------------------------------------------------------------------------

std::vector<int> project_loop(const RunGraph& g, const Loop& loop) {
  std::vector<int> nodes;
  for (Cell c : loop) {
    int v = g.node_at(c);
    if (v < 0) throw std::invalid_argument("loop exits M");
    if (nodes.empty() || nodes.back() != v) nodes.push_back(v);
  }
  while (nodes.size() > 1 && nodes.back() == nodes.front()) nodes.pop_back();
  return nodes;
}

namespace {

// canonical BFS forest: for each node its tree parent edge index, -1 at roots
std::vector<char> tree_edges(const RunGraph& g) {
  std::vector<char> in_tree(g.edges.size(), 0);
  std::vector<char> seen(g.runs.size(), 0);
  std::vector<int> queue;
  for (int root = 0; root < static_cast<int>(g.runs.size()); ++root) {
    if (seen[root]) continue;
    seen[root] = 1;
    queue.assign(1, root);
    for (std::size_t h = 0; h < queue.size(); ++h) {
      int u = queue[h];
      for (int v : g.adjacency[u]) {
        if (seen[v]) continue;
        seen[v] = 1;
        in_tree[g.edge_index(u, v)] = 1;
        queue.push_back(v);
      }
    }
  }
  return in_tree;
}

}  // namespace

LoopWord project_loop_and_word(const RunGraph& g, const Loop& loop) {
  auto nodes = project_loop(g, loop);
  auto in_tree = tree_edges(g);
  // generators are the non-tree edges in edge order
  std::vector<int> gen(g.edges.size(), -1);
  int next = 0;
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    if (!in_tree[e]) gen[e] = next++;
  std::vector<int> letters;
  if (nodes.size() > 1)
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      int u = nodes[i], v = nodes[(i + 1) % nodes.size()];
      int e = g.edge_index(u, v);
      if (e < 0) throw std::invalid_argument("loop jumps between non-adjacent runs");
      if (gen[e] < 0) continue;
      letters.push_back(u < v ? gen[e] + 1 : -(gen[e] + 1));
    }
  return LoopWord{reduce_word(letters), loop.front()};
}

InjectivityRecord injectivity_probe(const Raster& m, const RunGraph& g, const CutSystem& cuts, const Loop& loop) {
  InjectivityRecord r;
  r.word_m = loop_word_in_M(m, loop, cuts);
  r.word_quotient = project_loop_and_word(g, loop);
  // a nontrivial class dying in M' would refute injectivity; a trivial class
  // becoming nontrivial would mean the projection is not well defined
  r.consistent = r.word_m.empty() == r.word_quotient.empty();
  return r;
}

InjectivityRecord injectivity_probe(const Raster& m, const Loop& loop) {
  return injectivity_probe(m, build_run_graph(m), canonical_cuts(m), loop);
}

Loop random_loop(const Raster& m, std::mt19937_64& rng, int steps) {
  auto cells = occupied_cells(m);
  if (cells.empty()) throw std::invalid_argument("random_loop on empty raster");
  return random_loop(m, rng, steps, cells[rng() % cells.size()]);
}

Loop random_loop(const Raster& m, std::mt19937_64& rng, int steps, Cell start) {
  if (!m.get(start.x, start.y)) throw std::invalid_argument("random_loop start outside M");
  Loop loop{start};
  static const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
  Cell cur = start;
  for (int s = 0; s < steps; ++s) {
    Cell opts[4];
    int n = 0;
    for (int d = 0; d < 4; ++d)
      if (m.get(cur.x + dx[d], cur.y + dy[d])) opts[n++] = {cur.x + dx[d], cur.y + dy[d]};
    if (n == 0) break;
    cur = opts[rng() % n];
    loop.push_back(cur);
  }
  // close with a BFS shortest path back to start
  const int side = m.side();
  std::vector<int> parent(m.cell_count(), -2);
  std::vector<Cell> q{start};
  parent[m.index(start.x, start.y)] = -1;
  for (std::size_t h = 0; h < q.size(); ++h) {
    Cell c = q[h];
    if (c == cur) break;
    for (int d = 0; d < 4; ++d) {
      Cell e{c.x + dx[d], c.y + dy[d]};
      if (!m.get(e.x, e.y) || parent[m.index(e.x, e.y)] != -2) continue;
      parent[m.index(e.x, e.y)] = static_cast<int>(m.index(c.x, c.y));
      q.push_back(e);
    }
  }
  // walk cur -> start via parents, excluding both ends
  for (int i = parent[m.index(cur.x, cur.y)]; i >= 0 && !(Cell{i % side, i / side} == start); i = parent[i])
    loop.push_back({i % side, i / side});
  return loop;
}

Loop concatenate(const Loop& a, const Loop& b) {
  if (a.empty() || b.empty() || !(a.front() == b.front())) throw std::invalid_argument("loops need a common base cell");
  Loop out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// --- triangulation ---------------------------------------------------------------------------

namespace {

using i128 = __int128;

struct Homog {
  i128 x, y, w;  // (x/w, y/w)
};

Homog homog(const CirclePoint& c) {
  i128 p = c.p, q = c.q;
  return {q * q - p * p, 2 * p * q, q * q + p * p};
}

// sign of the orientation of (a, b, c) in math coordinates
int orient(const Homog& a, const Homog& b, const Homog& c) {
  // det [[ax ay aw],[bx by bw],[cx cy cw]] times sign(aw*bw*cw); all w > 0
  i128 d = a.x * (b.y * c.w - b.w * c.y) - a.y * (b.x * c.w - b.w * c.x) + a.w * (b.x * c.y - b.y * c.x);
  return d > 0 ? 1 : (d < 0 ? -1 : 0);
}

// circle order: by p/q, q == 0 last
bool circle_less(const CirclePoint& a, const CirclePoint& b) {
  if (a.q == 0 || b.q == 0) return a.q != 0 && b.q == 0;
  return i128(a.p) * b.q < i128(b.p) * a.q;
}

bool same_point(const CirclePoint& a, const CirclePoint& b) { return !circle_less(a, b) && !circle_less(b, a); }

constexpr std::int64_t kMaxParam = std::int64_t{1} << 14;

}  // namespace

CirclePoint parse_circle_point(const std::string& s) {
  CirclePoint c;
  auto slash = s.find('/');
  std::size_t used = 0;
  if (slash == std::string::npos) {
    c.p = std::stoll(s, &used);
    c.q = 1;
    if (used != s.size()) throw std::invalid_argument("malformed point '" + s + "'");
  } else {
    c.p = std::stoll(s.substr(0, slash), &used);
    if (used != slash) throw std::invalid_argument("malformed point '" + s + "'");
    c.q = std::stoll(s.substr(slash + 1), &used);
    if (used != s.size() - slash - 1) throw std::invalid_argument("malformed point '" + s + "'");
  }
  if (c.q < 0) c.p = -c.p, c.q = -c.q;
  if (c.q == 0 && c.p == 0) throw std::invalid_argument("0/0 is not a point");
  if (c.q == 0) c.p = 1;
  return c;
}

IdealTriangulation ideal_triangulation(const std::vector<CirclePoint>& h) {
  if (h.size() < 3) throw std::invalid_argument("hull is not a disk");
  for (auto& c : h)
    if (std::llabs(c.p) > kMaxParam || c.q > kMaxParam || c.q < 0) throw std::invalid_argument("point parameter out of range (|p|,q <= 2^14)");
  IdealTriangulation t;
  t.points = h;
  std::vector<int> order;  // current points in circle order
  for (int i = 0; i < static_cast<int>(h.size()); ++i) {
    auto pos = std::lower_bound(order.begin(), order.end(), i, [&](int a, int b) { return circle_less(h[a], h[b]); });
    if (pos != order.end() && same_point(h[*pos], h[i])) throw std::invalid_argument("points are not distinct");
    if (pos != order.begin() && same_point(h[*(pos - 1)], h[i])) throw std::invalid_argument("points are not distinct");
    const std::size_t at = pos - order.begin();
    order.insert(pos, i);
    if (order.size() == 3) {
      t.triangles.push_back({order[0], order[1], order[2]});
    } else if (order.size() > 3) {
      // the new point's cyclic neighbours span a hull edge it now caps
      int r = order[(at + order.size() - 1) % order.size()];
      int s = order[(at + 1) % order.size()];
      t.triangles.push_back({i, r, s});
    }
  }
  return t;
}

TriangulationCheck verify_triangulation(const IdealTriangulation& t) {
  TriangulationCheck c;
  const int n = static_cast<int>(t.points.size());
  std::vector<Homog> P;
  for (auto& p : t.points) P.push_back(homog(p));
  c.count_ok = static_cast<int>(t.triangles.size()) == n - 2;
  if (!c.count_ok) c.witness = "triangle count " + std::to_string(t.triangles.size());

  // counter-clockwise copies
  auto tris = t.triangles;
  for (auto& tr : tris) {
    int o = orient(P[tr[0]], P[tr[1]], P[tr[2]]);
    if (o == 0) {
      c.witness = "degenerate triangle";
      return c;
    }
    if (o < 0) std::swap(tr[1], tr[2]);
  }
  // separating axis on the convex triangles: disjoint interiors iff an edge of
  // one has the other entirely on its closed outer side
  auto separated = [&](const std::array<int, 3>& a, const std::array<int, 3>& b) {
    for (int e = 0; e < 3; ++e) {
      const Homog &u = P[a[e]], &v = P[a[(e + 1) % 3]];
      bool all = true;
      for (int k = 0; k < 3 && all; ++k) all = orient(u, v, P[b[k]]) <= 0;
      if (all) return true;
    }
    return false;
  };
  c.disjoint = true;
  for (std::size_t i = 0; i < tris.size() && c.disjoint; ++i)
    for (std::size_t j = i + 1; j < tris.size() && c.disjoint; ++j)
      if (!separated(tris[i], tris[j]) && !separated(tris[j], tris[i])) {
        c.disjoint = false;
        c.witness = "triangles " + std::to_string(i) + " and " + std::to_string(j) + " overlap";
      }
  // coverage: hull edges used once, every other used edge exactly twice
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return circle_less(t.points[a], t.points[b]); });
  std::map<std::pair<int, int>, int> uses;
  for (auto& tr : tris)
    for (int e = 0; e < 3; ++e) {
      int a = tr[e], b = tr[(e + 1) % 3];
      uses[{std::min(a, b), std::max(a, b)}]++;
    }
  std::map<std::pair<int, int>, int> hull;
  for (int i = 0; i < n; ++i) {
    int a = order[i], b = order[(i + 1) % n];
    hull[{std::min(a, b), std::max(a, b)}] = 1;
  }
  c.covers = true;
  for (auto& [e, k] : hull)
    if (uses[e] != 1) c.covers = false;
  for (auto& [e, k] : uses)
    if (!hull.count(e) && k != 2) c.covers = false;
  if (!c.covers && c.witness.empty()) c.witness = "edge use counts do not close up";

  // prefix extendability: rebuilding from each prefix yields a prefix of the list
  c.prefix_extendable = true;
  for (int j = 3; j < n && c.prefix_extendable; ++j) {
    auto sub = ideal_triangulation(std::vector<CirclePoint>(t.points.begin(), t.points.begin() + j));
    for (std::size_t i = 0; i < sub.triangles.size(); ++i)
      if (sub.triangles[i] != t.triangles[i]) {
        c.prefix_extendable = false;
        c.witness = "prefix " + std::to_string(j) + " differs";
        break;
      }
  }
  return c;
}

// --- lamination --------------------------------------------------------------------------------

namespace {

struct Pt {
  double x, y;
};

Pt circle_at(int pos, int total) {
  double a = 2 * M_PI * pos / total;
  return {std::cos(a), std::sin(a)};
}

double side(Pt a, Pt b, Pt x) {  // signed distance of x from line ab (left positive)
  double len = std::hypot(b.x - a.x, b.y - a.y);
  return ((b.x - a.x) * (x.y - a.y) - (b.y - a.y) * (x.x - a.x)) / len;
}

// positions sorted; two sets interleave iff one meets two gaps of the other
bool interleave(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() < 2 || b.size() < 2) return false;
  int gap0 = -1;
  for (int x : b) {
    int g = static_cast<int>(std::lower_bound(a.begin(), a.end(), x) - a.begin()) % static_cast<int>(a.size());
    if (gap0 < 0) gap0 = g;
    else if (g != gap0) return true;
  }
  return false;
}

}  // namespace

Lamination cancellation_lamination(const std::vector<int>& word, int grid) {
  if (!reduce_word(word).empty()) throw std::invalid_argument("loop not nullhomotopic in M'");
  Lamination lam;
  const int m = static_cast<int>(word.size());
  lam.letters = m;
  if (m == 0) {
    lam.constant = lam.noncrossing = true;
    lam.filling = 1.0;
    return lam;
  }
  // reduced prefix before every letter
  std::vector<std::vector<int>> prefix(m + 1);
  for (int i = 0; i < m; ++i) {
    prefix[i + 1] = prefix[i];
    auto& p = prefix[i + 1];
    if (!p.empty() && p.back() == -word[i]) p.pop_back();
    else p.push_back(word[i]);
  }
  std::vector<int> st;
  for (int i = 0; i < m; ++i) {
    if (!st.empty() && word[st.back()] == -word[i]) {
      lam.bands.push_back({st.back(), i});
      st.pop_back();
    } else {
      st.push_back(i);
    }
  }
  // vertex classes: the polygons left between band strips; a band (i, j)
  // glues vertex i to j+1 and i+1 to j
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  auto join = [&](int a, int b) { parent[find(a % m)] = find(b % m); };
  for (auto& b : lam.bands) {
    join(b.i, b.j + 1);
    join(b.i + 1, b.j);
  }
  std::map<int, std::vector<int>> classes;
  for (int i = 0; i < m; ++i) classes[find(i)].push_back(i);
  for (auto& [r, v] : classes) lam.vertex_classes.push_back(v);
  std::sort(lam.vertex_classes.begin(), lam.vertex_classes.end());

  // (1) the loop is constant on every element
  lam.constant = true;
  for (auto& v : lam.vertex_classes)
    for (int i : v)
      if (prefix[i] != prefix[v.front()]) lam.constant = false;
  for (auto& b : lam.bands) {
    bool ok = word[b.j] == -word[b.i] && prefix[b.i] == prefix[b.j + 1] && prefix[b.i + 1] == prefix[b.j];
    if (!ok) {
      lam.constant = false;
      lam.witness = "band " + std::to_string(b.i) + "," + std::to_string(b.j) + " not constant";
    }
  }

  // (2) no two elements interleave: vertex classes and sample chords of bands
  const int total = 4 * m;
  std::vector<std::vector<int>> elems;
  for (auto& v : lam.vertex_classes) {
    std::vector<int> e;
    for (int i : v) e.push_back(4 * i);
    elems.push_back(e);
  }
  for (auto& b : lam.bands)
    for (int s = 1; s <= 3; ++s) {
      std::vector<int> e{4 * b.i + s, (4 * b.j + 4 - s) % total};
      std::sort(e.begin(), e.end());
      elems.push_back(e);
    }
  lam.noncrossing = true;
  for (std::size_t a = 0; a < elems.size() && lam.noncrossing; ++a)
    for (std::size_t b = a + 1; b < elems.size(); ++b)
      if (interleave(elems[a], elems[b]) || interleave(elems[b], elems[a])) {
        lam.noncrossing = false;
        lam.witness = "elements " + std::to_string(a) + " and " + std::to_string(b) + " cross";
        break;
      }

  // (3) filling: sampled disk points lie in a class polygon or a band strip
  const double tol = 2.0 * (2.0 / grid);
  auto in_polygon = [&](const std::vector<int>& v, Pt x) {
    if (v.size() < 3) return false;
    for (std::size_t e = 0; e < v.size(); ++e)
      if (side(circle_at(4 * v[e], total), circle_at(4 * v[(e + 1) % v.size()], total), x) < -tol) return false;
    return true;
  };
  auto in_band = [&](const Band& b, Pt x) {
    // strip between chords (i, j+1) and (i+1, j); a chord with coincident ends
    // is the point where the two arcs meet
    int p0 = 4 * b.i, p1 = (4 * b.j + 4) % total, q0 = 4 * b.i + 4, q1 = 4 * b.j;
    bool ok = true;
    if (p0 != p1) {
      Pt a = circle_at(p0, total), c = circle_at(p1, total);
      Pt inner = circle_at(4 * b.i + 2, total);
      double s = side(a, c, inner) > 0 ? 1 : -1;
      ok = ok && s * side(a, c, x) >= -tol;
    }
    if (q0 != q1) {
      Pt a = circle_at(q0, total), c = circle_at(q1, total);
      Pt inner = circle_at(4 * b.i + 2, total);
      double s = side(a, c, inner) > 0 ? 1 : -1;
      ok = ok && s * side(a, c, x) >= -tol;
    }
    return ok;
  };
  int covered = 0;
  for (int gy = 0; gy < grid; ++gy)
    for (int gx = 0; gx < grid; ++gx) {
      Pt x{-1 + (2 * gx + 1.0) / grid, -1 + (2 * gy + 1.0) / grid};
      if (x.x * x.x + x.y * x.y >= 1) continue;
      ++lam.samples;
      bool hit = false;
      for (auto& v : lam.vertex_classes)
        if ((hit = in_polygon(v, x))) break;
      if (!hit)
        for (auto& b : lam.bands)
          if ((hit = in_band(b, x))) break;
      covered += hit;
    }
  lam.filling = lam.samples ? double(covered) / lam.samples : 1.0;
  return lam;
}

// --- map extension ---------------------------------------------------------------------------------

std::vector<int> run_graph_letters(const RunGraph& g, const Loop& loop, std::vector<Cell>* vertex_cells) {
  std::vector<int> letters;
  if (vertex_cells) vertex_cells->clear();
  for (std::size_t i = 0; i < loop.size(); ++i) {
    Cell a = loop[i], b = loop[(i + 1) % loop.size()];
    int u = g.node_at(a), v = g.node_at(b);
    if (u < 0 || v < 0) throw std::invalid_argument("loop exits M");
    if (u == v) continue;
    int e = g.edge_index(u, v);
    if (e < 0) throw std::invalid_argument("loop jumps between non-adjacent runs");
    letters.push_back(u < v ? e + 1 : -(e + 1));
    if (vertex_cells) vertex_cells->push_back(a);
  }
  return letters;
}

DiskMapRecord extend_filling(const Raster& m, const Loop& loop, const Lamination& lam, double bound) {
  check_loop(m, loop);
  auto g = build_run_graph(m);
  std::vector<Cell> vcell;
  auto letters = run_graph_letters(g, loop, &vcell);
  if (static_cast<int>(letters.size()) != lam.letters) throw std::invalid_argument("decomposition mismatch: lamination is for another loop");
  DiskMapRecord rec;
  rec.bound = bound;
  if (letters.empty()) {
    rec.vertex_image = {loop.front()};  // the whole disk goes to one point
    return rec;
  }
  rec.vertex_image = vcell;
  const int k = m.resolution();
  for (auto& cls : lam.vertex_classes) {
    const int node = g.node_at(vcell[cls.front()]);
    for (int i : cls)
      if (g.node_at(vcell[i]) != node)
        throw std::invalid_argument("decomposition mismatch: vertex " + std::to_string(i) + " maps outside the run of its class");
    if (cls.size() == 2) rec.intervals.push_back({cls[0], cls[1]});
    if (cls.size() < 3) continue;
    std::vector<CirclePoint> pts;
    for (int i : cls) pts.push_back({i, 1});
    auto tri = ideal_triangulation(pts);
    for (auto& t : tri.triangles) {
      std::array<int, 3> v{cls[t[0]], cls[t[1]], cls[t[2]]};
      rec.triangles.push_back(v);
      std::vector<Cell> img{vcell[v[0]], vcell[v[1]], vcell[v[2]]};
      rec.max_triangle_image = std::max(rec.max_triangle_image, diameter(img, k));
    }
  }
  for (auto& b : lam.bands) {
    // letter i steps a -> b at row y, letter j steps back at row y'; both rows
    // must sit in the contact interval of the two runs for the linear fill
    if (letters[b.j] != -letters[b.i]) throw std::invalid_argument("decomposition mismatch: band letters do not cancel");
    const auto& e = g.edges[std::abs(letters[b.i]) - 1];
    const Run &r1 = g.runs[e.first], &r2 = g.runs[e.second];
    const int lo = std::max(r1.y0, r2.y0), hi = std::min(r1.y1, r2.y1);
    for (int li : {b.i, b.j}) {
      int y = vcell[li].y;
      if (y < lo || y > hi) throw std::invalid_argument("decomposition mismatch: band chord leaves the contact interval");
    }
    rec.bands.push_back(b);
  }
  rec.continuity_ok = rec.max_triangle_image <= bound + 1e-12;
  return rec;
}

}  // namespace ph
