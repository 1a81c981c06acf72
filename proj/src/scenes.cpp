#include "planar_homotopy/scenes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ph {

bool Scene::has_resolution(int k) const { return std::find(ladder.begin(), ladder.end(), k) != ladder.end(); }

const Raster& Scene::bad_at(int k) const {
  for (std::size_t i = 0; i < ladder.size(); ++i)
    if (ladder[i] == k) return bad[i];
  throw std::invalid_argument("resolution " + std::to_string(k) + " is not on the scene ladder");
}

int Scene::max_depth() const {
  int d = 0;
  for (auto& p : punctures) d = std::max(d, p.depth);
  return d;
}

Cell puncture_cell(const Puncture& p, int k) {
  if (p.infinity) throw std::invalid_argument("the infinity puncture has no cell");
  auto coord = [k](const Dyadic& v) -> int {
    if (v.exp >= k) return static_cast<int>(v.num >> (v.exp - k));
    return static_cast<int>(v.num << (k - v.exp));
  };
  return {coord(p.point.x), coord(p.point.y)};
}

namespace {

const std::map<std::string, SceneName, std::less<>>& names() {
  static const std::map<std::string, SceneName, std::less<>> m{
      {"sierpinski", SceneName::Sierpinski},         {"sierpinski_filled_hole", SceneName::SierpinskiFilledHole},
      {"earring_circle", SceneName::EarringCircle},  {"comb_two_sided", SceneName::CombTwoSided},
      {"comb_one_sided", SceneName::CombOneSided},   {"finite_punctures", SceneName::FinitePunctures}};
  return m;
}

Puncture at_cell_centre(int cx, int cy, int k, int depth) {
  return Puncture{false, DyadicPoint{Dyadic{2 * std::int64_t(cx) + 1, k + 1}, Dyadic{2 * std::int64_t(cy) + 1, k + 1}}, depth};
}

Puncture infinity_puncture() { return Puncture{true, {}, 0}; }

// enumeration order: infinity, then by depth, then row-major by cell
void sort_punctures(std::vector<Puncture>& ps, int k) {
  std::stable_sort(ps.begin(), ps.end(), [k](const Puncture& a, const Puncture& b) {
    if (a.infinity != b.infinity) return a.infinity;
    if (a.infinity) return false;
    if (a.depth != b.depth) return a.depth < b.depth;
    Cell ca = puncture_cell(a, k), cb = puncture_cell(b, k);
    return std::tie(ca.y, ca.x) < std::tie(cb.y, cb.x);
  });
}

// three ladder rungs when the coarsest still resolves features of size
// `feature_fine` fine cells with `min_coarse` coarse cells, else two
std::vector<int> make_ladder(int K, std::int64_t feature_fine, std::int64_t min_coarse) {
  for (int span : {2, 1}) {
    if (K - span < 1) continue;
    if (feature_fine >> span >= min_coarse) {
      std::vector<int> l;
      for (int k = K - span; k <= K; ++k) l.push_back(k);
      return l;
    }
  }
  throw std::invalid_argument("resolution too coarse for depth");
}

void fill_ladder(Scene& s, const Raster& finest) {
  s.bad.assign(s.ladder.size(), Raster());
  s.bad.back() = finest;
  for (std::size_t i = s.ladder.size() - 1; i-- > 0;) {
    Raster r = s.bad[i + 1];
    for (int k = s.ladder[i + 1]; k > s.ladder[i]; --k) r = coarsen_any(r);
    s.bad[i] = r;
  }
}

std::int64_t pow3(int j) {
  std::int64_t p = 1;
  while (j-- > 0) p *= 3;
  return p;
}

struct Hole {
  std::int64_t p, q;  // square [p/3^j,(p+1)/3^j] x [q/3^j,(q+1)/3^j]
  int j;
};

std::vector<Hole> carpet_holes(int depth) {
  std::vector<Hole> holes;
  std::vector<std::pair<std::int64_t, std::int64_t>> alive{{0, 0}};
  for (int j = 1; j <= depth; ++j) {
    std::vector<std::pair<std::int64_t, std::int64_t>> next;
    for (auto [u, v] : alive) {
      holes.push_back({3 * u + 1, 3 * v + 1, j});
      for (int b = 0; b < 3; ++b)
        for (int a = 0; a < 3; ++a)
          if (a != 1 || b != 1) next.push_back({3 * u + a, 3 * v + b});
    }
    alive = std::move(next);
  }
  return holes;
}

Scene sierpinski(int d, int K, bool filled) {
  const std::int64_t N = std::int64_t{1} << K;
  Scene s;
  s.id = std::string(filled ? "sierpinski_filled_hole" : "sierpinski") + ":depth=" + std::to_string(d) + ":k=" + std::to_string(K);
  // smallest hole must keep >= 4 cells across at the coarsest rung so that its
  // puncture (4 fine cells in from the frame corner) stays off the frame
  s.ladder = make_ladder(K, N / pow3(d), 4);
  s.thin_from = s.ladder.front();

  Raster bad(K);
  s.punctures.push_back(infinity_puncture());
  for (auto& h : carpet_holes(d)) {
    const std::int64_t den = pow3(h.j);
    int xl = static_cast<int>(h.p * N / den), xr = static_cast<int>((h.p + 1) * N / den);
    int yt = static_cast<int>(h.q * N / den), yb = static_cast<int>((h.q + 1) * N / den);
    // closed cells meeting the square's boundary: the columns/rows that contain
    // its (non-dyadic) sides, within the square's extent
    for (int y = yt; y <= yb; ++y)
      for (int x = xl; x <= xr; ++x)
        if (x == xl || x == xr || y == yt || y == yb) bad.set(x, y);
    if (h.j == 1) {
      if (!filled) s.punctures.push_back(at_cell_centre(static_cast<int>(N / 2), static_cast<int>(N / 2), K, 1));
    } else {
      s.punctures.push_back(at_cell_centre(xl + 4, yt + 4, K, h.j));
    }
  }
  fill_ladder(s, bad);
  sort_punctures(s.punctures, K);
  return s;
}

Scene earring_circle(int d, int K) {
  const int N = 1 << K;
  Scene s;
  s.id = "earring_circle:depth=" + std::to_string(d) + ":k=" + std::to_string(K);
  const int S = N / 8;
  s.ladder = make_ladder(K, std::int64_t(S) >> (d - 1), 4);
  s.thin_from = s.ladder.front();
  if ((S >> (d - 1)) < 16) throw std::invalid_argument("resolution too coarse for depth");

  Raster bad(K);
  const int lo = N / 4, hi = 3 * N / 4;
  for (int t = lo; t <= hi; ++t) {
    bad.set(t, lo);
    bad.set(t, hi);
    bad.set(lo, t);
    bad.set(hi, t);
  }
  s.punctures.push_back(infinity_puncture());
  s.punctures.push_back(at_cell_centre(N / 2, N / 2, K, 1));
  // two earrings standing on the top side; ring j of an earring is the square
  // of side S/2^(j-1) with its lower-left corner at the attachment point
  for (int ax : {lo + N / 16, lo + N / 16 + S + N / 16}) {
    for (int j = 1; j <= d; ++j) {
      int sj = S >> (j - 1);
      for (int t = 0; t <= sj; ++t) {
        bad.set(ax + t, lo - sj);
        bad.set(ax, lo - t);
        bad.set(ax + sj, lo - t);
      }
      s.punctures.push_back(at_cell_centre(ax + sj - 4, lo - sj + 4, K, j + 1));
    }
  }
  fill_ladder(s, bad);
  sort_punctures(s.punctures, K);
  return s;
}

Scene comb(int d, int K, bool two_sided) {
  const int N = 1 << K;
  Scene s;
  s.id = std::string(two_sided ? "comb_two_sided" : "comb_one_sided") + ":depth=" + std::to_string(d) + ":k=" + std::to_string(K);
  const int J = d;
  if (J < 3) throw std::invalid_argument("comb needs depth >= 3 so teeth outrun the coarsest rung");
  if ((1 << J) > N / 8) throw std::invalid_argument("resolution too coarse for depth");
  s.ladder = {K - 2, K - 1, K};
  // teeth 2 cells apart merge under coarsening, so only the finest rung is thin
  s.thin_from = K;

  Raster bad(K);
  const int cL = N / 2, top = N / 8, base = 7 * N / 8;
  std::vector<int> t{0};
  for (int i = 1; i <= J; ++i) t.push_back(1 << i);
  for (int y = top; y <= base; ++y)
    for (int o : t) {
      bad.set(cL + o, y);
      bad.set(cL - o, y);
    }
  for (int x = cL - t.back(); x <= cL + t.back(); ++x) bad.set(x, base);

  s.punctures.push_back(infinity_puncture());
  // one puncture every 4 rows in each gap, in the gap's largest column: that
  // column's coarse parent is free whenever the gap is visible at that rung
  for (int i = 0; i < J; ++i) {
    int depth = J - i;
    for (int y = top + 2; y < base - 1; y += 4) {
      s.punctures.push_back(at_cell_centre(cL + t[i + 1] - 1, y, K, depth));
      if (two_sided) s.punctures.push_back(at_cell_centre(cL - t[i] - 1, y, K, depth));
    }
  }
  fill_ladder(s, bad);
  sort_punctures(s.punctures, K);
  return s;
}

Scene finite_punctures(int d, int K) {
  const int N = 1 << K;
  Scene s;
  s.id = "finite_punctures:depth=" + std::to_string(d) + ":k=" + std::to_string(K);
  if (N / (d + 1) < 4) throw std::invalid_argument("resolution too coarse for depth");
  s.ladder = make_ladder(K, N, 4);
  s.thin_from = s.ladder.front();
  s.punctures.push_back(infinity_puncture());
  for (int i = 0; i < d; ++i) s.punctures.push_back(at_cell_centre((i + 1) * N / (d + 1), N / 2, K, 1));
  fill_ladder(s, Raster(K));
  sort_punctures(s.punctures, K);
  return s;
}

}  // namespace

std::optional<SceneName> parse_scene_name(std::string_view s) {
  auto it = names().find(s);
  if (it == names().end()) return std::nullopt;
  return it->second;
}

std::string to_string(SceneName n) {
  for (auto& [k, v] : names())
    if (v == n) return k;
  return "?";
}

Scene builtin_scene(SceneName name, int depth, int k) {
  if (depth < 1 || depth > 6) throw std::invalid_argument("depth out of range [1,6]");
  if (k < 3 || k > 12) throw std::invalid_argument("k out of range [3,12]");
  switch (name) {
    case SceneName::Sierpinski: return sierpinski(depth, k, false);
    case SceneName::SierpinskiFilledHole: return sierpinski(depth, k, true);
    case SceneName::EarringCircle: return earring_circle(depth, k);
    case SceneName::CombTwoSided: return comb(depth, k, true);
    case SceneName::CombOneSided: return comb(depth, k, false);
    case SceneName::FinitePunctures: return finite_punctures(depth, k);
  }
  throw std::invalid_argument("unknown scene");
}

Scene builtin_scene(std::string_view name, int depth, int k) {
  auto n = parse_scene_name(name);
  if (!n) throw std::invalid_argument("unknown scene name '" + std::string(name) + "'");
  return builtin_scene(*n, depth, k);
}

// --- validation ---------------------------------------------------------------

bool SceneVerdictRecord::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const SceneCheck& c) { return c.passed; });
}

const SceneCheck* SceneVerdictRecord::find(std::string_view name) const {
  for (auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

std::string cell_str(Cell c, int k) { return "cell " + std::to_string(c.x) + "," + std::to_string(c.y) + " at k=" + std::to_string(k); }

std::string point_str(const Puncture& p) {
  if (p.infinity) return "infinity";
  return p.point.x.str_pow() + " " + p.point.y.str_pow();
}

}  // namespace

SceneVerdictRecord validate_scene(const Scene& s) {
  SceneVerdictRecord rec;
  rec.scene_id = s.id;

  SceneCheck ladder{"ladder", true, {}};
  if (s.ladder.empty()) {
    ladder.passed = false;
    ladder.witness = "empty ladder";
  } else if (s.bad.size() != s.ladder.size()) {
    ladder.passed = false;
    ladder.witness = "ladder has " + std::to_string(s.ladder.size()) + " rungs but " + std::to_string(s.bad.size()) + " rasters";
  } else {
    for (std::size_t i = 0; i < s.ladder.size() && ladder.passed; ++i) {
      if (s.bad[i].resolution() != s.ladder[i]) {
        ladder.passed = false;
        ladder.witness = "raster " + std::to_string(i) + " is at k=" + std::to_string(s.bad[i].resolution());
      } else if (i && s.ladder[i] <= s.ladder[i - 1]) {
        ladder.passed = false;
        ladder.witness = "ladder not increasing at k=" + std::to_string(s.ladder[i]);
      } else if (s.bad[i].includes_infinity()) {
        ladder.passed = false;
        ladder.witness = "bad set contains infinity at k=" + std::to_string(s.ladder[i]);
      }
    }
  }
  rec.checks.push_back(ladder);
  if (!ladder.passed) return rec;

  SceneCheck refinement{"refinement", true, {}};
  for (std::size_t i = 0; i + 1 < s.ladder.size() && refinement.passed; ++i) {
    Raster r = s.bad[i + 1];
    for (int k = s.ladder[i + 1]; k > s.ladder[i]; --k) r = coarsen_any(r);
    if (r == s.bad[i]) continue;
    refinement.passed = false;
    for (int y = 0; y < r.side() && refinement.witness.empty(); ++y)
      for (int x = 0; x < r.side(); ++x)
        if (r.test(x, y) != s.bad[i].test(x, y)) {
          refinement.witness = cell_str({x, y}, s.ladder[i]);
          break;
        }
  }
  rec.checks.push_back(refinement);

  SceneCheck dim{"dimension", true, {}};
  for (std::size_t i = 0; i < s.ladder.size() && dim.passed; ++i) {
    if (s.ladder[i] < s.thin_from) continue;
    if (auto b = find_2x2_block(s.bad[i])) {
      dim.passed = false;
      dim.witness = "2x2 block at " + cell_str(*b, s.ladder[i]);
    }
  }
  rec.checks.push_back(dim);

  const int K = s.finest();
  const Raster& fine = s.bad.back();

  SceneCheck inside{"inside", true, {}};
  SceneCheck distinct{"distinct", true, {}};
  SceneCheck disjoint{"disjointness", true, {}};
  std::set<std::pair<int, int>> seen;
  for (std::size_t i = 0; i < s.punctures.size(); ++i) {
    const auto& p = s.punctures[i];
    if (p.infinity) {
      if (i != 0 && inside.passed) {
        inside.passed = false;
        inside.witness = "infinity listed at position " + std::to_string(i);
      }
      continue;
    }
    auto in_unit = [](const Dyadic& v) { return v.num >= 0 && v.exp >= 0 && v.exp <= 60 && v.num < (std::int64_t{1} << v.exp); };
    if (!in_unit(p.point.x) || !in_unit(p.point.y)) {
      if (inside.passed) inside.witness = point_str(p);
      inside.passed = false;
      continue;
    }
    Cell c = puncture_cell(p, K);
    if (!seen.insert({c.x, c.y}).second && distinct.passed) {
      distinct.passed = false;
      distinct.witness = point_str(p) + " shares " + cell_str(c, K);
    }
    if (fine.test(c) && disjoint.passed) {
      disjoint.passed = false;
      disjoint.witness = point_str(p) + " on bad " + cell_str(c, K);
    }
  }
  rec.checks.push_back(inside);
  rec.checks.push_back(distinct);
  rec.checks.push_back(disjoint);

  // deeper punctures only accumulate on B: within 2 coarsest cell-widths of a
  // bad cell at the finest rung
  SceneCheck accum{"accumulation", true, {}};
  const double reach = 2.0 * std::ldexp(1.0, -s.coarsest());
  const int r = static_cast<int>(std::floor(reach * fine.side() + 1e-9));
  for (auto& p : s.punctures) {
    if (p.infinity || p.depth < 2 || !inside.passed) continue;
    Cell c = puncture_cell(p, K);
    bool near = false;
    for (int dy = -r; dy <= r && !near; ++dy)
      for (int dx = -r; dx <= r && !near; ++dx)
        near = dx * dx + dy * dy <= r * r && fine.get(c.x + dx, c.y + dy);
    if (!near) {
      accum.passed = false;
      accum.witness = point_str(p) + " depth=" + std::to_string(p.depth);
      break;
    }
  }
  rec.checks.push_back(accum);
  return rec;
}

// --- derived rasters --------------------------------------------------------------

Raster peano_continuum_from_scene(const Scene& s, int k) {
  const Raster& bad = s.bad_at(k);
  Raster m(k);
  m.fill(true);
  std::vector<Cell> centres;
  for (auto& p : s.punctures)
    if (!p.infinity) centres.push_back(puncture_cell(p, k));
  for (std::size_t i = 0; i < centres.size(); ++i)
    for (std::size_t j = i + 1; j < centres.size(); ++j)
      if (std::max(std::abs(centres[i].x - centres[j].x), std::abs(centres[i].y - centres[j].y)) <= 3)
        throw std::invalid_argument("resolution too coarse: punctures within 3 cells at k=" + std::to_string(k));
  for (Cell c : centres)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        int x = c.x + dx, y = c.y + dy;
        if (!m.in_bounds(x, y)) throw std::invalid_argument("resolution too coarse: puncture disk leaves the square");
        if (bad.test(x, y)) throw std::invalid_argument("resolution too coarse: puncture disk meets the bad set");
        m.set(x, y, false);
      }
  return m;
}

Raster sierpinski_carpet(int depth, int k) {
  const std::int64_t N = std::int64_t{1} << k;
  Raster r(k);
  r.fill(true);
  for (auto& h : carpet_holes(depth)) {
    const std::int64_t den = pow3(h.j);
    // centre (2x+1)/(2N) strictly inside (p/den, (p+1)/den)
    for (std::int64_t y = 0; y < N; ++y) {
      if (!((2 * y + 1) * den > 2 * N * h.q && (2 * y + 1) * den < 2 * N * (h.q + 1))) continue;
      for (std::int64_t x = 0; x < N; ++x)
        if ((2 * x + 1) * den > 2 * N * h.p && (2 * x + 1) * den < 2 * N * (h.p + 1)) r.set(int(x), int(y), false);
    }
  }
  return r;
}

// --- SVG -------------------------------------------------------------------------

namespace {

void svg_open(std::ostream& os, int n) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << n << ' ' << n << "\" width=\"" << std::max(512, n)
     << "\" height=\"" << std::max(512, n) << "\" shape-rendering=\"crispEdges\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << n << "\" height=\"" << n << "\" fill=\"white\" stroke=\"black\" stroke-width=\""
     << std::max(1, n / 256) << "\"/>\n";
}

void svg_cells(std::ostream& os, const Raster& r, const char* fill) {
  for (int y = 0; y < r.side(); ++y)
    for (int x = 0; x < r.side(); ++x)
      if (r.test(x, y)) os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"1\" height=\"1\" fill=\"" << fill << "\"/>\n";
}

}  // namespace

std::string svg_string(const Raster& r) {
  std::ostringstream os;
  svg_open(os, r.side());
  svg_cells(os, r, "black");
  if (r.includes_infinity()) os << "<!-- includes infinity -->\n";
  os << "</svg>\n";
  return os.str();
}

std::string svg_string(const Scene& s) {
  std::ostringstream os;
  const int K = s.finest();
  svg_open(os, 1 << K);
  svg_cells(os, s.bad.back(), "black");
  for (auto& p : s.punctures) {
    if (p.infinity) continue;
    Cell c = puncture_cell(p, K);
    os << "<circle cx=\"" << c.x + 0.5 << "\" cy=\"" << c.y + 0.5 << "\" r=\"0.5\" fill=\"red\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  if (!f) throw std::runtime_error("cannot write " + path);
}

}  // namespace

void render_svg(const Scene& scene, const std::string& path) { write_file(path, svg_string(scene)); }
void render_svg(const Raster& raster, const std::string& path) { write_file(path, svg_string(raster)); }

// --- scene files ------------------------------------------------------------------

void write_scene(std::ostream& os, const Scene& s) {
  os << "PH-SCENE\n";
  os << "id=" << s.id << '\n';
  os << "thin_from=" << s.thin_from << '\n';
  os << "ladder=";
  for (std::size_t i = 0; i < s.ladder.size(); ++i) os << (i ? "," : "") << s.ladder[i];
  os << '\n';
  for (auto& r : s.bad) write_raster(os, r);
  std::map<int, std::vector<const Puncture*>> by_depth;
  bool inf = false;
  for (auto& p : s.punctures) {
    if (p.infinity) inf = true;
    else by_depth[p.depth].push_back(&p);
  }
  for (auto& [d, ps] : by_depth) {
    os << "punctures depth=" << d << '\n';
    for (auto* p : ps) os << p->point.x.str_pow() << ' ' << p->point.y.str_pow() << '\n';
  }
  if (inf) os << "infinity=1\n";
}

Scene read_scene(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "PH-SCENE") throw std::runtime_error("missing PH-SCENE header");
  Scene s;
  bool have_thin = false;
  int depth = -1;
  std::vector<Puncture> finite;
  bool inf = false;
  std::streampos pos = is.tellg();
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      pos = is.tellg();
      continue;
    }
    if (line.rfind("PH-RASTER", 0) == 0) {
      is.clear();
      is.seekg(pos);
      s.bad.push_back(read_raster(is));
    } else if (line.rfind("id=", 0) == 0) {
      s.id = line.substr(3);
    } else if (line.rfind("thin_from=", 0) == 0) {
      s.thin_from = std::stoi(line.substr(10));
      have_thin = true;
    } else if (line.rfind("ladder=", 0) == 0) {
      std::stringstream ss(line.substr(7));
      std::string tok;
      while (std::getline(ss, tok, ',')) s.ladder.push_back(std::stoi(tok));
    } else if (line.rfind("punctures depth=", 0) == 0) {
      depth = std::stoi(line.substr(16));
      if (depth < 1) throw std::runtime_error("puncture depth must be >= 1");
    } else if (line == "infinity=1") {
      inf = true;
    } else if (line == "infinity=0") {
      inf = false;
    } else if (depth >= 1) {
      std::istringstream ps(line);
      std::string xs, ys, extra;
      if (!(ps >> xs >> ys) || (ps >> extra)) throw std::runtime_error("malformed puncture line: '" + line + "'");
      Puncture p;
      p.point = {Dyadic::parse(xs), Dyadic::parse(ys)};
      p.depth = depth;
      finite.push_back(p);
    } else {
      throw std::runtime_error("unexpected scene line: '" + line + "'");
    }
    pos = is.tellg();
  }
  if (s.ladder.empty()) throw std::runtime_error("scene has no ladder");
  if (s.bad.size() != s.ladder.size()) throw std::runtime_error("scene ladder and raster count differ");
  if (!have_thin) s.thin_from = s.ladder.front();
  if (inf) s.punctures.push_back(infinity_puncture());
  for (auto& p : finite) s.punctures.push_back(p);
  return s;
}

Scene load_scene(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  return read_scene(f);
}

void save_scene(const Scene& scene, const std::string& path) {
  std::ostringstream os;
  write_scene(os, scene);
  write_file(path, os.str());
}

}  // namespace ph
