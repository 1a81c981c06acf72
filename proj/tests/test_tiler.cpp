#include <chrono>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "planar_homotopy/retractor.hpp"
#include "planar_homotopy/tiler.hpp"

using namespace ph;

namespace {

Puncture at_centre(int x, int y, int k) { return {false, {{2 * x + 1, k + 1}, {2 * y + 1, k + 1}}, 1}; }

Scene open_scene(int k, std::vector<Puncture> ps, bool with_infinity) {
  Scene s;
  s.id = "fixture";
  s.ladder = {k};
  s.bad = {Raster(k)};
  if (with_infinity) s.punctures.push_back({true, {}, 0});
  for (auto& p : ps) s.punctures.push_back(p);
  return s;
}

Raster rect(int k, int x0, int y0, int x1, int y1) {
  Raster r(k);
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) r.set(x, y);
  return r;
}

// exact: does the dyadic coordinate land on a grid line of g?
bool on_grid_line(const Dyadic& c, const GridStage& g, bool use_x) {
  Dyadic d = c.reduced();
  if (d.exp > g.resolution) return false;
  std::int64_t X = d.num << (g.resolution - d.exp);
  std::int64_t off = use_x ? g.ox : g.oy;
  return ((X - off) % g.block + g.block) % g.block == 0;
}

// active cells of each block, component-counted by the oracle
int element_oracle(const GridStage& g) {
  const int n = 1 << g.resolution;
  std::map<std::pair<int, int>, Raster> blocks;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      if (g.active.test(x, y)) {
        auto key = std::make_pair(g.block_x(x), g.block_y(y));
        auto it = blocks.try_emplace(key, Raster(g.resolution)).first;
        it->second.set(x, y);
      }
  int total = g.active.includes_infinity() ? 1 : 0;
  for (auto& [key, r] : blocks) total += oracle::component_count(r, false);
  return total;
}

// active pairs straddling a grid line, plus border cells facing infinity
int contact_length_oracle(const GridStage& g) {
  const int n = 1 << g.resolution;
  int total = 0;
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      if (!g.active.test(x, y)) continue;
      if (x + 1 < n && g.active.test(x + 1, y) && g.block_x(x) != g.block_x(x + 1)) ++total;
      if (y + 1 < n && g.active.test(x, y + 1) && g.block_y(y) != g.block_y(y + 1)) ++total;
      if (g.active.includes_infinity()) total += (x == 0) + (y == 0) + (x == n - 1) + (y == n - 1);
    }
  return total;
}

}  // namespace

TEST_CASE("grid: squares, offsets, errors") {
  SUBCASE("empty bad set, mesh 1/2") {
    auto s = builtin_scene(SceneName::FinitePunctures, 3, 6);
    auto g = impose_grid(s, 0, Dyadic{1, 1});
    CHECK(g.squares() == 4);
    CHECK(g.block == 32);
    for (auto& p : s.punctures)
      if (!p.infinity) CHECK((!on_grid_line(p.point.x, g, true) && !on_grid_line(p.point.y, g, false)));
    CHECK(g.active.includes_infinity());
    CHECK(g.active.count() == 64u * 64u);
  }
  SUBCASE("sierpinski, stage 1, mesh 1/4") {
    auto s = builtin_scene(SceneName::Sierpinski, 2, 8);
    auto g = impose_grid(s, 1, Dyadic{1, 2});
    CHECK(g.squares() == 16);
    CHECK(g.active == complement(s.bad_at(8)));
  }
  SUBCASE("puncture on the default grid line moves the grid") {
    // x = 1/2 is a mesh-1/4 line; y = 3/8 is not
    Scene s = open_scene(8, {{false, {{1, 1}, {3, 3}}, 1}}, true);
    auto g = impose_grid(s, 1, Dyadic{1, 2});
    CHECK(g.ox == 1);
    CHECK(g.oy == 0);
    CHECK(!on_grid_line(s.punctures[1].point.x, g, true));
    CHECK(g.squares() == 20);  // 5 columns of squares, 4 rows
  }
}

TEST_CASE("grid: mesh bounds") {
  auto s = builtin_scene(SceneName::FinitePunctures, 1, 6);
  CHECK_NOTHROW(impose_grid(s, 2, Dyadic{1, 1}));
  CHECK_THROWS_AS(impose_grid(s, 3, Dyadic{1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(impose_grid(s, 1, Dyadic{1, 5}), std::invalid_argument);  // 2 cells
  // punctures on every column offset of a 4-cell mesh
  Scene dense = open_scene(4, {}, true);
  for (int i = 0; i < 4; ++i) dense.punctures.push_back({false, {{i, 4}, {1, 5}}, 1});
  CHECK_THROWS_WITH_AS(impose_grid(dense, 1, Dyadic{1, 2}), "resolution too coarse for mesh", std::invalid_argument);
}

TEST_CASE("classify: elements and contacts against oracles") {
  auto s = builtin_scene(SceneName::Sierpinski, 2, 8);
  for (int stage : {0, 1, 2}) {
    auto g = impose_grid(s, stage, Dyadic{1, stage + 1});
    auto c = classify_components(g, s);
    CHECK(static_cast<int>(c.c0.members.size()) == element_oracle(g));
    int len = 0;
    for (auto& ct : c.contacts) len += ct.length;
    CHECK(len == contact_length_oracle(g));
    // every K touches a punctured element along some run
    for (auto& mem : c.k_members) {
      std::set<int> m(mem.begin(), mem.end());
      bool touched = false;
      for (auto& ct : c.contacts)
        touched = touched || (m.count(ct.a) && !c.info[ct.b].punctures.empty()) || (m.count(ct.b) && !c.info[ct.a].punctures.empty());
      CHECK(touched);
    }
    // every active puncture is in exactly one element
    int placed = 0;
    for (auto& in : c.info) placed += static_cast<int>(in.punctures.size());
    CHECK(placed == static_cast<int>(s.punctures.size()));
  }
}

TEST_CASE("classify: all punctured means no K") {
  const int k = 5;
  Scene s = open_scene(k, {at_centre(8, 8, k), at_centre(24, 8, k), at_centre(8, 24, k), at_centre(24, 24, k)}, true);
  auto g = impose_grid(s, 0, Dyadic{1, 1});
  auto c = classify_components(g, s);
  CHECK(c.c0.members.size() == 5);
  CHECK(c.k_members.empty());
  CHECK(c.c0.edge_adjacency.size() == 8);  // 4 inner edges + 4 to infinity
}

TEST_CASE("classify: the filled hole breaks claim (iv)") {
  auto s = builtin_scene(SceneName::SierpinskiFilledHole, 2, 8);
  auto g = impose_grid(s, 0, Dyadic{1, 1});
  CHECK_THROWS_WITH_AS(classify_components(g, s), doctest::Contains("claim (iv)"), std::runtime_error);
}

TEST_CASE("forest: one K, one arc") {
  const int k = 5;
  Scene s = open_scene(k, {at_centre(4, 8, k)}, false);
  auto g = impose_grid(s, 0, Dyadic{1, 1}, rect(k, 0, 0, 32, 16));
  auto c = classify_components(g, s);
  REQUIRE(c.k_members.size() == 1);
  auto f = grow_forest(g, s, c);
  REQUIRE(f.arcs.size() == 1);
  REQUIRE(f.trees.size() == 1);
  const auto& a = f.arcs[0];
  CHECK(a.attach.length == 16);
  CHECK(a.attach.mid_b == Cell{15, 7});
  CHECK(a.cells.front() == Cell{15, 7});
  // shortest 4-path: |15-4| + |7-8| = 12 steps, the puncture cell excluded
  CHECK(a.cells.size() == 12);
  Cell last = a.cells.back();
  CHECK(std::abs(last.x - 4) + std::abs(last.y - 8) == 1);
  CHECK(a.ends_on_arc == -1);
  CHECK(f.trees[0].puncture == 0);
  CHECK(f.trees[0].diameter == doctest::Approx(oracle::diameter(f.trees[0].cells, k)));
  CHECK(f.tail_max_diameter.size() == 1);
}

TEST_CASE("forest: two K's share one L") {
  const int k = 5;
  Scene s = open_scene(k, {at_centre(2, 2, k)}, false);
  Raster active = unite(rect(k, 0, 0, 32, 16), rect(k, 0, 16, 16, 32));
  auto g = impose_grid(s, 0, Dyadic{1, 1}, active);
  auto c = classify_components(g, s);
  REQUIRE(c.k_members.size() == 2);
  auto f = grow_forest(g, s, c);
  REQUIRE(f.arcs.size() == 2);
  CHECK(f.arcs[0].ends_on_arc == -1);
  CHECK(f.arcs[1].ends_on_arc == 0);
  REQUIRE(f.trees.size() == 1);
  CHECK(f.trees[0].arcs == std::vector<int>{0, 1});
  CHECK(f.tree_of_arc == std::vector<int>{0, 0});
  // arcs stay inside their element, so never cross a grid line
  for (auto& a : f.arcs)
    for (Cell x : a.cells) CHECK(c.c0.label_at(x) == a.element);
  CHECK(f.tail_max_diameter[0] >= f.tail_max_diameter[1]);

  auto r = assemble_domains(g, s, f, c);
  REQUIRE(r.domains.size() == 1);
  CHECK(r.domains[0].cells == active);
  CHECK(r.domains[0].k_parts == 2);
  CHECK(r.residual.empty());
}

TEST_CASE("assemble: trivial forest") {
  const int k = 5;
  Scene s = open_scene(k, {at_centre(8, 8, k), at_centre(24, 8, k), at_centre(8, 24, k), at_centre(24, 24, k)}, true);
  auto g = impose_grid(s, 0, Dyadic{1, 1});
  auto c = classify_components(g, s);
  auto none = assemble_domains(g, s, grow_forest(g, s, c), c);
  CHECK(none.domains.empty());
  CHECK(none.residual == g.active);
  // forcing one puncture thickens it into a core; the rest of its square is one M
  auto f = grow_forest(g, s, c, {1});
  REQUIRE(f.trees.size() == 1);
  CHECK(f.trees[0].forced);
  auto r = assemble_domains(g, s, f, c);
  REQUIRE(r.domains.size() == 1);
  CHECK(r.m_cells.size() == 1);
  CHECK(r.domains[0].cells.count() == 16u * 16u);
  CHECK(!intersects(r.domains[0].cells, r.residual));
}

TEST_CASE("sierpinski stage 0: domains disjoint and punctured") {
  auto s = builtin_scene(SceneName::Sierpinski, 2, 8);
  auto g = impose_grid(s, 0, Dyadic{1, 1});
  auto c = classify_components(g, s);
  auto f = grow_forest(g, s, c, {0});
  auto r = assemble_domains(g, s, f, c);
  REQUIRE(!r.domains.empty());
  Raster seen(8);
  for (auto& d : r.domains) {
    CHECK(!intersects(seen, d.cells));
    seen = unite(seen, d.cells);
    const Puncture& p = s.punctures[d.punctures.front()];
    CHECK((p.infinity ? d.cells.includes_infinity() : d.cells.test(puncture_cell(p, 8))));
    CHECK(label_components(d.cells, Adjacency::Four).members.size() == 1);
  }
  CHECK(!intersects(seen, r.residual));
  CHECK(unite(seen, r.residual) == g.active);
  // residual pieces all hold punctures
  auto fam = label_components(r.residual, Adjacency::Four);
  for (auto& m : fam.members) {
    int hits = 0;
    for (auto& p : s.punctures)
      if (!p.infinity && std::find(m.cells.begin(), m.cells.end(), puncture_cell(p, 8)) != m.cells.end()) ++hits;
    CHECK(hits >= 1);
  }
}

TEST_CASE("run: sierpinski, three stages") {
  auto s = builtin_scene(SceneName::Sierpinski, 2, 8);
  auto t0 = std::chrono::steady_clock::now();
  auto t = run_stages(s, 3);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 60.0);
  INFO(format_claims(t));
  CHECK(t.passed());
  REQUIRE(t.stages.size() == 3);
  std::set<std::string> ids;
  for (auto& st : t.stages)
    for (auto& c : st.claims) ids.insert(c.claim);
  for (auto& c : t.claims) ids.insert(c.claim);
  for (const char* id : {"iii", "iv", "v", "vi", "vii", "viii", "ix", "x", "xi"}) CHECK(ids.count(id));
  double prev = 0;
  for (std::size_t i = 0; i < t.stages.size(); ++i) {
    CHECK(t.stages[i].coverage >= prev);
    prev = t.stages[i].coverage;
    if (i >= 1) CHECK(t.stages[i].max_diameter <= 1.0 / static_cast<double>(i));
  }
  CHECK(t.stages.back().coverage >= 0.9);
  // regression baseline from the first verified run
  CHECK(t.stages[0].coverage == doctest::Approx(0.954644).epsilon(1e-5));
  CHECK(t.stages[2].coverage == doctest::Approx(1.0));
  CHECK(t.domains.size() == 10);
  Raster seen(8);
  for (auto& d : t.domains) {
    CHECK(!intersects(seen, d.cells));
    seen = unite(seen, d.cells);
    CHECK(d.punctures.size() == 1);
  }
  for (std::size_t i = 0; i < t.stages.size(); ++i) CHECK(t.stages[i].grid.mesh == Dyadic{1, static_cast<int>(i) + 1});

  SUBCASE("spines of the tiling") {
    auto rep = spine_union_dimension_check(t, s);
    CHECK(rep.passed);
    auto spines = tiling_spines(t, s);
    REQUIRE(spines.size() == t.domains.size());
    int checked = 0;
    for (std::size_t i = 0; i < spines.size(); ++i) {
      CHECK(spines[i].bijective());
      if (t.domains[i].cells.includes_infinity()) continue;
      // one puncture: the skeleton is exactly the domain's frame
      CHECK(spines[i].skeleton == spines[i].boundary);
      CHECK(spines[i].regions.size() == 1);
      ++checked;
    }
    CHECK(checked == 9);
  }
  SUBCASE("tiling file round trip") {
    std::stringstream ss;
    write_tiling(ss, t);
    auto back = read_tiling(ss);
    CHECK(back.resolution == 8);
    CHECK(back.scene_id == s.id);
    REQUIRE(back.domains.size() == t.domains.size());
    for (std::size_t i = 0; i < t.domains.size(); ++i) {
      CHECK(back.domains[i].cells == t.domains[i].cells);
      CHECK(back.domains[i].punctures == t.domains[i].punctures);
      CHECK(back.domains[i].stage == t.domains[i].stage);
    }
    CHECK(back.residual == t.residual);
    std::stringstream again;
    write_tiling(again, back);
    std::stringstream first;
    write_tiling(first, t);
    CHECK(again.str() == first.str());
    CHECK(svg_string(t, s).find("<svg") == 0);
  }
}

TEST_CASE("run: refusals and the trivial case") {
  auto filled = builtin_scene(SceneName::SierpinskiFilledHole, 2, 8);
  CHECK_THROWS_WITH_AS(run_stages(filled, 3), doctest::Contains("scene is not homotopically 1-dimensional"), std::runtime_error);

  auto finite = builtin_scene(SceneName::FinitePunctures, 3, 7);
  auto t = run_stages(finite, 1);
  CHECK(t.passed());
  REQUIRE(t.domains.size() == 1);
  CHECK(t.domains[0].punctures.size() == finite.punctures.size());
  CHECK(t.stages[0].coverage == 1.0);
  // its spine is a bouquet: one region per puncture
  auto spines = tiling_spines(t, finite);
  REQUIRE(spines.size() == 1);
  CHECK(spines[0].regions.size() == finite.punctures.size());
  CHECK(spines[0].bijective());
}

TEST_CASE("tiling file errors") {
  std::stringstream bad("PH-TILING k=x\n");
  CHECK_THROWS_AS(read_tiling(bad), std::runtime_error);
  std::stringstream truncated("PH-TILING k=3 stages=1 domains=2 scene=x\ndomain stage=0 punctures=1\n");
  CHECK_THROWS_AS(read_tiling(truncated), std::runtime_error);
}
