#include <random>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "planar_homotopy/retractor.hpp"

using namespace ph;

namespace {

Raster square_domain(int k, int x0, int y0, int x1, int y1) {
  Raster u(k);
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) u.set(x, y);
  return u;
}

// cells outside u that touch u, computed independently
Raster ring_oracle(const Raster& u) {
  Raster r(u.resolution());
  const int n = u.side();
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      if (u.test(x, y)) continue;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          int a = x + dx, b = y + dy;
          if (a >= 0 && b >= 0 && a < n && b < n && u.test(a, b)) r.set(x, y);
        }
    }
  return r;
}

Raster cells_raster(int k, const std::vector<Cell>& cells) {
  Raster r(k);
  for (Cell c : cells) r.set(c);
  return r;
}

int holes(const Raster& region) {
  // bounded 8-components of the complement
  return oracle::component_count(complement(region), true) - 1;
}

int region_of(const std::vector<Component>& regions, Cell c) {
  for (std::size_t i = 0; i < regions.size(); ++i)
    for (Cell x : regions[i].cells)
      if (x == c) return static_cast<int>(i);
  return -1;
}

}  // namespace

TEST_CASE("one puncture: skeleton is the frame of the domain") {
  Raster u = square_domain(5, 8, 8, 24, 24);
  auto s = build_spine(u, {{16, 16}});
  CHECK(s.skeleton == ring_oracle(u));
  CHECK(s.boundary == ring_oracle(u));
  CHECK(s.circles.empty());
  CHECK(s.arcs.empty());
  REQUIRE(s.regions.size() == 1);
  CHECK(s.regions[0].cells.size() == 16u * 16u);
  CHECK(s.bijective());
}

TEST_CASE("two punctures: frame, one circle, one arc, two regions") {
  Raster u = square_domain(5, 4, 4, 28, 28);
  auto s = build_spine(u, {{10, 16}, {20, 16}});
  REQUIRE(s.circles.size() == 1);
  REQUIRE(s.arcs.size() == 1);
  CHECK(s.circles[0].size() == 8);
  // shortest route from the circle around (20,16) to the frame: the circle's
  // east side is at x=21, the frame at x=28; the arc starts on x=22 and the
  // last cell sits next to the frame at x=27
  CHECK(s.arcs[0].size() == 6);
  CHECK(s.arcs[0].front().x == 22);
  CHECK(s.arcs[0].back().x == 27);
  CHECK(s.regions.size() == 2);
  CHECK(s.bijective());
  CHECK(!find_2x2_block(s.skeleton));
  // region of the second puncture is the single cell inside its circle
  int r = s.puncture_region[1];
  CHECK(s.regions[r].cells.size() == 1);
  CHECK(is_subset(subtract(s.skeleton, s.boundary), u));
}

TEST_CASE("spacing preconditions") {
  Raster u = square_domain(5, 4, 4, 28, 28);
  CHECK_THROWS_WITH_AS(build_spine(u, {{10, 10}, {12, 12}}), doctest::Contains("resolution too coarse"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(build_spine(u, {{16, 16}, {5, 16}}), doctest::Contains("resolution too coarse"), std::invalid_argument);
  // the root may sit anywhere in u
  CHECK_NOTHROW(build_spine(u, {{4, 4}, {16, 16}}));
  CHECK_THROWS_AS(build_spine(u, {{0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(build_spine(u, {}), std::invalid_argument);
}

TEST_CASE("generated domains: bijection, thin skeleton, cut structure") {
  std::mt19937_64 rng(4242);
  int cases = 0;
  for (int i = 0; i < 120; ++i) {
    const int count = 1 + i % 5;
    auto d = fixture::punctured_domain(rng, 6, count);
    Spine s;
    REQUIRE_NOTHROW(s = build_spine(d.u, d.punctures));
    ++cases;
    CHECK(s.bijective());
    CHECK(!find_2x2_block(s.skeleton));
    CHECK(s.regions.size() == d.punctures.size());
    CHECK(is_subset(ring_oracle(d.u), s.skeleton));
    CHECK(is_subset(subtract(s.skeleton, s.boundary), d.u));
    // region count through the oracle
    Raster free = subtract(d.u, s.skeleton);
    CHECK(oracle::component_count(free, false) == count);

    const int root = s.puncture_region[0];
    Raster root_region = cells_raster(6, s.regions[root].cells);
    for (int c = 0; c + 1 < count; ++c) {
      // dropping a circle fuses its puncture's region with exactly one other
      auto without_circle = regions_without(d.u, s, c, -1);
      CHECK(without_circle.size() == s.regions.size() - 1);
      // dropping an arc leaves the circle floating in the root region
      auto without_arc = regions_without(d.u, s, -1, c);
      REQUIRE(without_arc.size() == s.regions.size());
      int r = region_of(without_arc, d.punctures[0]);
      REQUIRE(r >= 0);
      CHECK(holes(cells_raster(6, without_arc[r].cells)) == holes(root_region) + 1);
    }
  }
  CHECK(cases == 120);
}

TEST_CASE("domain holding infinity: arcs may end on the square's frame") {
  Raster u(5, true);
  u.fill(true);
  auto s = build_spine(u, {{8, 16}, {24, 16}}, true);
  CHECK(s.boundary.count() == 0);
  CHECK(s.arcs.size() == 2);
  CHECK(s.regions.size() == 3);
  CHECK(s.bijective());
  CHECK(!find_2x2_block(s.skeleton));
}

TEST_CASE("union check") {
  SUBCASE("no spines and a carpet bad set pass") {
    auto scene = builtin_scene(SceneName::Sierpinski, 2, 8);
    auto rep = spine_union_dimension_check(scene.bad_at(8), {}, {});
    CHECK(rep.passed);
    CHECK(!rep.block);
  }
  SUBCASE("a filled block planted in a spine is caught") {
    Raster u = square_domain(5, 4, 4, 28, 28);
    auto s = build_spine(u, {{10, 16}, {20, 16}});
    // the spine alone, against an empty bad set
    auto clean = spine_union_dimension_check(Raster(5), {s}, {u});
    CHECK(clean.passed);
    s.skeleton.set(12, 12);
    s.skeleton.set(13, 12);
    s.skeleton.set(12, 13);
    s.skeleton.set(13, 13);
    auto rep = spine_union_dimension_check(Raster(5), {s}, {u});
    CHECK(!rep.passed);
    REQUIRE(rep.block);
    CHECK(*rep.block == Cell{12, 12});
    CHECK(rep.witness.find("12,12") != std::string::npos);
  }
  SUBCASE("frames shared by neighbouring domains sit on cell edges") {
    Raster a = square_domain(5, 0, 0, 16, 32), b = square_domain(5, 16, 0, 32, 32);
    auto sa = build_spine(a, {{8, 16}}), sb = build_spine(b, {{24, 16}});
    // each frame is the other domain's first column: both count as edges
    auto rep = spine_union_dimension_check(Raster(5), {sa, sb}, {a, b});
    CHECK(rep.passed);
    // without the domains as open sets the two frames fill 2x2 blocks
    auto raw = spine_union_dimension_check(Raster(5), {sa, sb}, {});
    CHECK(!raw.passed);
  }
}
