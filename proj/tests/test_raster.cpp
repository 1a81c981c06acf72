#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "planar_homotopy/raster.hpp"

using namespace ph;

namespace {

// labels agree with the oracle up to renaming
bool same_partition(const ComponentFamily& fam, const std::vector<int>& ref) {
  std::vector<int> fwd(ref.size() + 1, -1), back(ref.size() + 1, -1);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    int a = fam.label_of[i], b = ref[i];
    if ((a < 0) != (b < 0)) return false;
    if (a < 0) continue;
    if (fwd[a] == -1) fwd[a] = b;
    if (back[b] == -1) back[b] = a;
    if (fwd[a] != b || back[b] != a) return false;
  }
  return true;
}

Raster carpet_complement(int k, int depth) {
  Raster r(k);
  for (int y = 0; y < r.side(); ++y)
    for (int x = 0; x < r.side(); ++x) r.set(x, y, oracle::carpet_hole_cell(x, y, k, depth));
  return r;
}

}  // namespace

TEST_CASE("labeling of tiny fixtures") {
  auto full = raster_from_rows({"11", "11"});
  CHECK(label_components(full, Adjacency::Four).members.size() == 1);

  auto checker = raster_from_rows({"10", "01"});
  CHECK(label_components(checker, Adjacency::Four).members.size() == 2);
  CHECK(label_components(checker, Adjacency::Eight).members.size() == 1);

  CHECK(label_components(Raster(3), Adjacency::Four).members.empty());
}

TEST_CASE("carpet depth 2 at k=5 has 9 hole components") {
  auto holes = carpet_complement(5, 2);
  auto fam = label_components(holes, Adjacency::Four);
  CHECK(oracle::component_count(holes, false) == 9);
  CHECK(fam.members.size() == 9);
  CHECK(same_partition(fam, oracle::components(holes, false)));
}

TEST_CASE("labels are dense and ordered by first row-major hit") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    auto r = oracle::random_raster(rng, 5, 0.45);
    auto fam = label_components(r, Adjacency::Four);
    int expect = 0;
    for (std::size_t i = 0; i + 1 < fam.label_of.size(); ++i) {
      int l = fam.label_of[i];
      if (l < 0) continue;
      CHECK(l <= expect);
      if (l == expect) ++expect;
    }
    CHECK(expect == int(fam.members.size()));
  }
}

TEST_CASE("infinity joins every border cell") {
  auto r = raster_from_rows({"1001", "0000", "0000", "1001"}, true);
  auto fam = label_components(r, Adjacency::Four);
  REQUIRE(fam.members.size() == 1);
  CHECK(fam.members[0].has_infinity);
  CHECK(fam.infinity_label() == 0);
  CHECK(same_partition(fam, oracle::components(r, false)));

  Raster only_inf(2, true);
  auto f2 = label_components(only_inf);
  REQUIRE(f2.members.size() == 1);
  CHECK(f2.members[0].cells.empty());
  CHECK(diameter(f2.members[0], 2) == 0.0);
}

TEST_CASE("random rasters match the union-find oracle") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    int k = 1 + int(rng() % 6);
    auto r = oracle::random_raster(rng, k, 0.3 + 0.4 * double(rng() % 100) / 100.0);
    r.set_includes_infinity(rng() % 2);
    for (bool eight : {false, true}) {
      auto fam = label_components(r, eight ? Adjacency::Eight : Adjacency::Four);
      CHECK(same_partition(fam, oracle::components(r, eight)));
    }
    // 8-components never outnumber 4-components
    CHECK(label_components(r, Adjacency::Eight).members.size() <= label_components(r, Adjacency::Four).members.size());
  }
}

TEST_CASE("window labeling agrees with labeling a cropped copy") {
  std::mt19937_64 rng(8);
  auto r = oracle::random_raster(rng, 6, 0.55);
  IndexRect w{8, 16, 40, 48};
  Raster crop(6);
  for (int y = w.y0; y < w.y1; ++y)
    for (int x = w.x0; x < w.x1; ++x) crop.set(x, y, r.test(x, y));
  auto a = label_window(r, Adjacency::Four, w);
  auto b = label_components(crop, Adjacency::Four).members;
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].cells == b[i].cells);
    CHECK(a[i].diameter == doctest::Approx(b[i].diameter));
  }
}

TEST_CASE("diameter") {
  Cell one[] = {{3, 3}};
  CHECK(diameter(one, 4) == 0.0);
  Cell corners[] = {{0, 0}, {1, 1}};
  CHECK(diameter(corners, 1) == doctest::Approx(std::sqrt(2.0) / 2));
  CHECK_THROWS_WITH(diameter(std::span<const Cell>{}, 3), "empty set has no diameter");

  // central hole of the depth-1 carpet at k=4
  auto holes = carpet_complement(4, 1);
  auto fam = label_components(holes);
  REQUIRE(fam.members.size() == 1);
  double d = fam.members[0].diameter;
  CHECK(d == doctest::Approx(oracle::diameter(fam.members[0].cells, 4)));
  CHECK(std::abs(d - std::sqrt(2.0) / 3) <= 1.0 / 16);
}

TEST_CASE("hull calipers agree with brute force") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 60; ++t) {
    int n = 3 + int(rng() % 3000);
    if (t == 0) n = 10000;
    std::vector<Cell> pts;
    int spread = 4 + int(rng() % 500);
    for (int i = 0; i < n; ++i) pts.push_back({int(rng() % spread), int(rng() % spread)});
    CHECK(diameter2_cells_hull(pts) == diameter2_cells_bruteforce(pts));
  }
  // degenerate: collinear
  std::vector<Cell> line;
  for (int i = 0; i < 50; ++i) line.push_back({i, 2 * i});
  CHECK(diameter2_cells_hull(line) == diameter2_cells_bruteforce(line));
}

TEST_CASE("bridging two components never shrinks the diameter") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    Raster r(5);
    int y = int(rng() % 32);
    int a0 = int(rng() % 10), a1 = a0 + 1 + int(rng() % 5);
    int b1 = 31 - int(rng() % 10), b0 = b1 - 1 - int(rng() % 5);
    for (int x = a0; x <= a1; ++x) r.set(x, y);
    for (int x = b0; x <= b1; ++x) r.set(x, y);
    auto before = label_components(r);
    REQUIRE(before.members.size() == 2);
    for (int x = a1; x <= b0; ++x) r.set(x, y);
    auto after = label_components(r);
    REQUIRE(after.members.size() == 1);
    CHECK(after.members[0].diameter >= std::max(before.members[0].diameter, before.members[1].diameter));
  }
}

TEST_CASE("probe disks") {
  CHECK(probe_disks(0, 0).size() == 1);
  CHECK(probe_disks(0, 1).size() == 5);
  CHECK(probe_disks(0, 3).size() == 85);
  auto p = probe_disks(1, 1);
  CHECK(p[1] == DyadicSquare{1, 1, 0});
  CHECK(p[2].at(3) == IndexRect{0, 4, 4, 8});
  CHECK_THROWS(probe_disks(2, 1));
}

TEST_CASE("hausdorff distance") {
  std::mt19937_64 rng(17);
  auto a = oracle::random_raster(rng, 4, 0.2);
  CHECK(hausdorff_distance(a, a) == 0.0);

  Raster p(4), q(4);
  p.set(1, 2);
  q.set(9, 8);
  CHECK(hausdorff_distance(p, q) == doctest::Approx(std::hypot(8.0, 6.0) / 16));

  // concentric filled squares of side 1 and 1/2 at k=4: the far corner cell
  // sits 4 cells diagonally from the inner square, so the value is 4*sqrt(2)/16
  Raster outer(4), inner(4);
  outer.fill(true);
  for (int y = 4; y < 12; ++y)
    for (int x = 4; x < 12; ++x) inner.set(x, y);
  CHECK(hausdorff_distance(outer, inner) == doctest::Approx(oracle::hausdorff(outer, inner)));
  CHECK(hausdorff_distance(outer, inner) == doctest::Approx(0.35355339).epsilon(1e-6));

  CHECK_THROWS_WITH(hausdorff_distance(Raster(4), a), "Hausdorff undefined on empty set");

  for (int t = 0; t < 40; ++t) {
    int k = 2 + int(rng() % 4);
    auto x = oracle::random_raster(rng, k, 0.1), y = oracle::random_raster(rng, k, 0.1), z = oracle::random_raster(rng, k, 0.1);
    x.set(0, 0);
    y.set(1, 1);
    z.set(2, 0);
    double xy = hausdorff_distance(x, y), yz = hausdorff_distance(y, z), xz = hausdorff_distance(x, z);
    CHECK(xy == doctest::Approx(oracle::hausdorff(x, y)));
    CHECK(xz <= xy + yz + 1e-12);
    CHECK(xy == hausdorff_distance(y, x));
  }
}

TEST_CASE("raster text round trip is bit exact") {
  std::mt19937_64 rng(2);
  for (int k : {0, 1, 3, 6}) {
    auto r = oracle::random_raster(rng, k, 0.5);
    r.set_includes_infinity(k % 2);
    auto s = to_string(r);
    CHECK(raster_from_string(s) == r);
    CHECK(to_string(raster_from_string(s)) == s);
  }
  CHECK_THROWS(raster_from_string("PH-RASTER k=1 inf=0\n01\n0\n"));
  CHECK_THROWS(raster_from_string("PH-RASTER k=1 inf=2\n01\n00\n"));
  CHECK_THROWS(raster_from_string("PH-RASTER k=1 inf=0\n01\n0x\n"));
}

TEST_CASE("coarsening and refinement") {
  auto r = raster_from_rows({"1000", "0000", "0011", "0011"});
  auto any = coarsen_any(r), all = coarsen_all(r);
  CHECK(any == raster_from_rows({"10", "01"}));
  CHECK(all == raster_from_rows({"00", "01"}));
  CHECK(coarsen_any(refine(any)) == any);
  CHECK(find_2x2_block(r) == Cell{2, 2});
  CHECK_FALSE(find_2x2_block(raster_from_rows({"10", "01"})).has_value());
}
