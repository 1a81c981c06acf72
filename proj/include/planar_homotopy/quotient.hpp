#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "planar_homotopy/raster.hpp"

namespace ph {

// --- vertical decomposition ----------------------------------------------------

struct Run {
  int x = 0, y0 = 0, y1 = 0;  // rows y0..y1 inclusive
  friend bool operator==(const Run&, const Run&) = default;
};

struct RunGraph {
  int resolution = 0;
  std::vector<Run> runs;                    // column-major, top run first
  std::vector<std::pair<int, int>> edges;   // (a < b), sorted
  std::vector<int> node_of;                 // cell index -> run, -1 outside M
  std::vector<std::vector<int>> adjacency;  // sorted neighbour lists

  int node_at(Cell c) const { return node_of[static_cast<std::size_t>(c.y) * (std::size_t{1} << resolution) + c.x]; }
  int edge_index(int a, int b) const;  // -1 if absent
};

RunGraph build_run_graph(const Raster& m);

// longest vertical run of boundary cells (cells of m with a 4-neighbour outside
// m or off the square), in cells
int max_vertical_boundary_run(const Raster& m);

// Returns m unchanged when its boundary already has no vertical run of length
// >= eps; otherwise refines by 4 and shears alternate bands of rows by one
// sub-cell. Throws "epsilon below resolution" for eps < 2 cell widths.
Raster deverticalize(const Raster& m, double eps);

struct UscReport {
  bool passed = true;
  int pairs_checked = 0;
  std::string witness;
};

// m: increasing resolutions; throws "malformed ladder" unless every rung is
// the 2x2-OR coarsening of the next
UscReport usc_probe(const std::vector<Raster>& m);

// --- loop words ------------------------------------------------------------------

// letters are +-(g+1) for generator g
struct LoopWord {
  std::vector<int> letters;
  Cell base;
  bool empty() const { return letters.empty(); }
  friend bool operator==(const LoopWord& a, const LoopWord& b) { return a.letters == b.letters; }
};

std::vector<int> reduce_word(const std::vector<int>& letters);
std::vector<int> inverse_word(const std::vector<int>& letters);
std::string word_string(const std::vector<int>& letters);  // "a b a^-1", "1" when empty

using Loop = std::vector<Cell>;

// closes the loop implicitly when the last cell is 4-adjacent to the first;
// throws if a step is not a 4-step or leaves m
void check_loop(const Raster& m, const Loop& loop);
Loop parse_loop(const std::string& line);  // "x,y;x,y;..."
std::string format_loop(const Loop& loop);

// One cut per bounded complement hole (8-adjacency): pairwise disjoint paths
// of grid-line segments through corners where four M cells meet, running from
// the hole to the outside. Crossing a cut from its right to its left (facing
// away from the hole, on screen) is the positive letter, so a counterclockwise
// loop around hole a reads "a". Cuts come from a unit-capacity max flow.
struct CutSystem {
  int resolution = 0;
  std::vector<int> hole_of;                       // cell index -> hole id, -1 otherwise
  std::vector<std::vector<std::size_t>> paths;    // per hole: crossed primal edge ids, hole first
  std::vector<int> edge_letter;                   // primal edge id -> letter for the +x/+y step, 0 if uncut
  int holes() const { return static_cast<int>(paths.size()); }
};

// primal edges: 2*index(x,y) joins (x,y)-(x+1,y), 2*index(x,y)+1 joins (x,y)-(x,y+1)
std::size_t primal_edge(const Raster& m, Cell a, Cell b);

CutSystem canonical_cuts(const Raster& m);
CutSystem random_cuts(const Raster& m, std::mt19937_64& rng);

// Leftward crossing of a ray (counterclockwise around its hole on screen) is
// the positive letter.
LoopWord loop_word_in_M(const Raster& m, const Loop& loop, const CutSystem& cuts);
LoopWord loop_word_in_M(const Raster& m, const Loop& loop);

// node path through the run graph, repeats collapsed, closed
std::vector<int> project_loop(const RunGraph& g, const Loop& loop);
// word over the non-tree edges of a canonical BFS spanning forest
LoopWord project_loop_and_word(const RunGraph& g, const Loop& loop);

struct InjectivityRecord {
  LoopWord word_m, word_quotient;
  bool consistent = true;  // emptiness agrees
};

InjectivityRecord injectivity_probe(const Raster& m, const Loop& loop);
InjectivityRecord injectivity_probe(const Raster& m, const RunGraph& g, const CutSystem& cuts, const Loop& loop);

// random closed 4-path in m: a walk of `steps` moves from a random cell of m,
// closed by a shortest path back
Loop random_loop(const Raster& m, std::mt19937_64& rng, int steps);
Loop random_loop(const Raster& m, std::mt19937_64& rng, int steps, Cell start);
Loop concatenate(const Loop& a, const Loop& b);  // common base cell required

// --- ideal triangulations ------------------------------------------------------------

// A point of the unit circle given by its stereographic parameter p/q
// (q = 0 is the point (-1, 0)): ((q^2-p^2), 2pq) / (q^2+p^2). Circle order is
// the order of p/q with q = 0 last.
struct CirclePoint {
  std::int64_t p = 0, q = 1;
};
CirclePoint parse_circle_point(const std::string& s);  // "p/q" or "p"

struct IdealTriangulation {
  std::vector<CirclePoint> points;          // insertion order
  std::vector<std::array<int, 3>> triangles;  // indices into points
};

IdealTriangulation ideal_triangulation(const std::vector<CirclePoint>& h);

struct TriangulationCheck {
  bool count_ok = false, disjoint = false, covers = false, prefix_extendable = false;
  bool ok() const { return count_ok && disjoint && covers && prefix_extendable; }
  std::string witness;
};
TriangulationCheck verify_triangulation(const IdealTriangulation& t);

// --- filling nullhomotopic loops ------------------------------------------------------

// A loop of m letters drawn on the circle: letter i occupies the arc between
// marked positions 4i and 4i+4 (of 4m). Elements are vertex classes (vertices
// 4i with equal reduced prefix) and bands (a letter and the later letter that
// cancels it; every chord joins 4i+s to 4j+4-s).
struct Band {
  int i = 0, j = 0;  // letter indices, i < j
};

struct Lamination {
  int letters = 0;
  std::vector<std::vector<int>> vertex_classes;  // letter-boundary indices 0..m-1
  std::vector<Band> bands;
  bool constant = false, noncrossing = false;
  double filling = 0.0;  // covered fraction of sampled disk cells
  int samples = 0;
  std::string witness;
};

// word: the loop's letters over directed edges; must reduce to the identity
Lamination cancellation_lamination(const std::vector<int>& word, int grid = 64);

struct DiskMapRecord {
  std::vector<Cell> vertex_image;                  // per letter boundary
  std::vector<std::array<int, 3>> triangles;       // over letter boundaries
  std::vector<std::pair<int, int>> intervals;      // two-point classes
  std::vector<Band> bands;
  double max_triangle_image = 0.0;
  double bound = 0.0;
  bool continuity_ok = true;
};

// the letters of a loop in M' are its horizontal steps between runs
std::vector<int> run_graph_letters(const RunGraph& g, const Loop& loop, std::vector<Cell>* vertex_cells = nullptr);

DiskMapRecord extend_filling(const Raster& m, const Loop& loop, const Lamination& lam, double bound = 0.5);

}  // namespace ph
