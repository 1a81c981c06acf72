#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ph {

// Bit-grids over the unit square at resolution k (cell side 2^-k), plus one
// abstract "infinity" cell adjacent to every cell on the square's border.
// Row 0 is the top row. Everything here is integer geometry; lengths are
// reported in absolute units (unit square = side 1).

constexpr int kMaxResolution = 14;

struct Cell {
  int x = 0;  // column
  int y = 0;  // row, 0 = top
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

// half-open [x0,x1) x [y0,y1)
struct IndexRect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  bool empty() const { return x1 <= x0 || y1 <= y0; }
  bool contains(Cell c) const { return c.x >= x0 && c.x < x1 && c.y >= y0 && c.y < y1; }
  friend bool operator==(const IndexRect&, const IndexRect&) = default;
};

// The square [x/2^level, (x+1)/2^level] x [y/2^level, (y+1)/2^level].
struct DyadicSquare {
  int level = 0, x = 0, y = 0;
  IndexRect at(int k) const;  // requires k >= level
  friend bool operator==(const DyadicSquare&, const DyadicSquare&) = default;
};

enum class Adjacency { Four = 4, Eight = 8 };

class Raster {
 public:
  Raster() : Raster(0) {}
  explicit Raster(int k, bool includes_infinity = false);

  int resolution() const { return k_; }
  int side() const { return side_; }
  double cell_width() const;
  std::size_t cell_count() const { return bits_.size(); }

  bool includes_infinity() const { return inf_; }
  void set_includes_infinity(bool v) { inf_ = v; }

  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < side_ && y < side_; }
  bool test(int x, int y) const { return bits_[index(x, y)] != 0; }
  bool test(Cell c) const { return test(c.x, c.y); }
  // out-of-bounds reads as empty
  bool get(int x, int y) const { return in_bounds(x, y) && test(x, y); }
  void set(int x, int y, bool v = true) { bits_[index(x, y)] = v ? 1 : 0; }
  void set(Cell c, bool v = true) { set(c.x, c.y, v); }

  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * side_ + x; }
  Cell cell(std::size_t i) const { return {static_cast<int>(i % side_), static_cast<int>(i / side_)}; }

  std::size_t count() const;  // finite occupied cells
  bool empty() const { return !inf_ && count() == 0; }
  void fill(bool v);

  const std::vector<std::uint8_t>& bits() const { return bits_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int k_ = 0;
  int side_ = 1;
  bool inf_ = false;
  std::vector<std::uint8_t> bits_;
};

// --- set algebra -----------------------------------------------------------

Raster complement(const Raster& r);  // flips finite cells and the infinity flag
Raster unite(const Raster& a, const Raster& b);
Raster intersect(const Raster& a, const Raster& b);
Raster subtract(const Raster& a, const Raster& b);
bool intersects(const Raster& a, const Raster& b);
bool is_subset(const Raster& a, const Raster& b);

Raster coarsen_any(const Raster& r);  // parent set iff some child set
Raster coarsen_all(const Raster& r);  // parent set iff all children set
Raster refine(const Raster& r);       // every child copies its parent
Raster refine_to(const Raster& r, int k);

Raster dilate(const Raster& r, Adjacency adj = Adjacency::Eight);
// cells of r with a neighbour (under adj) outside r; border cells count when
// r does not contain infinity
Raster inner_boundary(const Raster& r, Adjacency adj = Adjacency::Four);

// top-left cell of the first fully occupied 2x2 block (row-major), if any
std::optional<Cell> find_2x2_block(const Raster& r);

std::vector<Cell> occupied_cells(const Raster& r);

// --- components ---------------------------------------------------------------

struct Component {
  int label = 0;
  std::vector<Cell> cells;    // finite cells in scan order
  bool has_infinity = false;  // contains the outer cell
  double diameter = 0.0;      // over finite cell centres; 0 for the lone infinity cell
  IndexRect bbox;
  int punctures = 0;
};

struct ComponentFamily {
  int resolution = 0;
  Adjacency adjacency = Adjacency::Four;
  std::vector<Component> members;
  // pairs (a < b) of member labels that share a grid edge; only populated by
  // labelings that cut along a grid (see tiler)
  std::vector<std::pair<int, int>> edge_adjacency;
  // cell index -> label, -1 for unoccupied; the last slot is the infinity cell
  std::vector<int> label_of;

  int label_at(Cell c) const { return label_of[static_cast<std::size_t>(c.y) * side() + c.x]; }
  int infinity_label() const { return label_of.empty() ? -1 : label_of.back(); }
  int side() const { return 1 << resolution; }
};

ComponentFamily label_components(const Raster& raster, Adjacency adjacency = Adjacency::Four);

// Components of raster restricted to a window; no infinity, label_of is empty.
// Cheaper for the thousands of probe squares the characterizer looks at.
std::vector<Component> label_window(const Raster& raster, Adjacency adjacency, const IndexRect& window);

// --- metric --------------------------------------------------------------------

// squared diameter in cell units (integer exact)
std::int64_t diameter2_cells(std::span<const Cell> cells);
std::int64_t diameter2_cells_bruteforce(std::span<const Cell> cells);
std::int64_t diameter2_cells_hull(std::span<const Cell> cells);

double diameter(std::span<const Cell> cells, int k);  // throws on empty
double diameter(const Component& c, int k);

std::vector<DyadicSquare> probe_disks(int k_min, int k_max);

double hausdorff_distance(const Raster& a, const Raster& b);

// --- I/O -----------------------------------------------------------------------

void write_raster(std::ostream& os, const Raster& r);
Raster read_raster(std::istream& is);  // consumes header + 2^k rows
std::string to_string(const Raster& r);
Raster raster_from_string(const std::string& s);

// Convenience for tests and fixtures: rows of '0'/'1' (or '.'/'#').
Raster raster_from_rows(const std::vector<std::string>& rows, bool includes_infinity = false);

}  // namespace ph
