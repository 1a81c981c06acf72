#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "planar_homotopy/dyadic.hpp"
#include "planar_homotopy/raster.hpp"
#include "planar_homotopy/scenes.hpp"
#include "planar_homotopy/sequences.hpp"

namespace ph {

// Stages are numbered from 0. Stage 0 may produce domains as large as the
// sphere; stage i >= 1 domains have diameter <= 1/i. Default mesh 2^-(i+1).
//
// Cells are partitioned into grid blocks ("constituent squares"); grid edges
// run between cells, so arcs inside a block meet the 1-skeleton only at their
// attaching point. Open sets are 4-connected.

struct GridStage {
  int stage = 0;
  int resolution = 0;
  Dyadic mesh;
  int block = 0;       // cells per square side
  int ox = 0, oy = 0;  // grid lines at x = ox + j*block (cells), same for y
  Raster skeleton;     // cells touching a grid line (for display)
  Raster active;       // U_i; infinity flag = the outer element is still free
  int squares() const;  // constituent squares meeting the unit square
  int block_x(int x) const;
  int block_y(int y) const;
};

// mesh must be dyadic, <= 1/stage for stage >= 1, and >= 4 cells. active
// empty means complement of bad at the scene's finest resolution.
GridStage impose_grid(const Scene& scene, int stage, Dyadic mesh, const std::optional<Raster>& active = std::nullopt,
                      int resolution = -1);

struct ElementInfo {
  bool infinity = false;      // the outer element S^2 \ int(S)
  std::vector<int> punctures;  // scene puncture indices inside
  double diameter = 0.0;
};

struct Contact {           // a maximal run of shared grid edge
  int a = 0, b = 0;         // element labels
  int length = 0;           // cell pairs
  Cell mid_a, mid_b;        // cells on either side at the run's midpoint
};

struct Classification {
  ComponentFamily c0;                        // finite elements; label == index
  int infinity_element = -1;                 // index of the outer element, or -1
  std::vector<ElementInfo> info;             // per element (outer element last)
  std::vector<Contact> contacts;             // all shared-edge runs
  std::vector<std::vector<int>> k_members;   // components of the union of unpunctured elements
  std::vector<std::vector<Cell>> k_cells;
  std::vector<double> k_diameters;
  std::string claim_iv_witness;              // nonempty when some K has no punctured neighbour
};

Classification classify_components(const GridStage& grid, const Scene& scene);

struct ForestArc {
  int k = 0;                 // the K this arc serves
  int element = 0;           // L(K)
  Contact attach;            // A(K); q(K) = attach.mid_b
  std::vector<Cell> cells;   // from q toward its end; empty for the outer element
  int ends_on_arc = -1;      // earlier arc it terminates on, or -1 (ends on a puncture)
  double diameter = 0.0;
};

struct ForestTree {
  int puncture = -1;           // scene puncture index
  int element = 0;
  std::vector<int> arcs;
  std::vector<Cell> cells;     // arcs plus the puncture cell
  std::vector<Cell> core;      // thickened, includes cells
  bool infinity = false;
  bool forced = false;         // singleton added for claim (x)
  double diameter = 0.0;
};

struct AttachmentForest {
  std::vector<ForestArc> arcs;
  std::vector<ForestTree> trees;
  std::vector<int> tree_of_arc;
  std::vector<double> tail_max_diameter;  // claim (vi): max component diameter of arcs k.. end
};

AttachmentForest grow_forest(const GridStage& grid, const Scene& scene, const Classification& cls,
                             const std::vector<int>& forced_punctures = {});

struct Domain {
  int stage = 0;
  std::vector<int> punctures;  // scene indices
  Raster cells;                 // infinity flag set for the outer domain
  int k_parts = 0, m_parts = 0;
  double diameter = 0.0;        // over finite cells
};

struct TilerClaim {
  std::string claim;  // "iii" ... "xi"
  bool passed = false;
  std::string detail;
};

struct StageRecord {
  GridStage grid;
  int elements = 0, unpunctured = 0, k_count = 0, arcs = 0, trees = 0, m_count = 0, domains = 0;
  std::vector<double> m_diameters;
  std::vector<TilerClaim> claims;
  double coverage = 0.0;
  double max_diameter = 0.0;
};

struct PeanoTiling {
  std::string scene_id;
  int resolution = 0;
  std::vector<Domain> domains;
  Raster residual;
  std::vector<StageRecord> stages;
  std::vector<TilerClaim> claims;  // run-level: x, xi, disjointness
  bool passed() const;
};

struct StageResult {
  std::vector<Domain> domains;
  Raster residual;
  std::vector<std::vector<Cell>> m_cells;
  std::vector<double> m_diameters;
};

// Steps 4-6 for one stage (no claim checks beyond construction invariants).
StageResult assemble_domains(const GridStage& grid, const Scene& scene, const AttachmentForest& forest, const Classification& cls);

// Runs `stages` stages at the scene's finest resolution, with a shadow run at
// the next-coarser ladder rung feeding the null-sequence claims. Refuses
// scenes whose verdict is not at-most-1.
PeanoTiling run_stages(const Scene& scene, int stages);

std::string format_claims(const PeanoTiling& t);

// tiling file: "PH-TILING k=<k> stages=<n> domains=<m>", then per domain
// "domain stage=<i> punctures=<list>" and a PH-RASTER block
void write_tiling(std::ostream& os, const PeanoTiling& t);
PeanoTiling read_tiling(std::istream& is);
std::string svg_string(const PeanoTiling& t, const Scene& scene);

}  // namespace ph
