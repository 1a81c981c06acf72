#pragma once

#include <optional>
#include <string>
#include <vector>

#include "planar_homotopy/raster.hpp"
#include "planar_homotopy/scenes.hpp"
#include "planar_homotopy/tiler.hpp"

namespace ph {

// A 1-dimensional spine of a punctured domain u (cells of u are the open set).
// boundary: cells outside u that are 8-adjacent to u (plus nothing for the
// point at infinity). Every puncture but the root gets a 1-cell square circle
// around it and a shortest arc from the circle out to the boundary.
struct Spine {
  Raster skeleton;
  Raster boundary;
  std::vector<std::vector<Cell>> circles;  // per non-root puncture
  std::vector<std::vector<Cell>> arcs;
  std::vector<Component> regions;          // 4-components of u minus skeleton
  std::vector<int> region_puncture;        // puncture index per region, -1 none
  std::vector<int> puncture_region;        // region per puncture
  bool bijective() const;
};

// punctures[0] is the root unless root_at_infinity. Non-root punctures need
// >= 2 free cells to the boundary and Chebyshev distance >= 4 between each
// other and the root.
Spine build_spine(const Raster& u, const std::vector<Cell>& punctures, bool root_at_infinity = false);

struct SpineUnionReport {
  bool passed = true;
  std::optional<Cell> block;  // top-left of an offending 2x2 block
  int spines = 0;
  std::string witness;
};

std::vector<Spine> tiling_spines(const PeanoTiling& tiling, const Scene& scene);

// bad set plus every spine, where boundaries shared between domains (or with
// the unfinished residual) run along cell edges and contribute no cells
SpineUnionReport spine_union_dimension_check(const PeanoTiling& tiling, const Scene& scene);
SpineUnionReport spine_union_dimension_check(const Raster& bad, const std::vector<Spine>& spines, const std::vector<Raster>& domains);

// the skeleton minus one circle / arc, with its regions recomputed
std::vector<Component> regions_without(const Raster& u, const Spine& s, int circle, int arc);

}  // namespace ph
