#pragma once

#include <optional>
#include <string>
#include <vector>

#include "planar_homotopy/raster.hpp"
#include "planar_homotopy/scenes.hpp"
#include "planar_homotopy/sequences.hpp"

namespace ph {

enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Verdict v);

struct Witness {
  std::string what;
  int resolution = 0;
  std::vector<Cell> cells;
  double diameter = 0.0;
  std::optional<DyadicSquare> probe;
};

// null verdict of one probe square across the ladder
struct ProbeResult {
  DyadicSquare probe;
  std::vector<std::vector<double>> diameters;  // per ladder rung
  NullVerdict null;
};

struct ConditionReport {
  int condition = 0;
  Verdict verdict = Verdict::Inconclusive;
  int resolution = 0;  // condition 1: the resolution examined
  int components = 0;  // condition 1: complement components
  std::vector<ProbeResult> probes;  // condition 2
  std::vector<Witness> witnesses;
};

enum class DimKind { AtMostOne, EqualsTwo, Inconclusive };
std::string to_string(DimKind d);

struct DimensionVerdict {
  std::string scene_id;
  ConditionReport cond1, cond2;
  DimKind verdict = DimKind::Inconclusive;
};

// depth < 0 means the scene's maximal depth
ConditionReport condition1(const Scene& scene, int k, int depth = -1);

// Probe squares run from the unit square down to level coarsest-2; an empty
// schedule means default_schedule(finest).
ConditionReport condition2(const Scene& scene, const std::vector<Dyadic>& schedule = {}, int depth = -1);

DimensionVerdict homotopy_dimension_verdict(const Scene& scene, const std::vector<Dyadic>& schedule = {});

// One line per probe, the condition-1 summary, then VERDICT=.
std::string format_report(const DimensionVerdict& v);
std::string format_report(const ConditionReport& r);

struct CriterionReport {
  std::string criterion;  // "1" (complement pieces) or "1'" (intersection pieces)
  Verdict verdict = Verdict::Inconclusive;
  std::vector<ProbeResult> probes;
  std::vector<Witness> witnesses;
};

struct PeanoReport {
  std::vector<CriterionReport> criteria;
  Verdict verdict() const;  // fail if any fails, pass if all pass
};

// m: the same continuum at increasing resolutions (>= 2 rungs)
PeanoReport peano_continuum_check(const std::vector<Raster>& m, const std::vector<Dyadic>& schedule = {});

// u: open set approximations at increasing resolutions; components use 4-adjacency
PeanoReport peano_domain_check(const std::vector<Raster>& u, const std::vector<Dyadic>& schedule = {});

std::string format_report(const PeanoReport& r);

}  // namespace ph
