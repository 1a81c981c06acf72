#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "planar_homotopy/dyadic.hpp"
#include "planar_homotopy/raster.hpp"

namespace ph {

struct SetSequence {
  std::vector<Raster> items;  // common resolution, nonempty
  std::string provenance;
};

// Finite-tail surrogates of lim inf / lim sup. A cell of the tail's support is
// in lim-inf when its 3x3 neighbourhood meets every tail item, and in lim-sup
// when it meets at least ceil(half) of them.
std::pair<Raster, Raster> lim_inf_lim_sup(const SetSequence& seq, std::size_t tail);

// Per-basis filtering then diagonalisation: for each basis rectangle keep the
// items missing it if there are any, otherwise keep everything. Returns the
// surviving indices (increasing).
std::vector<std::size_t> diagonal_subsequence(const SetSequence& seq, const std::vector<IndexRect>& basis);

struct ClaimCheck {
  std::string claim;
  bool applicable = false;  // hypothesis held
  bool holds = true;
  std::string witness;
};

struct LimitReport {
  std::vector<ClaimCheck> checks;
  bool passed() const;
};

LimitReport limit_properties(const SetSequence& seq, const Raster& limit, double eps);

enum class NullKind { NullConsistent, NotNull, Inconclusive };
std::string to_string(NullKind k);

struct NullVerdict {
  std::vector<Dyadic> schedule;
  std::vector<std::vector<int>> counts;  // counts[e][s]: members >= schedule[e] at scale s
  NullKind verdict = NullKind::Inconclusive;
  std::optional<int> witness;            // member index at the finest scale
  std::optional<Dyadic> witness_eps;
};

struct NullOptions {
  // measurement slack (absolute units) when comparing scale s-1 with scale s,
  // stored at [s-1]; a single entry applies to every pair, none means exact
  std::vector<double> slack;
  // diameters of finest-scale members that the next coarser scale cannot
  // represent at all (they sit inside its excluded cells); when the plain
  // comparison fails and nothing grows, it is retried without them
  std::vector<double> fine_unresolved;
};

// families[s] holds the member diameters at scale s, coarsest first.
// Null-consistent: for every eps, the finest count lies between the coarser
// counts at eps+slack and eps-slack (equality when slack is 0). Not-null: at
// some eps every scale has more members >= eps than the previous scale has
// members >= eps-slack.
NullVerdict null_sequence_verdict(const std::vector<std::vector<double>>& families, const std::vector<Dyadic>& schedule,
                                  const NullOptions& options);
NullVerdict null_sequence_verdict(const std::vector<std::vector<double>>& families, const std::vector<Dyadic>& schedule,
                                  double tolerance = 0.0);

std::vector<Dyadic> default_schedule(int k);
void validate_schedule(const std::vector<Dyadic>& schedule);

std::string serialize(const NullVerdict& v);

}  // namespace ph
