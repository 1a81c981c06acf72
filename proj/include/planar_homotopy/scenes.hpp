#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "planar_homotopy/dyadic.hpp"
#include "planar_homotopy/raster.hpp"

namespace ph {

struct Puncture {
  bool infinity = false;
  DyadicPoint point;  // ignored for infinity
  int depth = 0;      // infinity has depth 0
};

// A desk-scale stand-in for X = S^2 \ D(X): the bad set rasterised at every
// ladder resolution plus a finite truncation of D(X).
struct Scene {
  std::string id;
  std::vector<int> ladder;          // increasing exponents
  std::vector<Raster> bad;          // bad[i] lives at ladder[i]
  std::vector<Puncture> punctures;  // punctures[0] is infinity when present
  int thin_from = 0;                // bad rasters at k >= thin_from have no 2x2 block

  int finest() const { return ladder.back(); }
  int coarsest() const { return ladder.front(); }
  bool has_resolution(int k) const;
  const Raster& bad_at(int k) const;
  int max_depth() const;
  bool has_infinity() const { return !punctures.empty() && punctures.front().infinity; }
};

// cell containing a finite puncture at resolution k
Cell puncture_cell(const Puncture& p, int k);

enum class SceneName { Sierpinski, SierpinskiFilledHole, EarringCircle, CombTwoSided, CombOneSided, FinitePunctures };

std::optional<SceneName> parse_scene_name(std::string_view s);
std::string to_string(SceneName n);

// Bounds: 1 <= depth <= 6, 3 <= k <= 12; some depths need larger k (error
// "resolution too coarse for depth").
Scene builtin_scene(SceneName name, int depth, int k);
Scene builtin_scene(std::string_view name, int depth, int k);

struct SceneCheck {
  std::string name;
  bool passed = true;
  std::string witness;
};

struct SceneVerdictRecord {
  std::string scene_id;
  std::vector<SceneCheck> checks;
  bool passed() const;
  const SceneCheck* find(std::string_view name) const;
};

SceneVerdictRecord validate_scene(const Scene& scene);

// M = S^2 minus open 3x3 squares about every puncture (infinity's disk is the
// outside of the unit square, so M never contains the infinity cell).
Raster peano_continuum_from_scene(const Scene& scene, int k);

// The depth-d carpet approximant as a closed set: cells whose centre is not
// inside any removed square of depth <= d.
Raster sierpinski_carpet(int depth, int k);

std::string svg_string(const Scene& scene);
std::string svg_string(const Raster& raster);
void render_svg(const Scene& scene, const std::string& path);
void render_svg(const Raster& raster, const std::string& path);

void write_scene(std::ostream& os, const Scene& scene);
Scene read_scene(std::istream& is);
Scene load_scene(const std::string& path);
void save_scene(const Scene& scene, const std::string& path);

}  // namespace ph
