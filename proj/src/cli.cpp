#include "planar_homotopy/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "planar_homotopy/characterize.hpp"
#include "planar_homotopy/quotient.hpp"
#include "planar_homotopy/retractor.hpp"
#include "planar_homotopy/scenes.hpp"
#include "planar_homotopy/tiler.hpp"

namespace ph::cli {

namespace {

// I/O and format problems: exit 3
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void dump(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f << text;
  if (!f) throw IoError("cannot write " + path);
}

Scene scene_from(const std::string& path) {
  std::istringstream is(slurp(path));
  try {
    return read_scene(is);
  } catch (const std::exception& e) {
    throw IoError(path + ": malformed scene: " + e.what());
  }
}

Raster raster_from(const std::string& path) {
  std::istringstream is(slurp(path));
  try {
    return read_raster(is);
  } catch (const std::exception& e) {
    throw IoError(path + ": malformed raster: " + e.what());
  }
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    out.push_back(line.substr(first));
  }
  return out;
}

// report to a file when a path is given, else to out; the verdict line always
// reaches out
void emit(const std::string& report, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << report;
    return;
  }
  dump(path, report);
  auto pos = report.rfind("VERDICT=");
  if (pos != std::string::npos) out << report.substr(pos);
}

std::string drop_verdict_line(const std::string& report) {
  auto pos = report.rfind("VERDICT=");
  return pos == std::string::npos ? report : report.substr(0, pos);
}

struct Options {
  std::uint64_t seed = 1;
  // scene
  std::string name;
  int depth = 2, k = 8;
  // shared paths
  std::string scene, raster, tiling, out, svg, report, m_out;
  // check
  std::string schedule;
  // tile
  int stages = 3;
  // quotient
  std::string loops;
  int random_loops = 0, steps = 40, cut_trials = 0;
  // triangulate
  std::string points;
  int random_points = 0;
};

int cmd_scene(const Options& o, std::ostream& out, std::ostream& err) {
  Scene s;
  try {
    s = builtin_scene(o.name, o.depth, o.k);
  } catch (const std::invalid_argument& e) {
    err << "scene: " << e.what() << '\n';
    return UsageError;
  }
  auto rec = validate_scene(s);
  std::ostringstream os;
  write_scene(os, s);
  if (!o.out.empty()) dump(o.out, os.str());
  if (!o.svg.empty()) dump(o.svg, svg_string(s));
  if (!o.m_out.empty()) {
    std::ostringstream m;
    write_raster(m, peano_continuum_from_scene(s, s.finest()));
    dump(o.m_out, m.str());
  }
  std::ostringstream rep;
  rep << "scene=" << s.id << " ladder=";
  for (std::size_t i = 0; i < s.ladder.size(); ++i) rep << (i ? "," : "") << s.ladder[i];
  rep << " punctures=" << s.punctures.size() << '\n';
  for (auto& c : rec.checks) rep << "check id=" << c.name << " status=" << (c.passed ? "pass" : "fail") << (c.witness.empty() ? "" : " " + c.witness) << '\n';
  rep << "VERDICT=" << (rec.passed() ? "pass" : "fail") << '\n';
  emit(rep.str(), o.report, out);
  return rec.passed() ? Pass : Fail;
}

int cmd_check(const Options& o, std::ostream& out, std::ostream& err) {
  Scene s = scene_from(o.scene);
  std::vector<Dyadic> schedule;
  try {
    if (!o.schedule.empty()) schedule = parse_schedule(o.schedule);
  } catch (const std::exception& e) {
    err << "check: bad schedule: " << e.what() << '\n';
    return UsageError;
  }
  DimensionVerdict v;
  try {
    v = homotopy_dimension_verdict(s, schedule);
  } catch (const std::invalid_argument& e) {
    err << "check: " << e.what() << '\n';
    return UsageError;
  }
  emit(format_report(v), o.report, out);
  switch (v.verdict) {
    case DimKind::AtMostOne: return Pass;
    case DimKind::EqualsTwo: return Fail;
    default: return Inconclusive;
  }
}

int cmd_tile(const Options& o, std::ostream& out, std::ostream& err) {
  Scene s = scene_from(o.scene);
  if (o.stages < 1) {
    err << "tile: --stages must be >= 1\n";
    return UsageError;
  }
  PeanoTiling t;
  try {
    t = run_stages(s, o.stages);
  } catch (const std::runtime_error& e) {
    // refusal or a failed claim is a verdict, not a usage error
    const std::string what = e.what();
    const bool open = what.find("verdict=inconclusive") != std::string::npos;
    emit("tiling scene=" + s.id + " refused " + what + "\nVERDICT=" + (open ? "inconclusive" : "refused") + "\n", o.report, out);
    return open ? Inconclusive : Fail;
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    if (what.find("resolution too coarse") == std::string::npos) {
      err << "tile: " << what << '\n';
      return UsageError;
    }
    emit("tiling scene=" + s.id + " stopped " + what + "\nVERDICT=inconclusive\n", o.report, out);
    return Inconclusive;
  }
  std::vector<Spine> spines;
  SpineUnionReport sur;
  std::string spine_error;
  try {
    spines = tiling_spines(t, s);
    std::vector<Raster> open;
    for (auto& d : t.domains) open.push_back(d.cells);
    if (t.residual.resolution() == t.resolution && t.residual.cell_count() > 1) open.push_back(t.residual);
    sur = spine_union_dimension_check(s.bad_at(t.resolution), spines, open);
  } catch (const std::invalid_argument& e) {
    spine_error = e.what();
    sur.passed = false;
  }
  bool bijective = spine_error.empty();
  for (auto& sp : spines) bijective = bijective && sp.bijective();

  std::ostringstream rep;
  rep << drop_verdict_line(format_claims(t));
  rep << "spines count=" << spines.size() << " bijective=" << (bijective ? 1 : 0) << " union=" << (sur.passed ? "pass" : "fail");
  if (!sur.witness.empty()) rep << ' ' << sur.witness;
  if (!spine_error.empty()) rep << " error=" << spine_error;
  rep << '\n';
  const bool ok = t.passed() && sur.passed && bijective;
  // spines that cannot be drawn at this resolution leave the run open
  const bool open = t.passed() && spine_error.find("resolution too coarse") != std::string::npos;
  rep << "VERDICT=" << (ok ? "pass" : open ? "inconclusive" : "fail") << '\n';

  if (!o.out.empty()) {
    std::ostringstream f;
    write_tiling(f, t);
    for (std::size_t i = 0; i < spines.size(); ++i) {
      f << "spine domain=" << i << '\n';
      write_raster(f, spines[i].skeleton);
    }
    dump(o.out, f.str());
  }
  if (!o.svg.empty()) dump(o.svg, svg_string(t, s));
  emit(rep.str(), o.report, out);
  return ok ? Pass : open ? Inconclusive : Fail;
}

int cmd_quotient(const Options& o, std::ostream& out, std::ostream& err) {
  Raster m = raster_from(o.raster);
  std::vector<Loop> loops;
  if (!o.loops.empty()) {
    for (auto& line : lines_of(slurp(o.loops))) {
      try {
        Loop l = parse_loop(line);
        check_loop(m, l);
        loops.push_back(std::move(l));
      } catch (const std::exception& e) {
        throw IoError(o.loops + ": malformed loop: " + e.what());
      }
    }
  }
  if (o.random_loops < 0 || o.steps < 1 || o.cut_trials < 0) {
    err << "quotient: counts must be non-negative\n";
    return UsageError;
  }
  std::mt19937_64 rng(o.seed);
  if (o.random_loops > 0 && m.count() == 0) {
    err << "quotient: raster is empty\n";
    return UsageError;
  }
  for (int i = 0; i < o.random_loops; ++i) loops.push_back(random_loop(m, rng, o.steps));

  RunGraph g = build_run_graph(m);
  CutSystem cuts = canonical_cuts(m);
  std::vector<CutSystem> trials;
  for (int i = 0; i < o.cut_trials; ++i) trials.push_back(random_cuts(m, rng));

  std::ostringstream rep;
  rep << "quotient k=" << m.resolution() << " cells=" << m.count() << " runs=" << g.runs.size() << " edges=" << g.edges.size()
      << " holes=" << cuts.holes() << " loops=" << loops.size() << " cut_trials=" << trials.size() << " seed=" << o.seed << '\n';
  int consistent = 0;
  for (std::size_t i = 0; i < loops.size(); ++i) {
    auto r = injectivity_probe(m, g, cuts, loops[i]);
    bool stable = true;
    for (auto& c : trials) stable = stable && loop_word_in_M(m, loops[i], c).empty() == r.word_m.empty();
    const bool ok = r.consistent && stable;
    consistent += ok;
    rep << "loop=" << i << " length=" << loops[i].size() << " word_m=" << word_string(r.word_m.letters)
        << " word_quotient=" << word_string(r.word_quotient.letters) << " consistent=" << (ok ? 1 : 0) << '\n';
  }
  rep << "consistent=" << consistent << '/' << loops.size() << '\n';
  rep << "VERDICT=" << (consistent == static_cast<int>(loops.size()) ? "pass" : "fail") << '\n';
  emit(rep.str(), o.report, out);
  return consistent == static_cast<int>(loops.size()) ? Pass : Fail;
}

int cmd_triangulate(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<CirclePoint> pts;
  if (!o.points.empty()) {
    for (auto& line : lines_of(slurp(o.points))) {
      try {
        pts.push_back(parse_circle_point(line));
      } catch (const std::exception& e) {
        throw IoError(o.points + ": malformed point: " + e.what());
      }
    }
  }
  if (o.random_points < 0) {
    err << "triangulate: --random-points must be non-negative\n";
    return UsageError;
  }
  std::mt19937_64 rng(o.seed);
  std::uniform_int_distribution<std::int64_t> num(-1000, 1000), den(1, 1000);
  // distinct as reduced fractions, including against the file's points
  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  auto reduced = [](CirclePoint c) {
    if (c.q == 0) return std::pair<std::int64_t, std::int64_t>{1, 0};
    std::int64_t g = std::gcd(std::llabs(c.p), std::llabs(c.q));
    if (c.q < 0) g = -g;
    return std::pair<std::int64_t, std::int64_t>{c.p / g, c.q / g};
  };
  for (auto& c : pts) seen.insert(reduced(c));
  for (int added = 0; added < o.random_points;) {
    CirclePoint c{num(rng), den(rng)};
    if (!seen.insert(reduced(c)).second) continue;
    pts.push_back(c);
    ++added;
  }
  IdealTriangulation t;
  try {
    t = ideal_triangulation(pts);
  } catch (const std::invalid_argument& e) {
    err << "triangulate: " << e.what() << '\n';
    return UsageError;
  }
  auto chk = verify_triangulation(t);
  std::ostringstream rep;
  rep << "triangulation points=" << t.points.size() << " triangles=" << t.triangles.size() << '\n';
  for (auto& tri : t.triangles) rep << "triangle " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  rep << "check count=" << chk.count_ok << " disjoint=" << chk.disjoint << " covers=" << chk.covers
      << " prefix_extendable=" << chk.prefix_extendable;
  if (!chk.witness.empty()) rep << ' ' << chk.witness;
  rep << '\n' << "VERDICT=" << (chk.ok() ? "pass" : "fail") << '\n';
  emit(rep.str(), o.report, out);
  return chk.ok() ? Pass : Fail;
}

int cmd_render(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.svg.empty()) {
    err << "render: --svg is required\n";
    return UsageError;
  }
  std::string svg;
  if (!o.tiling.empty()) {
    if (o.scene.empty()) {
      err << "render: --tiling needs --scene\n";
      return UsageError;
    }
    Scene s = scene_from(o.scene);
    std::istringstream is(slurp(o.tiling));
    PeanoTiling t;
    try {
      t = read_tiling(is);
    } catch (const std::exception& e) {
      throw IoError(o.tiling + ": malformed tiling: " + e.what());
    }
    svg = svg_string(t, s);
  } else if (!o.scene.empty()) {
    svg = svg_string(scene_from(o.scene));
  } else if (!o.raster.empty()) {
    svg = svg_string(raster_from(o.raster));
  } else {
    err << "render: one of --scene, --raster or --tiling is required\n";
    return UsageError;
  }
  dump(o.svg, svg);
  out << "rendered " << o.svg << '\n';
  return Pass;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Planar homotopy toolkit", "planar-homotopy"};
  app.require_subcommand(1, 1);
  Options o;
  app.add_option("--seed", o.seed, "seed for randomized work")->capture_default_str();

  auto* scene = app.add_subcommand("scene", "build a built-in scene and write it");
  scene->add_option("--name", o.name, "sierpinski, sierpinski_filled_hole, earring_circle, comb_two_sided, comb_one_sided, finite_punctures")->required();
  scene->add_option("--depth", o.depth)->capture_default_str();
  scene->add_option("--k", o.k, "finest resolution exponent")->capture_default_str();
  scene->add_option("--out", o.out, "scene file");
  scene->add_option("--svg", o.svg);
  scene->add_option("--m-out", o.m_out, "raster of the scene's continuum M (punctures opened up)");
  scene->add_option("--report", o.report);

  auto* check = app.add_subcommand("check", "decide whether a scene is homotopically 1-dimensional");
  check->add_option("--scene", o.scene)->required();
  check->add_option("--schedule", o.schedule, "comma-separated dyadic thresholds, e.g. 1/2,1/4,1/8");
  check->add_option("--report", o.report);

  auto* tile = app.add_subcommand("tile", "tile a scene by punctured domains and build their spines");
  tile->add_option("--scene", o.scene)->required();
  tile->add_option("--stages", o.stages)->capture_default_str();
  tile->add_option("--out", o.out, "tiling file");
  tile->add_option("--svg", o.svg);
  tile->add_option("--report", o.report);

  auto* quotient = app.add_subcommand("quotient", "probe loops in a raster against its run-graph quotient");
  quotient->add_option("--raster", o.raster)->required();
  quotient->add_option("--loops", o.loops, "one loop per line: x,y;x,y;...");
  quotient->add_option("--random-loops", o.random_loops)->capture_default_str();
  quotient->add_option("--steps", o.steps, "walk length of random loops")->capture_default_str();
  quotient->add_option("--cut-trials", o.cut_trials, "random cut systems for the emptiness check")->capture_default_str();
  quotient->add_option("--report", o.report);

  auto* tri = app.add_subcommand("triangulate", "ideal triangulation of points on the circle");
  tri->add_option("--points", o.points, "one p/q per line");
  tri->add_option("--random-points", o.random_points)->capture_default_str();
  tri->add_option("--report", o.report);

  auto* render = app.add_subcommand("render", "write an SVG of a scene, raster or tiling");
  render->add_option("--scene", o.scene);
  render->add_option("--raster", o.raster);
  render->add_option("--tiling", o.tiling);
  render->add_option("--svg", o.svg);

  for (auto* sub : {scene, check, tile, quotient, tri, render}) sub->add_option("--seed", o.seed, "seed for randomized work");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return Pass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return Pass;
  } catch (const CLI::ParseError& e) {
    err << "planar-homotopy: " << e.what() << '\n';
    return UsageError;
  }

  try {
    if (*scene) return cmd_scene(o, out, err);
    if (*check) return cmd_check(o, out, err);
    if (*tile) return cmd_tile(o, out, err);
    if (*quotient) return cmd_quotient(o, out, err);
    if (*tri) return cmd_triangulate(o, out, err);
    if (*render) return cmd_render(o, out, err);
  } catch (const IoError& e) {
    err << "planar-homotopy: " << e.what() << '\n';
    return UsageError;
  } catch (const std::exception& e) {
    err << "planar-homotopy: " << e.what() << '\n';
    return UsageError;
  }
  return UsageError;
}

}  // namespace ph::cli
