#include "planar_homotopy/characterize.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "planar_homotopy/parallel.hpp"

namespace ph {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string to_string(DimKind d) {
  switch (d) {
    case DimKind::AtMostOne: return "at-most-1";
    case DimKind::EqualsTwo: return "equals-2";
    case DimKind::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

namespace {

using Keep = std::function<bool(std::size_t rung, const Component&)>;

struct ProbeSetup {
  std::vector<Raster> rungs;  // the sets whose window components are measured
  Adjacency adjacency = Adjacency::Eight;
  Keep keep;                  // which components count
};

int max_probe_level(const std::vector<Raster>& rungs) { return std::max(0, rungs.front().resolution() - 2); }

// coarsening moves a boundary by up to one coarse cell on each side, and a
// diameter by a bit more: three cell widths of the coarser rung of each pair
std::vector<double> slack_for(const std::vector<Raster>& rungs) {
  std::vector<double> out;
  for (std::size_t s = 1; s < rungs.size(); ++s) out.push_back(3.0 * rungs[s - 1].cell_width());
  return out;
}

void require_ladder(const std::vector<Raster>& rungs) {
  if (rungs.size() < 2) throw std::invalid_argument("need at least two resolutions");
  for (std::size_t i = 1; i < rungs.size(); ++i)
    if (rungs[i].resolution() <= rungs[i - 1].resolution()) throw std::invalid_argument("resolutions must increase");
}

std::vector<Component> kept_components(const ProbeSetup& s, std::size_t r, const DyadicSquare& probe) {
  const Raster& src = s.rungs[r];
  auto comps = label_window(src, s.adjacency, probe.at(src.resolution()));
  std::vector<Component> out;
  for (auto& c : comps)
    if (!s.keep || s.keep(r, c)) out.push_back(std::move(c));
  return out;
}

std::vector<ProbeResult> run_probes(const ProbeSetup& s, const std::vector<Dyadic>& schedule) {
  auto probes = probe_disks(0, max_probe_level(s.rungs));
  const auto slack = slack_for(s.rungs);
  std::vector<ProbeResult> out(probes.size());
  parallel_for(probes.size(), [&](std::size_t i) {
    ProbeResult pr;
    pr.probe = probes[i];
    const std::size_t last = s.rungs.size() - 1;
    const Raster& below = s.rungs[last - 1];
    const int shift = s.rungs[last].resolution() - below.resolution();
    std::vector<double> unresolved;
    for (std::size_t r = 0; r <= last; ++r) {
      std::vector<double> ds;
      for (auto& c : kept_components(s, r, probes[i])) {
        ds.push_back(c.diameter);
        if (r == last && std::none_of(c.cells.begin(), c.cells.end(),
                                      [&](Cell x) { return below.test(x.x >> shift, x.y >> shift); }))
          unresolved.push_back(c.diameter);
      }
      std::sort(ds.rbegin(), ds.rend());
      pr.diameters.push_back(std::move(ds));
    }
    pr.null = null_sequence_verdict(pr.diameters, schedule, NullOptions{slack, unresolved});
    out[i] = std::move(pr);
  });
  return out;
}

Verdict combine(const std::vector<ProbeResult>& probes) {
  bool all_null = true;
  for (auto& p : probes) {
    if (p.null.verdict == NullKind::NotNull) return Verdict::Fail;
    all_null = all_null && p.null.verdict == NullKind::NullConsistent;
  }
  return all_null ? Verdict::Pass : Verdict::Inconclusive;
}

// the offending members of failing probes, at the finest rung
std::vector<Witness> probe_witnesses(const ProbeSetup& s, const std::vector<ProbeResult>& probes, const std::string& what,
                                     std::size_t max_probes = 8) {
  std::vector<Witness> out;
  std::size_t used = 0;
  for (auto& p : probes) {
    if (p.null.verdict != NullKind::NotNull) continue;
    if (used++ == max_probes) break;
    const double eps = p.null.witness_eps->value();
    auto comps = kept_components(s, s.rungs.size() - 1, p.probe);
    std::stable_sort(comps.begin(), comps.end(), [](const Component& a, const Component& b) { return a.diameter > b.diameter; });
    for (auto& c : comps) {
      if (c.diameter < eps - 1e-12) break;
      out.push_back(Witness{what, s.rungs.back().resolution(), c.cells, c.diameter, p.probe});
    }
  }
  return out;
}

struct PunctureMarks {
  std::vector<Raster> marks;  // per rung: cells holding a counted puncture
};

PunctureMarks mark_punctures(const Scene& scene, int depth) {
  PunctureMarks pm;
  for (std::size_t r = 0; r < scene.ladder.size(); ++r) {
    Raster m(scene.ladder[r]);
    for (auto& p : scene.punctures) {
      if (p.infinity || p.depth > depth) continue;
      Cell c = puncture_cell(p, scene.ladder[r]);
      if (!scene.bad[r].test(c)) m.set(c);
    }
    pm.marks.push_back(std::move(m));
  }
  return pm;
}

bool touches(const Component& c, const Raster& marks) {
  for (auto& cell : c.cells)
    if (marks.test(cell)) return true;
  return false;
}

std::string cells_brief(const Witness& w) {
  std::ostringstream os;
  os << "cells=" << w.cells.size();
  if (!w.cells.empty()) os << " first=" << w.cells.front().x << ',' << w.cells.front().y;
  os << " diameter=" << w.diameter;
  return os.str();
}

std::string probe_str(const DyadicSquare& p) {
  return "level=" + std::to_string(p.level) + " x=" + std::to_string(p.x) + " y=" + std::to_string(p.y);
}

std::string probe_line(const ProbeResult& p, const char* kind) {
  std::ostringstream os;
  os << "probe " << probe_str(p.probe) << ' ' << kind << '=';
  for (std::size_t r = 0; r < p.diameters.size(); ++r) os << (r ? "," : "") << p.diameters[r].size();
  os << " verdict=" << to_string(p.null.verdict);
  if (p.null.witness) os << " witness_eps=" << p.null.witness_eps->str();
  return os.str();
}

}  // namespace

ConditionReport condition1(const Scene& scene, int k, int depth) {
  if (depth < 0) depth = scene.max_depth();
  ConditionReport rep;
  rep.condition = 1;
  rep.resolution = k;
  Raster free = complement(scene.bad_at(k));  // carries the infinity cell
  auto fam = label_components(free, Adjacency::Eight);
  rep.components = static_cast<int>(fam.members.size());
  std::vector<int> hits(fam.members.size(), 0);
  for (auto& p : scene.punctures) {
    if (p.depth > depth) continue;
    int label = p.infinity ? fam.infinity_label() : fam.label_at(puncture_cell(p, k));
    if (label >= 0) ++hits[label];
  }
  for (auto& c : fam.members)
    if (!hits[c.label]) rep.witnesses.push_back(Witness{"unpunctured component", k, c.cells, c.diameter, std::nullopt});
  rep.verdict = rep.witnesses.empty() ? Verdict::Pass : Verdict::Fail;
  return rep;
}

ConditionReport condition2(const Scene& scene, const std::vector<Dyadic>& schedule_in, int depth) {
  if (scene.ladder.size() < 2) throw std::invalid_argument("condition 2 needs at least two resolutions");
  if (depth < 0) depth = scene.max_depth();
  auto schedule = schedule_in.empty() ? default_schedule(scene.finest()) : schedule_in;
  validate_schedule(schedule);

  auto pm = mark_punctures(scene, depth);
  ProbeSetup setup;
  for (auto& b : scene.bad) {
    Raster f = complement(b);
    f.set_includes_infinity(false);
    setup.rungs.push_back(std::move(f));
  }
  setup.adjacency = Adjacency::Eight;
  setup.keep = [&](std::size_t r, const Component& c) { return !touches(c, pm.marks[r]); };

  ConditionReport rep;
  rep.condition = 2;
  rep.resolution = scene.finest();
  rep.probes = run_probes(setup, schedule);
  rep.verdict = combine(rep.probes);
  if (rep.verdict == Verdict::Fail) rep.witnesses = probe_witnesses(setup, rep.probes, "unpunctured components not null");
  return rep;
}

DimensionVerdict homotopy_dimension_verdict(const Scene& scene, const std::vector<Dyadic>& schedule) {
  DimensionVerdict v;
  v.scene_id = scene.id;
  v.cond1 = condition1(scene, scene.finest());
  v.cond2 = condition2(scene, schedule);
  if (v.cond1.verdict == Verdict::Fail || v.cond2.verdict == Verdict::Fail) v.verdict = DimKind::EqualsTwo;
  else if (v.cond1.verdict == Verdict::Pass && v.cond2.verdict == Verdict::Pass) v.verdict = DimKind::AtMostOne;
  else v.verdict = DimKind::Inconclusive;
  return v;
}

std::string format_report(const ConditionReport& r) {
  std::ostringstream os;
  if (r.condition == 1) {
    os << "condition1 k=" << r.resolution << " components=" << r.components << " unpunctured=" << r.witnesses.size()
       << " verdict=" << to_string(r.verdict) << '\n';
    for (auto& w : r.witnesses) os << "witness condition=1 k=" << w.resolution << ' ' << cells_brief(w) << '\n';
  } else {
    os << "# probes are dyadic squares; null test is the desk-scale surrogate (stabilized eps-counts)\n";
    for (auto& p : r.probes) os << probe_line(p, "unpunctured") << '\n';
    for (auto& w : r.witnesses)
      os << "witness condition=2 probe " << probe_str(*w.probe) << " k=" << w.resolution << ' ' << cells_brief(w) << '\n';
    os << "condition2 probes=" << r.probes.size() << " verdict=" << to_string(r.verdict) << '\n';
  }
  return os.str();
}

std::string format_report(const DimensionVerdict& v) {
  std::ostringstream os;
  os << "scene=" << v.scene_id << '\n';
  os << format_report(v.cond1) << format_report(v.cond2);
  os << "VERDICT=" << to_string(v.verdict) << '\n';
  return os.str();
}

// --- continua and domains ------------------------------------------------------------

Verdict PeanoReport::verdict() const {
  bool all = true;
  for (auto& c : criteria) {
    if (c.verdict == Verdict::Fail) return Verdict::Fail;
    all = all && c.verdict == Verdict::Pass;
  }
  return all ? Verdict::Pass : Verdict::Inconclusive;
}

namespace {

CriterionReport run_criterion(const std::string& name, ProbeSetup setup, const std::vector<Dyadic>& schedule, const char* what) {
  CriterionReport c;
  c.criterion = name;
  c.probes = run_probes(setup, schedule);
  c.verdict = combine(c.probes);
  if (c.verdict == Verdict::Fail) c.witnesses = probe_witnesses(setup, c.probes, what);
  return c;
}

std::vector<Dyadic> schedule_or_default(const std::vector<Dyadic>& s, const std::vector<Raster>& rungs) {
  auto out = s.empty() ? default_schedule(rungs.back().resolution()) : s;
  validate_schedule(out);
  return out;
}

}  // namespace

PeanoReport peano_continuum_check(const std::vector<Raster>& m, const std::vector<Dyadic>& schedule_in) {
  require_ladder(m);
  auto schedule = schedule_or_default(schedule_in, m);
  PeanoReport rep;
  ProbeSetup outside;
  for (auto& r : m) {
    Raster c = complement(r);
    c.set_includes_infinity(false);
    outside.rungs.push_back(std::move(c));
  }
  outside.adjacency = Adjacency::Eight;
  rep.criteria.push_back(run_criterion("1", outside, schedule, "complement components not null"));

  ProbeSetup inside;
  inside.rungs = m;
  inside.adjacency = Adjacency::Four;
  rep.criteria.push_back(run_criterion("1'", inside, schedule, "intersection components not null"));
  return rep;
}

PeanoReport peano_domain_check(const std::vector<Raster>& u, const std::vector<Dyadic>& schedule_in) {
  require_ladder(u);
  auto schedule = schedule_or_default(schedule_in, u);
  PeanoReport rep;
  ProbeSetup inside;
  inside.rungs = u;
  inside.adjacency = Adjacency::Four;
  rep.criteria.push_back(run_criterion("2", inside, schedule, "intersection components not null"));
  return rep;
}

std::string format_report(const PeanoReport& r) {
  std::ostringstream os;
  for (auto& c : r.criteria) {
    for (auto& p : c.probes) os << "criterion=" << c.criterion << ' ' << probe_line(p, "components") << '\n';
    for (auto& w : c.witnesses) os << "witness criterion=" << c.criterion << " probe " << probe_str(*w.probe) << ' ' << cells_brief(w) << '\n';
    os << "criterion=" << c.criterion << " verdict=" << to_string(c.verdict) << '\n';
  }
  os << "VERDICT=" << to_string(r.verdict()) << '\n';
  return os.str();
}

}  // namespace ph
