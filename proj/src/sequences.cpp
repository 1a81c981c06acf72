#include "planar_homotopy/sequences.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ph {

namespace {

void require_common(const SetSequence& seq) {
  if (seq.items.empty()) throw std::invalid_argument("set sequence is empty");
  for (auto& r : seq.items)
    if (r.resolution() != seq.items.front().resolution()) throw std::invalid_argument("set sequence mixes resolutions");
}

bool meets(const Raster& r, const IndexRect& rect) {
  for (int y = std::max(rect.y0, 0); y < std::min(rect.y1, r.side()); ++y)
    for (int x = std::max(rect.x0, 0); x < std::min(rect.x1, r.side()); ++x)
      if (r.test(x, y)) return true;
  return false;
}

int count_at_least(const std::vector<double>& ds, double eps) {
  // a hair of slack so that dyadic thresholds equal to a lattice diameter count
  return static_cast<int>(std::count_if(ds.begin(), ds.end(), [&](double d) { return d >= eps - 1e-12; }));
}

}  // namespace

std::pair<Raster, Raster> lim_inf_lim_sup(const SetSequence& seq, std::size_t tail) {
  require_common(seq);
  if (tail >= seq.items.size()) throw std::invalid_argument("tail index beyond sequence");
  const int k = seq.items.front().resolution();
  const std::size_t m = seq.items.size() - tail;
  const std::size_t half = (m + 1) / 2;

  Raster support(k);
  std::vector<Raster> near;  // 1-cell closure of each tail item
  for (std::size_t i = tail; i < seq.items.size(); ++i) {
    support = unite(support, seq.items[i]);
    near.push_back(dilate(seq.items[i], Adjacency::Eight));
  }
  Raster inf(k), sup(k);
  for (int y = 0; y < support.side(); ++y)
    for (int x = 0; x < support.side(); ++x) {
      if (!support.test(x, y)) continue;
      std::size_t hits = 0;
      for (auto& n : near) hits += n.test(x, y) ? 1 : 0;
      if (hits == m) inf.set(x, y);
      if (hits >= half) sup.set(x, y);
    }
  return {inf, sup};
}

std::vector<std::size_t> diagonal_subsequence(const SetSequence& seq, const std::vector<IndexRect>& basis) {
  require_common(seq);
  if (basis.empty()) throw std::invalid_argument("diagonal_subsequence needs a nonempty basis");
  std::vector<std::size_t> keep(seq.items.size());
  for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = i;
  for (auto& u : basis) {
    std::vector<std::size_t> missing;
    for (std::size_t i : keep)
      if (!meets(seq.items[i], u)) missing.push_back(i);
    if (!missing.empty()) keep = std::move(missing);
  }
  return keep;
}

bool LimitReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const ClaimCheck& c) { return !c.applicable || c.holds; });
}

LimitReport limit_properties(const SetSequence& seq, const Raster& limit, double eps) {
  require_common(seq);
  LimitReport rep;
  const int k = limit.resolution();

  ClaimCheck nonempty;
  nonempty.claim = "nonempty";
  nonempty.applicable = std::all_of(seq.items.begin(), seq.items.end(), [](const Raster& r) { return r.count() > 0; });
  nonempty.holds = limit.count() > 0;
  if (nonempty.applicable && !nonempty.holds) nonempty.witness = "limit has no cells";
  rep.checks.push_back(nonempty);

  ClaimCheck connected;
  connected.claim = "connected";
  connected.applicable = std::all_of(seq.items.begin(), seq.items.end(),
                                     [](const Raster& r) { return label_components(r, Adjacency::Eight).members.size() == 1; });
  auto lf = label_components(limit, Adjacency::Eight);
  connected.holds = lf.members.size() <= 1;
  if (connected.applicable && !connected.holds) {
    auto c = lf.members[1].cells.front();
    connected.witness = "second component at cell " + std::to_string(c.x) + "," + std::to_string(c.y);
  }
  rep.checks.push_back(connected);

  ClaimCheck diam;
  diam.claim = "diameter";
  diam.applicable = std::all_of(seq.items.begin(), seq.items.end(), [&](const Raster& r) {
    auto cells = occupied_cells(r);
    return !cells.empty() && diameter(cells, k) >= eps - 1e-12;
  });
  auto lc = occupied_cells(limit);
  double d = lc.empty() ? 0.0 : diameter(lc, k);
  diam.holds = d >= eps - 2 * limit.cell_width() - 1e-12;
  if (diam.applicable && !diam.holds) diam.witness = "limit diameter " + std::to_string(d);
  rep.checks.push_back(diam);
  return rep;
}

std::string to_string(NullKind k) {
  switch (k) {
    case NullKind::NullConsistent: return "null-consistent";
    case NullKind::NotNull: return "not-null";
    case NullKind::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

void validate_schedule(const std::vector<Dyadic>& schedule) {
  if (schedule.empty()) throw std::invalid_argument("epsilon schedule is empty");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(Dyadic{0, 0} < schedule[i])) throw std::invalid_argument("epsilon schedule must be positive");
    if (i && !(schedule[i] < schedule[i - 1])) throw std::invalid_argument("epsilon schedule must be strictly decreasing");
  }
}

std::vector<Dyadic> default_schedule(int k) {
  std::vector<Dyadic> s;
  for (int e = 1; e <= std::max(1, k - 2); ++e) s.push_back({1, e});
  return s;
}

namespace {

bool stabilized(const std::vector<double>& coarse, const std::vector<double>& fine, const std::vector<Dyadic>& schedule,
                double tolerance) {
  // the fine count must be explainable by the coarse multiset up to the
  // measurement slack (equality when tolerance == 0)
  for (auto& e : schedule) {
    const double eps = e.value();
    int f_eps = count_at_least(fine, eps);
    if (!(count_at_least(coarse, eps + tolerance) <= f_eps && f_eps <= count_at_least(coarse, eps - tolerance))) return false;
  }
  return true;
}

}  // namespace

NullVerdict null_sequence_verdict(const std::vector<std::vector<double>>& families, const std::vector<Dyadic>& schedule,
                                  double tolerance) {
  return null_sequence_verdict(families, schedule, NullOptions{{tolerance}, {}});
}

NullVerdict null_sequence_verdict(const std::vector<std::vector<double>>& families, const std::vector<Dyadic>& schedule,
                                  const NullOptions& options) {
  if (families.size() < 2) throw std::invalid_argument("null_sequence_verdict needs at least two scales");
  validate_schedule(schedule);
  const std::size_t S = families.size();
  if (options.slack.size() > 1 && options.slack.size() != S - 1) throw std::invalid_argument("one slack per pair of scales");
  auto slack = [&](std::size_t s) {  // between s-1 and s
    if (options.slack.empty()) return 0.0;
    return options.slack.size() == 1 ? options.slack.front() : options.slack[s - 1];
  };
  NullVerdict v;
  v.schedule = schedule;
  const auto& coarse = families[S - 2];
  const auto& fine = families[S - 1];

  for (auto& e : schedule) {
    std::vector<int> row;
    for (auto& f : families) row.push_back(count_at_least(f, e.value()));
    v.counts.push_back(row);
  }
  if (stabilized(coarse, fine, schedule, slack(S - 1))) {
    v.verdict = NullKind::NullConsistent;
    return v;
  }
  // members the coarser scale cannot see only count as growth when growth
  // also shows up at an earlier step
  std::vector<double> resolved = fine;
  if (!options.fine_unresolved.empty()) {
    std::multiset<double> drop(options.fine_unresolved.begin(), options.fine_unresolved.end());
    resolved.clear();
    for (double d : fine) {
      auto it = drop.find(d);
      if (it != drop.end()) drop.erase(it);
      else resolved.push_back(d);
    }
  }
  for (std::size_t e = 0; e < schedule.size(); ++e) {
    const double eps = schedule[e].value();
    bool grows = true;
    for (std::size_t s = 1; s < S && grows; ++s) {
      int now = (S == 2) ? count_at_least(resolved, eps) : v.counts[e][s];
      grows = now > count_at_least(families[s - 1], eps - slack(s));
    }
    if (!grows) continue;
    int best = -1;
    for (std::size_t i = 0; i < fine.size(); ++i)
      if (fine[i] >= eps - 1e-12 && (best < 0 || fine[i] > fine[best])) best = static_cast<int>(i);
    v.verdict = NullKind::NotNull;
    v.witness = best;
    v.witness_eps = schedule[e];
    return v;
  }
  if (resolved.size() != fine.size() && stabilized(coarse, resolved, schedule, slack(S - 1))) {
    v.verdict = NullKind::NullConsistent;
    return v;
  }
  v.verdict = NullKind::Inconclusive;
  return v;
}

std::string serialize(const NullVerdict& v) {
  std::ostringstream os;
  os << "# desk-scale surrogate: stabilized eps-counts across the two finest scales\n";
  for (std::size_t e = 0; e < v.schedule.size(); ++e) {
    os << "eps=" << v.schedule[e].str() << " counts=";
    for (std::size_t s = 0; s < v.counts[e].size(); ++s) os << (s ? "," : "") << v.counts[e][s];
    os << '\n';
  }
  os << "verdict=" << to_string(v.verdict) << '\n';
  if (v.witness) os << "witness=" << *v.witness << " eps=" << v.witness_eps->str() << '\n';
  return os.str();
}

}  // namespace ph
