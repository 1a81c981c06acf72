#pragma once

// Generated inputs shared by the unit and acceptance suites.

#include <random>
#include <vector>

#include "planar_homotopy/raster.hpp"

namespace fixture {

struct PuncturedDomain {
  ph::Raster u;
  std::vector<ph::Cell> punctures;
};

// Union of up to three 4-aligned rectangles (4-connected), with `count`
// punctures at least 3 cells inside and at least 6 apart (Chebyshev).
inline PuncturedDomain punctured_domain(std::mt19937_64& rng, int k, int count) {
  const int n = 1 << k, q = n / 4;
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (;;) {
    ph::Raster u(k);
    int rects = pick(1, 3);
    for (int r = 0; r < rects; ++r) {
      int x0 = 4 * pick(0, q - 3), y0 = 4 * pick(0, q - 3);
      int x1 = std::min(n, x0 + 4 * pick(3, q)), y1 = std::min(n, y0 + 4 * pick(3, q));
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) u.set(x, y);
    }
    if (ph::label_components(u, ph::Adjacency::Four).members.size() != 1) continue;
    std::vector<ph::Cell> deep;
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        bool ok = true;
        for (int dy = -3; dy <= 3 && ok; ++dy)
          for (int dx = -3; dx <= 3 && ok; ++dx) ok = u.get(x + dx, y + dy);
        if (ok) deep.push_back({x, y});
      }
    std::vector<ph::Cell> ps;
    for (int tries = 0; tries < 400 && static_cast<int>(ps.size()) < count && !deep.empty(); ++tries) {
      ph::Cell c = deep[std::uniform_int_distribution<std::size_t>(0, deep.size() - 1)(rng)];
      bool far = true;
      for (auto p : ps) far = far && std::max(std::abs(p.x - c.x), std::abs(p.y - c.y)) >= 6;
      if (far) ps.push_back(c);
    }
    if (static_cast<int>(ps.size()) == count) return {u, ps};
  }
}

// random word over gens generators that reduces to the identity, length <= max_len
inline std::vector<int> random_trivial_word(std::mt19937_64& rng, int max_len, int gens) {
  std::vector<int> w, st;
  const int half = 1 + static_cast<int>(rng() % (max_len / 2));
  int pushes = 0;
  while (pushes < half || !st.empty()) {
    bool push = st.empty() || (pushes < half && rng() % 2);
    if (push) {
      int l;
      do l = static_cast<int>(rng() % gens) + 1, l = rng() % 2 ? l : -l;
      while (!st.empty() && l == -st.back());
      st.push_back(l);
      w.push_back(l);
      ++pushes;
    } else {
      w.push_back(-st.back());
      st.pop_back();
    }
  }
  return w;
}

}  // namespace fixture
