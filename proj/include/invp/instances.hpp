#pragma once

// Bundled instances: the worked examples shipped with the solver, expressed
// as builders so the JSON files and the test suite share one source of truth.

#include <random>
#include <string>
#include <vector>

#include "invp/core.hpp"
#include "invp/json_io.hpp"

namespace invp::instances {

namespace detail {

// Promote strict data into the weak relation and close the generator family
// under composition, mirroring what parsing a serialized document would do.
inline Instance finish(Instance inst) {
  for (auto pr : inst.raw.strict) inst.raw.weak.insert(pr);
  inst.m = generate_monoid(inst.generators, inst.u, inst.limits.monoid_cap);
  return inst;
}

inline void add_strict(Instance& inst, const std::string& a, const std::string& b) {
  Pair pr{inst.u.id_of(a), inst.u.id_of(b)};
  inst.raw.weak.insert(pr);
  inst.raw.strict.insert(pr);
}

}  // namespace detail

// Two blocks of transformed strict comparisons over a two-element core: the
// a/b block forces y over x while the c/d block forces x over y, so no
// invariant preference can rank the core pair.  The four transforms prepend a
// tag to x or y and are defined nowhere else.
inline Instance stationarity() {
  Instance inst;
  for (const auto& l : {"x", "y", "ax", "ay", "bx", "by", "cx", "cy", "dx", "dy"})
    inst.u.add(l);
  for (const std::string tag : {"a", "b", "c", "d"})
    inst.generators.push_back(make_transform(
        tag, inst.u.size(),
        {{inst.u.id_of("x"), inst.u.id_of(tag + "x")}, {inst.u.id_of("y"), inst.u.id_of(tag + "y")}}));
  detail::add_strict(inst, "ax", "by");
  detail::add_strict(inst, "bx", "ay");
  detail::add_strict(inst, "cy", "dx");
  detail::add_strict(inst, "dy", "cx");
  // The refutation lives in width-one clauses; capping the width keeps the
  // bundled example instant without touching the verdict.
  inst.limits.max_width = 2;
  return detail::finish(std::move(inst));
}

// Rewards a, b at dates 0..2 with a delay transform; the data compare only
// delayed copies, yet invariance forces the undated strict comparison
// (a,0) over (b,0) in every rationalizing preference.
inline Instance dated_rewards() {
  Instance inst;
  for (const auto& l : {"a0", "a1", "a2", "b0", "b1", "b2"}) inst.u.add(l);
  inst.generators.push_back(make_transform("delay", inst.u.size(),
                                           {{inst.u.id_of("a0"), inst.u.id_of("a1")},
                                            {inst.u.id_of("a1"), inst.u.id_of("a2")},
                                            {inst.u.id_of("b0"), inst.u.id_of("b1")},
                                            {inst.u.id_of("b1"), inst.u.id_of("b2")}}));
  detail::add_strict(inst, "a1", "b2");
  detail::add_strict(inst, "a2", "b1");
  // Every forced comparison here rides a two-link broken cycle; a tight link
  // cap hands the leftover pairs to the solver quickly and keeps predictions
  // exact while the bundled example stays instant.
  inst.limits.max_links = 2;
  return detail::finish(std::move(inst));
}

// Bets on an urn: joining the yellow states to each bet must preserve the
// ranking, but the observed choices reverse under it.
inline Instance ellsberg() {
  Instance inst;
  for (const auto& l : {"red", "black", "red_or_yellow", "black_or_yellow"}) inst.u.add(l);
  inst.generators.push_back(
      make_transform("join_yellow", inst.u.size(),
                     {{inst.u.id_of("red"), inst.u.id_of("red_or_yellow")},
                      {inst.u.id_of("black"), inst.u.id_of("black_or_yellow")}}));
  detail::add_strict(inst, "red", "black");
  detail::add_strict(inst, "black_or_yellow", "red_or_yellow");
  return detail::finish(std::move(inst));
}

namespace detail {

// Words of tag-depth ≤ 2 over a two-element core.  `ordered` keeps "ab" and
// "ba" distinct; the multiset variant identifies them, which is exactly what
// makes the prepend transforms commute.
inline Instance reformulation(bool ordered) {
  Instance inst;
  const std::string tags = "abcd";
  std::vector<std::string> depth01 = {"x", "y"};
  for (char t : tags)
    for (const auto& core : {"x", "y"}) depth01.push_back(std::string(1, t) + core);
  for (const auto& w : depth01) inst.u.add(w);
  for (char t1 : tags)
    for (char t2 : tags) {
      if (!ordered && t2 < t1) continue;
      for (const auto& core : {"x", "y"})
        inst.u.add(std::string(1, t1) + std::string(1, t2) + core);
    }

  auto canon = [&](char tag, const std::string& word) {
    std::string body = word.substr(0, word.size() - 1);
    std::string core = word.substr(word.size() - 1);
    std::string out = tag + body;
    if (!ordered) std::sort(out.begin(), out.end());
    return out + core;
  };
  for (char t : tags) {
    std::vector<Pair> maplets;
    for (const auto& w : depth01)
      maplets.push_back({inst.u.id_of(w), inst.u.id_of(canon(t, w))});
    inst.generators.push_back(make_transform(std::string(1, t), inst.u.size(), maplets));
  }
  add_strict(inst, "ax", "by");
  add_strict(inst, "bx", "ay");
  add_strict(inst, "cy", "dx");
  add_strict(inst, "dy", "cx");
  return finish(std::move(inst));
}

}  // namespace detail

// The stationarity data over genuinely non-commuting transforms (ordered
// words): no invariant preference exists, but only the collapse calculus can
// show it.
inline Instance reformulation_noncommuting() { return detail::reformulation(true); }

// The same data once the transforms commute (multiset words): the image
// closure itself develops a strict cycle through the word adx, so the
// closure test refutes directly.
inline Instance reformulation_commuting() { return detail::reformulation(false); }

// A fixed pseudo-random instance for cross-engine smoke tests.  Values are
// drawn from a seeded mt19937 via modulo so the document is identical on
// every platform.
inline Instance random_seed42() {
  Instance inst;
  std::mt19937 rng(42);
  const int n = 6;
  for (int i = 0; i < n; ++i) inst.u.add("e" + std::to_string(i));

  auto draw_transform = [&](const std::string& name, bool total) {
    std::vector<Pair> maplets;
    for (int x = 0; x < n; ++x) {
      if (!total && rng() % 2 == 0) continue;
      maplets.push_back({x, static_cast<int>(rng() % n)});
    }
    return make_transform(name, n, maplets);
  };
  inst.generators.push_back(draw_transform("f", true));
  inst.generators.push_back(draw_transform("g", false));

  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      if (x == y || rng() % 4 != 0) continue;
      inst.raw.weak.insert({x, y});
      if (rng() % 2 == 0) inst.raw.strict.insert({x, y});
    }
  return detail::finish(std::move(inst));
}

// Additive comparisons truncated to the grid {-2..3}^5: indicator bundles
// with translation transforms.  The shifts compose into a family whose image
// closure chains the four observations into a strict cycle returning to the
// bundle on states {1,4}.
inline Instance kraft_grid() {
  Instance inst;
  const int lo = -2, hi = 3, dims = 5;
  const int side = hi - lo + 1;

  std::vector<std::vector<int>> grid;
  std::vector<int> cell(dims, lo);
  for (;;) {
    grid.push_back(cell);
    int d = 0;
    for (; d < dims; ++d) {
      if (++cell[static_cast<size_t>(d)] <= hi) break;
      cell[static_cast<size_t>(d)] = lo;
    }
    if (d == dims) break;
  }
  auto label_of = [](const std::vector<int>& v) {
    std::string s = "v";
    for (int c : v) s += (c < 0 ? "_n" + std::to_string(-c) : "_" + std::to_string(c));
    return s;
  };
  for (const auto& v : grid) inst.u.add(label_of(v));

  auto shift = [&](const std::string& name, const std::vector<int>& g) {
    std::vector<Pair> maplets;
    for (const auto& v : grid) {
      std::vector<int> w(v);
      bool inside = true;
      for (int d = 0; d < dims; ++d) {
        w[static_cast<size_t>(d)] += g[static_cast<size_t>(d)];
        inside = inside && lo <= w[static_cast<size_t>(d)] && w[static_cast<size_t>(d)] <= hi;
      }
      if (inside) maplets.push_back({inst.u.id_of(label_of(v)), inst.u.id_of(label_of(w))});
    }
    return make_transform(name, inst.u.size(), maplets);
  };
  inst.generators.push_back(shift("t1", {0, 0, 0, 0, 1}));
  inst.generators.push_back(shift("t2", {1, -1, 0, 0, 1}));
  inst.generators.push_back(shift("t3", {1, -1, 0, 1, 0}));

  auto lbl = [&](std::vector<int> v) { return label_of(v); };
  detail::add_strict(inst, lbl({0, 1, 1, 0, 1}), lbl({1, 0, 0, 1, 0}));  // 1_{235} over 1_{14}
  detail::add_strict(inst, lbl({1, 0, 0, 0, 1}), lbl({0, 1, 1, 0, 0}));  // 1_{15}  over 1_{23}
  detail::add_strict(inst, lbl({0, 0, 1, 1, 0}), lbl({0, 1, 0, 0, 1}));  // 1_{34}  over 1_{25}
  detail::add_strict(inst, lbl({0, 1, 0, 0, 0}), lbl({0, 0, 1, 0, 1}));  // 1_2     over 1_{35}
  (void)side;
  return detail::finish(std::move(inst));
}

}  // namespace invp::instances
