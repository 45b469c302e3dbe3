#include <doctest.h>
#include <invp/closure.hpp>

#include "oracles.hpp"

using namespace invp;

namespace {

// Depth-2 word universe over letters and bases: x, y, ax..dy, aax..ddy.
struct WordWorld {
  Universe u;
  Monoid m;
};

WordWorld word_world() {
  std::vector<std::string> labels = {"x", "y"};
  const std::string letters = "abcd";
  for (char c : letters)
    for (const char* base : {"x", "y"}) labels.push_back(std::string(1, c) + base);
  for (char c1 : letters)
    for (char c2 : letters)
      for (const char* base : {"x", "y"})
        labels.push_back(std::string(1, c1) + std::string(1, c2) + base);
  Universe u(labels);
  std::vector<PartialTransform> gens;
  for (char c : letters) {
    std::vector<Pair> maplets;
    for (const std::string& w : labels)
      if (w.size() <= 2)  // depth <= 1: prepending keeps us inside the universe
        maplets.push_back({u.id_of(w), u.id_of(std::string(1, c) + w)});
    gens.push_back(make_transform(std::string(1, c), u.size(), maplets));
  }
  Monoid m = generate_monoid(gens, u, 10000);
  return {std::move(u), std::move(m)};
}

OrderPair random_normalized(oracles::Rng& rng, int n, double weak_p, double strict_p) {
  Universe u = oracles::numbered_universe(n);
  return normalize_data(oracles::random_data(rng, n, weak_p, strict_p), u);
}

}  // namespace

TEST_CASE("transitive_closure agrees with the state-graph oracle") {
  oracles::Rng rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    int n = rng.uniform(1, 7);
    OrderPair p = random_normalized(rng, n, 0.3, 0.5);
    OrderPair got = transitive_closure(p, n);
    oracles::ClosureOracle want = oracles::closure_oracle(p, n);
    CHECK(got.weak == want.weak);
    CHECK(got.strict == want.strict);
  }
}

TEST_CASE("transitive_closure handles strict self-loops and non-normalized input") {
  OrderPair p;
  p.weak = {{0, 1}, {1, 1}};
  p.strict = {{1, 1}};
  OrderPair got = transitive_closure(p, 3);
  CHECK(got.strict.count({0, 1}));
  CHECK(got.strict.count({1, 1}));
  CHECK(!got.strict.count({2, 2}));
  CHECK(got.weak.count({2, 2}));  // reflexive by empty path
  oracles::ClosureOracle want = oracles::closure_oracle(p, 3);
  CHECK(got.weak == want.weak);
  CHECK(got.strict == want.strict);
}

TEST_CASE("m_closure matches its definition on random families") {
  oracles::Rng rng(103);
  Universe u = oracles::numbered_universe(5);
  for (int trial = 0; trial < 150; ++trial) {
    auto mo = oracles::random_small_closed_monoid(rng, u, 20);
    REQUIRE(mo.has_value());
    OrderPair p = random_normalized(rng, 5, 0.25, 0.5);
    OrderPair got = m_closure(p, *mo);
    OrderPair want = oracles::m_closure_oracle(p, *mo);
    CHECK(got == want);
    // Contains the input (identity is in the family).
    for (auto pr : p.weak) CHECK(got.weak.count(pr));
    for (auto pr : p.strict) CHECK(got.strict.count(pr));
    // Idempotent for a composition-closed family.
    CHECK(m_closure(got, *mo) == got);
  }
}

TEST_CASE("invariant_closure is a fixpoint containing both closures") {
  oracles::Rng rng(107);
  Universe u = oracles::numbered_universe(5);
  for (int trial = 0; trial < 80; ++trial) {
    auto mo = oracles::random_small_closed_monoid(rng, u, 16);
    REQUIRE(mo.has_value());
    OrderPair p = random_normalized(rng, 5, 0.25, 0.5);
    OrderPair cl = invariant_closure(p, *mo, 5);
    CHECK(m_closure(cl, *mo) == cl);
    CHECK(transitive_closure(cl, 5) == cl);
    OrderPair tc = transitive_closure(p, 5);
    for (auto pr : tc.weak) CHECK(cl.weak.count(pr));
    for (auto pr : tc.strict) CHECK(cl.strict.count(pr));
    OrderPair mc = m_closure(p, *mo);
    for (auto pr : mc.weak) CHECK(cl.weak.count(pr));
    for (auto pr : mc.strict) CHECK(cl.strict.count(pr));
  }
}

TEST_CASE("find_cycle agrees with the reachability oracle and emits valid witnesses") {
  oracles::Rng rng(109);
  for (int trial = 0; trial < 400; ++trial) {
    int n = rng.uniform(1, 7);
    OrderPair p = random_normalized(rng, n, 0.3, 0.5);
    auto got = find_cycle(p, n);
    bool want = oracles::has_cycle_oracle(p, n);
    CHECK(got.has_value() == want);
    if (got) {
      CHECK(oracles::valid_cycle_witness(got->nodes, p));
      // Simple: no repeated alternative.
      std::set<int> uniq(got->nodes.begin(), got->nodes.end());
      CHECK(uniq.size() == got->nodes.size());
      // Deterministic.
      auto again = find_cycle(p, n);
      REQUIRE(again.has_value());
      CHECK(again->nodes == got->nodes);
    }
  }
}

TEST_CASE("find_cycle picks the pinned witness on handcrafted graphs") {
  OrderPair p;
  p.weak = {{0, 1}, {1, 2}, {2, 0}, {0, 0}, {1, 1}, {2, 2}};
  p.strict = {{2, 0}};
  auto w = find_cycle(p, 3);
  REQUIRE(w.has_value());
  CHECK(w->nodes == std::vector<int>{0, 1, 2});

  // A weak shortcut shortens the witness.
  p.weak.insert({0, 2});
  w = find_cycle(p, 3);
  REQUIRE(w.has_value());
  CHECK(w->nodes == std::vector<int>{0, 2});

  // A lexicographically smaller strict edge in the same component wins.
  p.strict.insert({1, 2});
  w = find_cycle(p, 3);
  REQUIRE(w.has_value());
  CHECK(w->nodes == std::vector<int>{2, 0, 1});

  // Strict self-loop: single-node witness.
  OrderPair q;
  q.weak = {{1, 1}};
  q.strict = {{1, 1}};
  auto sw = find_cycle(q, 2);
  REQUIRE(sw.has_value());
  CHECK(sw->nodes == std::vector<int>{1});
}

TEST_CASE("witnesses are hop-minimal through their closing edge") {
  oracles::Rng rng(113);
  for (int trial = 0; trial < 200; ++trial) {
    int n = rng.uniform(2, 7);
    OrderPair p = random_normalized(rng, n, 0.35, 0.5);
    auto w = find_cycle(p, n);
    if (!w || w->nodes.size() <= 1) continue;
    int src = w->nodes.back();
    int dst = w->nodes.front();
    // BFS the shortest weak path dst -> src and compare hop counts.
    std::vector<int> dist(static_cast<size_t>(n), -1);
    std::vector<int> queue{dst};
    dist[static_cast<size_t>(dst)] = 0;
    for (size_t qi = 0; qi < queue.size(); ++qi)
      for (auto [a, b] : p.weak)
        if (a == queue[qi] && dist[static_cast<size_t>(b)] < 0) {
          dist[static_cast<size_t>(b)] = dist[static_cast<size_t>(a)] + 1;
          queue.push_back(b);
        }
    CHECK(static_cast<int>(w->nodes.size()) - 1 == dist[static_cast<size_t>(src)]);
  }
}

TEST_CASE("is_commutative matches the all-pairs oracle on generated families") {
  oracles::Rng rng(127);
  Universe u = oracles::numbered_universe(5);
  int seen_false = 0, seen_true = 0;
  for (int trial = 0; trial < 120; ++trial) {
    auto mo = oracles::random_small_closed_monoid(rng, u, 24);
    REQUIRE(mo.has_value());
    CommutativityReport rep = is_commutative(*mo);
    CHECK(rep.commutative == oracles::all_pairs_commute(*mo));
    if (rep.commutative)
      ++seen_true;
    else {
      ++seen_false;
      // The reported pair really disagrees, at the reported point.
      const auto& a = mo->elements[static_cast<size_t>(rep.left)];
      const auto& b = mo->elements[static_cast<size_t>(rep.right)];
      PartialTransform ab = compose(a, b), ba = compose(b, a);
      CHECK(!ab.same_map(ba));
      REQUIRE(rep.point >= 0);
      CHECK(ab.image[static_cast<size_t>(rep.point)] != ba.image[static_cast<size_t>(rep.point)]);
    }
  }
  CHECK(seen_false > 0);
  CHECK(seen_true > 0);
}

TEST_CASE("word transforms commute only when truncation hides composition") {
  WordWorld ww = word_world();
  // On the depth-2 universe, prepending 'a' then 'b' differs from 'b' then
  // 'a' already at x: abx vs bax.
  CommutativityReport rep = is_commutative(ww.m);
  CHECK(!rep.commutative);
  CHECK(rep.point >= 0);
  CHECK(!oracles::all_pairs_commute(ww.m));
}

TEST_CASE("decide_commutative refutes via an image-closure cycle") {
  // Swapping the two alternatives is an invariance; strictly preferring one
  // of them is then self-defeating.
  Universe u({"p", "q"});
  PartialTransform swap = make_transform("swap", 2, {{0, 1}, {1, 0}});
  Monoid m = generate_monoid({swap}, u, 100);
  REQUIRE(m.closed);
  OrderPair raw;
  raw.strict.insert({0, 1});
  CommutativeVerdict v = decide_commutative(raw, m, u);
  CHECK(v.verdict == Verdict::NotRationalizable);
  REQUIRE(v.witness.has_value());
  CHECK(oracles::valid_cycle_witness(v.witness->nodes, v.closure));
}

TEST_CASE("decide_commutative certifies acyclic total families") {
  // Rotation by two on six slots: the orbit of the strict comparison stays
  // acyclic, so some invariant complete preference extends it.
  Universe u = oracles::numbered_universe(6);
  std::vector<Pair> maplets;
  for (int x = 0; x < 6; ++x) maplets.push_back({x, (x + 2) % 6});
  Monoid m = generate_monoid({make_transform("rot2", 6, maplets)}, u, 100);
  REQUIRE(m.closed);
  CHECK(m.total_modulo_empty());
  OrderPair raw;
  raw.strict.insert({0, 1});
  CommutativeVerdict v = decide_commutative(raw, m, u);
  CHECK(v.verdict == Verdict::Rationalizable);

  // A non-injective image collapses a strict comparison into a self-loop:
  // refuted even though every map is total.
  PartialTransform step = make_transform("step", 6, {{0, 1}, {1, 2}, {2, 2},
                                                     {3, 3}, {4, 4}, {5, 5}});
  Monoid m2 = generate_monoid({step}, u, 100);
  REQUIRE(m2.closed);
  CommutativeVerdict v2 = decide_commutative(raw, m2, u);
  CHECK(v2.verdict == Verdict::NotRationalizable);
}

TEST_CASE("decide_commutative declines partial acyclic families and open questions") {
  // Dated rewards: +1 postpones where possible; acyclic closure, but the
  // shift is partial, so no verdict here.
  std::vector<std::string> labels;
  for (char prize : {'a', 'b'})
    for (int d = 0; d <= 2; ++d) labels.push_back(std::string(1, prize) + std::to_string(d));
  Universe u(labels);
  std::vector<Pair> maplets;
  for (char prize : {'a', 'b'})
    for (int d = 0; d <= 1; ++d)
      maplets.push_back({u.id_of(std::string(1, prize) + std::to_string(d)),
                         u.id_of(std::string(1, prize) + std::to_string(d + 1))});
  Monoid m = generate_monoid({make_transform("+1", u.size(), maplets)}, u, 100);
  REQUIRE(m.closed);
  OrderPair raw;
  raw.strict.insert({u.id_of("a1"), u.id_of("b2")});
  raw.strict.insert({u.id_of("a2"), u.id_of("b1")});
  CommutativeVerdict v = decide_commutative(raw, m, u);
  CHECK(v.verdict == Verdict::NotApplicable);

  // Noncommuting family: declined regardless of the data.
  WordWorld ww = word_world();
  OrderPair empty;
  CHECK(decide_commutative(empty, ww.m, ww.u).verdict == Verdict::NotApplicable);

  // Truncated family: declined.
  Universe u4 = oracles::numbered_universe(4);
  std::vector<PartialTransform> gens = {
      make_transform("cycle", 4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}),
      make_transform("merge", 4, {{0, 0}, {1, 0}, {2, 2}, {3, 3}}),
  };
  Monoid capped = generate_monoid(gens, u4, 5);
  REQUIRE(!capped.closed);
  CHECK(decide_commutative(empty = OrderPair{}, capped, u4).verdict == Verdict::NotApplicable);
}

TEST_CASE("decide_commutative refutes a partial family when the cycle is there") {
  // Ambiguity-aversion pattern: r ≻ b observed, by ≻ ry observed, and mixing
  // in the third state is an invariance r↦ry, b↦by.  The image of the first
  // comparison collides head-on with the second.
  Universe u({"r", "b", "ry", "by"});
  PartialTransform mix = make_transform("mix", 4, {{0, 2}, {1, 3}});
  Monoid m = generate_monoid({mix}, u, 100);
  REQUIRE(m.closed);
  CHECK(!m.total_modulo_empty());
  OrderPair raw;
  raw.strict.insert({u.id_of("r"), u.id_of("b")});
  raw.strict.insert({u.id_of("by"), u.id_of("ry")});
  CommutativeVerdict v = decide_commutative(raw, m, u);
  CHECK(v.verdict == Verdict::NotRationalizable);
  REQUIRE(v.witness.has_value());
  CHECK(oracles::valid_cycle_witness(v.witness->nodes, v.closure));
}

TEST_CASE("closure acyclicity equals rationalizability for commuting total families") {
  oracles::Rng rng(131);
  for (int trial = 0; trial < 120; ++trial) {
    int n = rng.uniform(2, 6);
    Universe u = oracles::numbered_universe(n);
    auto gens = oracles::random_commuting_generators(rng, n, rng.uniform(1, 2));
    Monoid m = generate_monoid(gens, u, 10000);
    REQUIRE(m.closed);
    REQUIRE(oracles::all_pairs_commute(m));
    OrderPair raw = oracles::random_data(rng, n, 0.2, 0.6);
    CommutativeVerdict v = decide_commutative(raw, m, u);
    OrderPair data = normalize_data(raw, u);
    bool cyclic = oracles::has_cycle_oracle(oracles::m_closure_oracle(data, m), n);
    CHECK(v.verdict == (cyclic ? Verdict::NotRationalizable : Verdict::Rationalizable));
  }
}
