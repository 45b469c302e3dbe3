#pragma once

// The refutation engine.  Data that cannot be extended to any invariant
// complete preference are refuted by deriving the empty forbidden
// subrelation ⟨∅,∅⟩ in a small calculus:
//
//  - axioms are forbidden subrelations read off broken cycles (chains of
//    transformed comparisons whose gaps are unobserved) and single
//    observations (a forced comparison forbids its own reversal);
//  - the collapse rule cancels a weak pair on one side against its
//    transformed reversal on the other and merges what is left.
//
// A forbidden subrelation ⟨W,S⟩ (S ⊆ W) asserts that no admissible
// preference realises every pair of W weakly with those of S strict.  As a
// clause it is the disjunction of ¬[a≽b] over W∖S and ¬[a≻b] over S.
//
// Saturation runs a given-clause loop with forward subsumption under width
// and store bounds; the result is either a refutation with its derivation, a
// saturated store (complete when nothing was truncated), or exhaustion.

#include <invp/closure.hpp>
#include <invp/core.hpp>

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace invp {

// ---------------------------------------------------------------------------
// Clauses

struct Lit {
  int x = 0;
  int y = 0;
  bool strict = false;  // true: ¬[x≻y] (pair in S); false: ¬[x≽y] (pair in W∖S)
  auto operator<=>(const Lit&) const = default;
};

// Canonical form: sorted by pair, one literal per pair.
using Clause = std::vector<Lit>;

// Merges duplicate pairs; a pair contributed both weakly and strictly stays
// strict (the union of S parts wins).
inline Clause make_clause(std::vector<Lit> lits) {
  std::sort(lits.begin(), lits.end(), [](const Lit& a, const Lit& b) {
    return std::pair{a.x, a.y} < std::pair{b.x, b.y};
  });
  Clause out;
  for (const Lit& l : lits) {
    if (!out.empty() && out.back().x == l.x && out.back().y == l.y)
      out.back().strict = out.back().strict || l.strict;
    else
      out.push_back(l);
  }
  return out;
}

// ⟨W′,S′⟩ subsumes ⟨W,S⟩ when W′∖S′ ⊆ W∖S and S′ ⊆ S: literal subset with
// matching polarity.
inline bool subsumes(const Clause& small, const Clause& big) {
  size_t j = 0;
  for (const Lit& l : small) {
    while (j < big.size() && std::pair{big[j].x, big[j].y} < std::pair{l.x, l.y}) ++j;
    if (j == big.size() || big[j] != l) return false;
    ++j;
  }
  return true;
}

// The collapse result: left loses its cancelled weak pair, right loses every
// literal on its cancelled pair, and the remainders merge.
inline Clause collapse_result(const Clause& left, const Clause& right, Pair cancelled_left,
                              Pair cancelled_right) {
  std::vector<Lit> lits;
  for (const Lit& l : left)
    if (Pair{l.x, l.y} != cancelled_left) lits.push_back(l);
  for (const Lit& l : right)
    if (Pair{l.x, l.y} != cancelled_right) lits.push_back(l);
  return make_clause(std::move(lits));
}

// ---------------------------------------------------------------------------
// Broken cycles

struct BrokenCycle {
  struct Link {
    int omega = 0;  // index into the monoid's elements
    int x = 0;
    int y = 0;
    auto operator<=>(const Link&) const = default;
  };
  std::vector<Link> links;
  bool strict = false;  // some chain comparison rides a strict edge
};

struct Limits {
  int max_links = 0;          // cycle length bound; 0 = universe size squared
  int max_clauses = 50000;    // clause store bound
  int max_width = 4;          // forbidden-subrelation width bound
  long cycle_budget = 500000;  // gap-graph search steps
  int max_cycles = 2000;      // broken cycles kept
  int monoid_cap = 10000;    // family generation bound (used by callers)
  int max_universe = 2048;   // general engine refuses larger universes
  int max_gap_nodes = 4000;  // general engine refuses larger gap graphs
  long max_triple_clauses = 20000;  // three-way coherence axioms kept
};

struct Truncation {
  bool cycle_length = false;
  bool cycle_budget = false;
  bool cycle_count = false;
  bool width = false;
  bool store = false;
  bool coherence = false;  // three-way coherence axioms skipped for size
  bool any() const {
    return cycle_length || cycle_budget || cycle_count || width || store || coherence;
  }
};

inline Truncation merge(Truncation a, Truncation b) {
  a.cycle_length |= b.cycle_length;
  a.cycle_budget |= b.cycle_budget;
  a.cycle_count |= b.cycle_count;
  a.width |= b.width;
  a.store |= b.store;
  a.coherence |= b.coherence;
  return a;
}

// Admissible gap-graph nodes: (ω, x, y) with x,y in ω's domain and the gap
// (x,y) unobserved in either direction.
inline std::vector<BrokenCycle::Link> gap_nodes(const OrderPair& data, const Monoid& m, int n) {
  std::vector<BrokenCycle::Link> nodes;
  for (int w = 0; w < static_cast<int>(m.elements.size()); ++w) {
    const auto& t = m.elements[static_cast<size_t>(w)];
    for (int x = 0; x < n; ++x) {
      if (!t.defined(x)) continue;
      for (int y = 0; y < n; ++y) {
        if (!t.defined(y)) continue;
        if (data.weak.count({x, y}) || data.weak.count({y, x})) continue;
        nodes.push_back({w, x, y});
      }
    }
  }
  return nodes;
}

struct CycleEnumeration {
  std::vector<BrokenCycle> cycles;
  Truncation truncation;
  long steps = 0;
};

// Simple directed cycles of the gap graph, shortest lengths first (iterative
// deepening), each cycle listed once starting at its smallest node.  The link
// structure ω_i(x_i) ≽⊺ ω_{i+1}(y_{i+1}) closes cyclically; the cycle is
// strict when some such comparison is in the strict closure.
inline CycleEnumeration enumerate_broken_cycles(const OrderPair& data, const Monoid& m, int n,
                                                const Limits& lim) {
  CycleEnumeration out;
  OrderPair tcl = transitive_closure(data, n);
  std::vector<BrokenCycle::Link> nodes = gap_nodes(data, m, n);
  const int N = static_cast<int>(nodes.size());
  const int max_links = lim.max_links > 0 ? lim.max_links : n * n;

  std::vector<int> heads(static_cast<size_t>(N)), tails(static_cast<size_t>(N));
  for (int i = 0; i < N; ++i) {
    const auto& l = nodes[static_cast<size_t>(i)];
    heads[static_cast<size_t>(i)] = m.elements[static_cast<size_t>(l.omega)](l.x);  // ω_i(x_i)
    tails[static_cast<size_t>(i)] = m.elements[static_cast<size_t>(l.omega)](l.y);  // ω_i(y_i)
  }
  std::vector<char> weak_at(static_cast<size_t>(n) * static_cast<size_t>(n), 0);
  for (auto [a, b] : tcl.weak) weak_at[static_cast<size_t>(a) * n + b] = 1;
  auto head = [&](int i) { return heads[static_cast<size_t>(i)]; };
  auto tail = [&](int i) { return tails[static_cast<size_t>(i)]; };
  std::vector<std::vector<int>> adj(static_cast<size_t>(N));
  for (int i = 0; i < N; ++i) {
    const size_t row = static_cast<size_t>(heads[static_cast<size_t>(i)]) * n;
    for (int j = 0; j < N; ++j)
      if (weak_at[row + static_cast<size_t>(tails[static_cast<size_t>(j)])])
        adj[static_cast<size_t>(i)].push_back(j);
  }

  long budget = lim.cycle_budget;
  std::vector<char> on_path(static_cast<size_t>(N), 0);
  std::vector<int> path;

  auto emit = [&](const std::vector<int>& cyc) {
    BrokenCycle bc;
    for (size_t i = 0; i < cyc.size(); ++i) {
      bc.links.push_back(nodes[static_cast<size_t>(cyc[i])]);
      int next = cyc[(i + 1) % cyc.size()];
      if (tcl.strict.count({head(cyc[i]), tail(next)})) bc.strict = true;
    }
    out.cycles.push_back(std::move(bc));
  };

  bool stop = false;
  for (int target = 1; target <= max_links && !stop; ++target) {
    for (int root = 0; root < N && !stop; ++root) {
      path.assign(1, root);
      on_path.assign(static_cast<size_t>(N), 0);
      on_path[static_cast<size_t>(root)] = 1;
      // Depth-first over simple paths of nodes >= root, exact target length.
      auto rec = [&](auto&& self) -> void {
        if (stop) return;
        int cur = path.back();
        if (static_cast<int>(path.size()) == target) {
          for (int nxt : adj[static_cast<size_t>(cur)]) {
            if (nxt == root) {
              emit(path);
              ++out.steps;
              if (static_cast<int>(out.cycles.size()) >= lim.max_cycles) {
                out.truncation.cycle_count = true;
                stop = true;
              }
              break;
            }
          }
          if (target == max_links && !stop) {
            // Conservative length flag: this full-depth path could extend.
            for (int nxt : adj[static_cast<size_t>(cur)])
              if (nxt > root && !on_path[static_cast<size_t>(nxt)]) {
                out.truncation.cycle_length = true;
                break;
              }
          }
          return;
        }
        for (int nxt : adj[static_cast<size_t>(cur)]) {
          if (stop) return;
          if (nxt <= root || on_path[static_cast<size_t>(nxt)]) continue;
          if (--budget <= 0) {
            out.truncation.cycle_budget = true;
            stop = true;
            return;
          }
          ++out.steps;
          on_path[static_cast<size_t>(nxt)] = 1;
          path.push_back(nxt);
          self(self);
          path.pop_back();
          on_path[static_cast<size_t>(nxt)] = 0;
        }
      };
      if (--budget <= 0) {
        out.truncation.cycle_budget = true;
        stop = true;
      } else {
        rec(rec);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Derivations

struct DerivationStep {
  enum class Kind { CycleAxiom, ObservationAxiom, Collapse };
  int id = 0;  // 1-based within its derivation
  Kind kind = Kind::Collapse;
  Clause result;

  // CycleAxiom payload (S is implicit in `result`).
  std::optional<BrokenCycle> cycle;

  // ObservationAxiom payload: the pair as found in the invariant closure;
  // `strict` distinguishes a strict from a weak observation.
  std::optional<Lit> observed;

  // Collapse payload.
  int left = 0, right = 0;  // parent step ids
  int omega = -1, omega_prime = -1;
  Pair preimage{-1, -1};                            // (x,y)
  Pair cancelled_left{-1, -1}, cancelled_right{-1, -1};  // (ω(x),ω(y)), (ω′(y),ω′(x))
};

struct Derivation {
  std::vector<DerivationStep> steps;  // topologically ordered; last is ⟨∅,∅⟩ for refutations
};

// ---------------------------------------------------------------------------
// Saturation

struct SaturateStats {
  int units = 0;
  int cycles = 0;
  int cycle_clauses = 0;
  int coherence_clauses = 0;
  int collapses = 0;
  int kept = 0;
  int subsumed = 0;
  int width_dropped = 0;
  int givens = 0;
};

struct StoredClause {
  Clause lits;
  DerivationStep::Kind kind = DerivationStep::Kind::Collapse;
};

struct SaturateResult {
  enum class Status { Refuted, Saturated, Exhausted } status = Status::Exhausted;
  bool complete = false;  // saturated with provably nothing missing
  std::vector<StoredClause> store;
  std::optional<Derivation> derivation;
  Truncation truncation;
  SaturateStats stats;
};

namespace detail {

struct Saturator {
  const Monoid& m;
  const int n;
  const Limits& lim;
  SaturateResult res;

  std::vector<DerivationStep> steps;  // provenance per stored clause
  std::vector<Clause> store;
  std::map<Lit, std::vector<int>> by_lit;  // exact-literal index over the store

  struct PassiveOrder {
    const std::vector<Clause>* store;
    bool operator()(int a, int b) const {
      const Clause& ca = (*store)[static_cast<size_t>(a)];
      const Clause& cb = (*store)[static_cast<size_t>(b)];
      if (ca.size() != cb.size()) return ca.size() < cb.size();
      if (ca != cb) return ca < cb;
      return a < b;
    }
  };
  std::set<int, PassiveOrder> passive;
  std::vector<char> active;

  // (a,b) -> all (x,y,ω) with ω(x)=a, ω(y)=b;  (x,y) -> all (ω, (ω(x),ω(y))).
  std::map<Pair, std::vector<std::tuple<int, int, int>>> pre_pairs;
  std::map<Pair, std::vector<std::pair<int, Pair>>> images;
  std::map<Pair, std::vector<int>> active_by_pair;   // any literal on the pair
  std::map<Pair, std::vector<int>> active_by_weak;   // weak literals only

  int empty_clause = -1;

  Saturator(const Monoid& monoid, int universe, const Limits& limits)
      : m(monoid), n(universe), lim(limits), passive(PassiveOrder{&store}) {
    for (int w = 0; w < static_cast<int>(m.elements.size()); ++w) {
      const auto& t = m.elements[static_cast<size_t>(w)];
      for (int x = 0; x < n; ++x) {
        if (!t.defined(x)) continue;
        for (int y = 0; y < n; ++y) {
          if (!t.defined(y)) continue;
          pre_pairs[{t(x), t(y)}].emplace_back(x, y, w);
          images[{x, y}].emplace_back(w, Pair{t(x), t(y)});
        }
      }
    }
  }

  bool subsumed_by_store(const Clause& c) {
    std::map<int, size_t> hits;
    for (const Lit& l : c) {
      auto it = by_lit.find(l);
      if (it == by_lit.end()) continue;
      for (int ci : it->second)
        if (store[static_cast<size_t>(ci)].size() <= c.size() &&
            ++hits[ci] == store[static_cast<size_t>(ci)].size())
          return true;
    }
    return false;
  }

  // Returns the new clause id, or -1 when the clause was not kept.
  int insert(Clause c, DerivationStep step) {
    if (static_cast<int>(c.size()) > lim.max_width) {
      res.truncation.width = true;
      ++res.stats.width_dropped;
      return -1;
    }
    if (subsumed_by_store(c)) {
      ++res.stats.subsumed;
      return -1;
    }
    // A refutation is never lost to the store bound.
    if (!c.empty() && static_cast<int>(store.size()) >= lim.max_clauses) {
      res.truncation.store = true;
      return -1;
    }
    int id = static_cast<int>(store.size());
    step.result = c;
    store.push_back(std::move(c));
    steps.push_back(std::move(step));
    active.push_back(0);
    for (const Lit& l : store.back()) by_lit[l].push_back(id);
    passive.insert(id);
    ++res.stats.kept;
    if (store.back().empty()) empty_clause = id;
    return id;
  }

  void activate(int id) {
    active[static_cast<size_t>(id)] = 1;
    for (const Lit& l : store[static_cast<size_t>(id)]) {
      active_by_pair[{l.x, l.y}].push_back(id);
      if (!l.strict) active_by_weak[{l.x, l.y}].push_back(id);
    }
  }

  bool try_collapse(int left_id, int right_id, int omega, int omega_prime, Pair preimage,
                    Pair c_left, Pair c_right) {
    const Clause& L = store[static_cast<size_t>(left_id)];
    const Clause& R = store[static_cast<size_t>(right_id)];
    ++res.stats.collapses;
    DerivationStep st;
    st.kind = DerivationStep::Kind::Collapse;
    st.left = left_id;
    st.right = right_id;
    st.omega = omega;
    st.omega_prime = omega_prime;
    st.preimage = preimage;
    st.cancelled_left = c_left;
    st.cancelled_right = c_right;
    return insert(collapse_result(L, R, c_left, c_right), std::move(st)) >= 0;
  }

  bool has_weak_lit(const Clause& c, Pair p) {
    for (const Lit& l : c)
      if (Pair{l.x, l.y} == p) return !l.strict;
    return false;
  }
  bool has_pair(const Clause& c, Pair p) {
    for (const Lit& l : c)
      if (Pair{l.x, l.y} == p) return true;
    return false;
  }

  // All collapses where `given` is the left parent and the right parent is
  // active, then the converse.  Stops early on the empty clause or a full
  // store.
  bool pair_up(int given) {
    const Clause snapshot = store[static_cast<size_t>(given)];  // copy: store grows
    for (const Lit& l : snapshot) {
      if (l.strict) continue;  // left cancellation needs a weak literal
      Pair image{l.x, l.y};
      auto pre = pre_pairs.find(image);
      if (pre == pre_pairs.end()) continue;
      for (auto [x, y, omega] : pre->second) {
        auto img = images.find({y, x});
        if (img == images.end()) continue;
        for (auto [omega_prime, swapped] : img->second) {
          auto hit = active_by_pair.find(swapped);
          if (hit == active_by_pair.end()) continue;
          for (int right : hit->second) {
            if (!has_pair(store[static_cast<size_t>(right)], swapped)) continue;
            try_collapse(given, right, omega, omega_prime, {x, y}, image, swapped);
            if (empty_clause >= 0 || res.truncation.store) return false;
          }
        }
      }
    }
    for (const Lit& l : snapshot) {
      Pair swapped{l.x, l.y};
      auto pre = pre_pairs.find(swapped);
      if (pre == pre_pairs.end()) continue;
      for (auto [py, px, omega_prime] : pre->second) {
        // ω′(py)=swapped.first, ω′(px)=swapped.second: preimage pair is (px,py).
        auto img = images.find({px, py});
        if (img == images.end()) continue;
        for (auto [omega, image] : img->second) {
          auto hit = active_by_weak.find(image);
          if (hit == active_by_weak.end()) continue;
          for (int left : hit->second) {
            if (left == given) continue;  // both roles of (given,given) already done
            if (!has_weak_lit(store[static_cast<size_t>(left)], image)) continue;
            try_collapse(left, given, omega, omega_prime, {px, py}, image, swapped);
            if (empty_clause >= 0 || res.truncation.store) return false;
          }
        }
      }
    }
    return true;
  }

  Derivation extract(int final_id) {
    std::vector<int> order;
    std::vector<char> seen(steps.size(), 0);
    auto rec = [&](auto&& self, int id) -> void {
      if (seen[static_cast<size_t>(id)]) return;
      seen[static_cast<size_t>(id)] = 1;
      const DerivationStep& st = steps[static_cast<size_t>(id)];
      if (st.kind == DerivationStep::Kind::Collapse) {
        self(self, st.left);
        self(self, st.right);
      }
      order.push_back(id);
    };
    rec(rec, final_id);
    std::sort(order.begin(), order.end());
    std::vector<int> renumber(steps.size(), 0);
    Derivation d;
    for (size_t i = 0; i < order.size(); ++i) {
      DerivationStep st = steps[static_cast<size_t>(order[i])];
      renumber[static_cast<size_t>(order[i])] = static_cast<int>(i) + 1;
      st.id = static_cast<int>(i) + 1;
      if (st.kind == DerivationStep::Kind::Collapse) {
        st.left = renumber[static_cast<size_t>(st.left)];
        st.right = renumber[static_cast<size_t>(st.right)];
      }
      d.steps.push_back(std::move(st));
    }
    return d;
  }
};

}  // namespace detail

inline SaturateResult saturate(const OrderPair& raw, const Monoid& m, const Universe& u,
                               const Limits& lim = {}) {
  const int n = u.size();
  OrderPair data = normalize_data(raw, u);
  detail::Saturator sat(m, n, lim);

  // Observation axioms: a comparison forced by the data forbids its own
  // reversal.  Weak x≽y forbids y≻x; strict x≻y forbids y≽x.
  OrderPair icl = invariant_closure(data, m, n);
  for (auto [x, y] : icl.weak) {
    DerivationStep st;
    st.kind = DerivationStep::Kind::ObservationAxiom;
    st.observed = Lit{x, y, false};
    if (sat.insert(make_clause({{y, x, true}}), std::move(st)) >= 0) ++sat.res.stats.units;
  }
  for (auto [x, y] : icl.strict) {
    DerivationStep st;
    st.kind = DerivationStep::Kind::ObservationAxiom;
    st.observed = Lit{x, y, true};
    if (sat.insert(make_clause({{y, x, false}}), std::move(st)) >= 0) ++sat.res.stats.units;
  }

  // Every admissible forbidden subrelation of a broken cycle: reversals of
  // the gaps, strict anywhere if the cycle is strict, strict somewhere
  // otherwise.  Returns the number of clauses kept.
  auto push_cycle_axioms = [&](const BrokenCycle& bc) {
    int kept = 0;
    PairSet wset;
    for (const auto& link : bc.links) wset.insert({link.y, link.x});
    std::vector<Pair> w(wset.begin(), wset.end());
    if (static_cast<int>(w.size()) > lim.max_width) {
      sat.res.truncation.width = true;
      ++sat.res.stats.width_dropped;
      return kept;
    }
    unsigned masks = 1u << w.size();
    for (unsigned mask = bc.strict ? 0 : 1; mask < masks; ++mask) {
      std::vector<Lit> lits;
      for (size_t i = 0; i < w.size(); ++i)
        lits.push_back({w[i].first, w[i].second, ((mask >> i) & 1u) != 0});
      DerivationStep st;
      st.kind = DerivationStep::Kind::CycleAxiom;
      st.cycle = bc;
      if (sat.insert(make_clause(std::move(lits)), std::move(st)) >= 0) ++kept;
      if (sat.res.truncation.store) break;
    }
    return kept;
  };

  // Coherence axioms: reflexive comparisons chain any two (or three) pairs
  // into a broken cycle, so opposed rankings and transitivity violations over
  // arbitrary alternatives are forbidden outright.  These carry the case
  // analysis the pairing step cannot reconstruct from observed gaps alone.
  for (int x = 0; x < n && !sat.res.truncation.store; ++x)
    for (int y = x + 1; y < n && !sat.res.truncation.store; ++y) {
      BrokenCycle bc;
      bc.links.push_back({0, y, x});
      bc.links.push_back({0, x, y});
      sat.res.stats.coherence_clauses += push_cycle_axioms(bc);
    }
  long triple_estimate = n < 3 ? 0 : 7L * n * (n - 1) * (n - 2) / 3;
  if (triple_estimate > lim.max_triple_clauses) {
    sat.res.truncation.coherence = true;
  } else {
    for (int a = 0; a < n && !sat.res.truncation.store; ++a)
      for (int b = a + 1; b < n && !sat.res.truncation.store; ++b)
        for (int c = a + 1; c < n && !sat.res.truncation.store; ++c) {
          if (c == b) continue;
          BrokenCycle bc;
          bc.links.push_back({0, b, a});
          bc.links.push_back({0, c, b});
          bc.links.push_back({0, a, c});
          sat.res.stats.coherence_clauses += push_cycle_axioms(bc);
        }
  }

  // Broken-cycle axioms from the enumerated gap graph.
  CycleEnumeration enumeration = enumerate_broken_cycles(data, m, n, lim);
  sat.res.truncation = merge(sat.res.truncation, enumeration.truncation);
  sat.res.stats.cycles = static_cast<int>(enumeration.cycles.size());
  for (const BrokenCycle& bc : enumeration.cycles) {
    sat.res.stats.cycle_clauses += push_cycle_axioms(bc);
    if (sat.res.truncation.store) break;
  }

  // Given-clause loop.
  while (sat.empty_clause < 0 && !sat.res.truncation.store && !sat.passive.empty()) {
    int given = *sat.passive.begin();
    sat.passive.erase(sat.passive.begin());
    sat.activate(given);
    ++sat.res.stats.givens;
    if (!sat.pair_up(given)) break;
  }

  SaturateResult res = std::move(sat.res);
  for (size_t i = 0; i < sat.store.size(); ++i)
    res.store.push_back({sat.store[i], sat.steps[i].kind});
  if (sat.empty_clause >= 0) {
    res.status = SaturateResult::Status::Refuted;
    res.derivation = sat.extract(sat.empty_clause);
  } else if (res.truncation.store) {
    res.status = SaturateResult::Status::Exhausted;
  } else {
    res.status = SaturateResult::Status::Saturated;
    res.complete = m.closed && !res.truncation.any();
  }
  return res;
}

// ---------------------------------------------------------------------------
// Derivation checking

struct CheckReport {
  bool ok = true;
  int first_invalid = 0;  // step id, 0 when ok
  std::string reason;
};

namespace detail {

inline bool clause_strict_subset(const Clause& c, PairSet* w, PairSet* s) {
  for (const Lit& l : c) {
    w->insert({l.x, l.y});
    if (l.strict) s->insert({l.x, l.y});
  }
  return true;
}

}  // namespace detail

// Re-validates every step against the data and the family: axioms are
// re-derived from scratch, collapses are re-computed from their parents.
inline CheckReport check_derivation(const Derivation& d, const OrderPair& raw, const Monoid& m,
                                    const Universe& u) {
  const int n = u.size();
  OrderPair data = normalize_data(raw, u);
  OrderPair tcl = transitive_closure(data, n);
  OrderPair icl = invariant_closure(data, m, n);

  auto fail = [](int id, std::string why) {
    return CheckReport{false, id, std::move(why)};
  };

  for (size_t i = 0; i < d.steps.size(); ++i) {
    const DerivationStep& st = d.steps[i];
    int id = static_cast<int>(i) + 1;
    if (st.id != id) return fail(id, "step ids must be consecutive from 1");
    // Canonical clause form.
    if (make_clause(st.result) != st.result) return fail(id, "result clause not canonical");

    switch (st.kind) {
      case DerivationStep::Kind::ObservationAxiom: {
        if (!st.observed) return fail(id, "observation axiom without an observation");
        Pair p{st.observed->x, st.observed->y};
        Clause expect;
        if (st.observed->strict) {
          if (!icl.strict.count(p)) return fail(id, "pair is not a forced strict comparison");
          expect = make_clause({{p.second, p.first, false}});
        } else {
          if (!icl.weak.count(p)) return fail(id, "pair is not a forced weak comparison");
          expect = make_clause({{p.second, p.first, true}});
        }
        if (st.result != expect) return fail(id, "observation axiom clause mismatch");
        break;
      }
      case DerivationStep::Kind::CycleAxiom: {
        if (!st.cycle || st.cycle->links.empty()) return fail(id, "cycle axiom without links");
        const BrokenCycle& bc = *st.cycle;
        std::set<BrokenCycle::Link> distinct(bc.links.begin(), bc.links.end());
        if (distinct.size() != bc.links.size()) return fail(id, "cycle repeats a link");
        bool strict_seen = false;
        for (size_t k = 0; k < bc.links.size(); ++k) {
          const auto& link = bc.links[k];
          if (link.omega < 0 || link.omega >= static_cast<int>(m.elements.size()))
            return fail(id, "cycle link references an unknown transformation");
          const auto& t = m.elements[static_cast<size_t>(link.omega)];
          if (link.x < 0 || link.x >= n || link.y < 0 || link.y >= n ||
              !t.defined(link.x) || !t.defined(link.y))
            return fail(id, "cycle link gap outside the transformation's domain");
          const auto& next = bc.links[(k + 1) % bc.links.size()];
          const auto& tn = m.elements[static_cast<size_t>(next.omega)];
          Pair chain{t(link.x), tn(next.y)};
          if (!tcl.weak.count(chain)) return fail(id, "cycle chain comparison not derivable");
          strict_seen |= tcl.strict.count(chain) > 0;
        }
        if (bc.strict && !strict_seen) return fail(id, "cycle claims a strict chain it lacks");
        PairSet expect_w;
        for (const auto& link : bc.links) expect_w.insert({link.y, link.x});
        PairSet got_w, got_s;
        detail::clause_strict_subset(st.result, &got_w, &got_s);
        if (got_w != expect_w) return fail(id, "cycle axiom pairs mismatch the gaps");
        if (!bc.strict && got_s.empty())
          return fail(id, "a non-strict cycle needs a strict pair in the subrelation");
        break;
      }
      case DerivationStep::Kind::Collapse: {
        if (st.left < 1 || st.left >= id || st.right < 1 || st.right >= id)
          return fail(id, "collapse parents must be earlier steps");
        if (st.omega < 0 || st.omega >= static_cast<int>(m.elements.size()) ||
            st.omega_prime < 0 || st.omega_prime >= static_cast<int>(m.elements.size()))
          return fail(id, "collapse references an unknown transformation");
        const auto& t = m.elements[static_cast<size_t>(st.omega)];
        const auto& tp = m.elements[static_cast<size_t>(st.omega_prime)];
        auto [x, y] = st.preimage;
        if (x < 0 || x >= n || y < 0 || y >= n || !t.defined(x) || !t.defined(y) ||
            !tp.defined(x) || !tp.defined(y))
          return fail(id, "collapse pivot outside both domains");
        if (st.cancelled_left != Pair{t(x), t(y)})
          return fail(id, "left cancelled pair is not the transformed pivot");
        if (st.cancelled_right != Pair{tp(y), tp(x)})
          return fail(id, "right cancelled pair is not the reversed transformed pivot");
        const Clause& L = d.steps[static_cast<size_t>(st.left - 1)].result;
        const Clause& R = d.steps[static_cast<size_t>(st.right - 1)].result;
        bool left_ok = false;
        for (const Lit& l : L)
          left_ok |= Pair{l.x, l.y} == st.cancelled_left && !l.strict;
        if (!left_ok) return fail(id, "left parent lacks the cancelled weak pair");
        bool right_ok = false;
        for (const Lit& l : R) right_ok |= Pair{l.x, l.y} == st.cancelled_right;
        if (!right_ok) return fail(id, "right parent lacks the cancelled pair");
        if (st.result != collapse_result(L, R, st.cancelled_left, st.cancelled_right))
          return fail(id, "collapse result differs from the rule");
        break;
      }
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// General decision procedure

struct GeneralVerdict {
  Verdict verdict = Verdict::Unknown;
  std::optional<Derivation> derivation;      // when not rationalizable
  std::optional<CycleWitness> closure_cycle; // when refuted through the closure
  std::string reason;
  std::string engine;  // "commutative-total" | "closure-cycle" | "saturation" | "guard"
  Truncation truncation;
  SaturateStats stats;
};

namespace detail {

// A strict cycle in the forced comparisons refutes directly; the derivation
// is the two observation axioms at the ends of the witness plus one collapse
// through the identity.
inline Derivation closure_cycle_derivation(const CycleWitness& w) {
  int x0 = w.nodes.front();
  int xn = w.nodes.back();
  Derivation d;
  DerivationStep a1;
  a1.id = 1;
  a1.kind = DerivationStep::Kind::ObservationAxiom;
  a1.observed = Lit{xn, x0, true};  // forced strict x_N ≻ x_0
  a1.result = make_clause({{x0, xn, false}});
  DerivationStep a2;
  a2.id = 2;
  a2.kind = DerivationStep::Kind::ObservationAxiom;
  a2.observed = Lit{x0, xn, false};  // forced weak x_0 ≽ x_N
  a2.result = make_clause({{xn, x0, true}});
  DerivationStep c;
  c.id = 3;
  c.kind = DerivationStep::Kind::Collapse;
  c.left = 1;
  c.right = 2;
  c.omega = 0;  // identity sits at index 0
  c.omega_prime = 0;
  c.preimage = {x0, xn};
  c.cancelled_left = {x0, xn};
  c.cancelled_right = {xn, x0};
  c.result = {};
  d.steps = {std::move(a1), std::move(a2), std::move(c)};
  return d;
}

}  // namespace detail

inline GeneralVerdict decide_general(const OrderPair& raw, const Monoid& m, const Universe& u,
                                     const Limits& lim = {}) {
  const int n = u.size();
  OrderPair data = normalize_data(raw, u);
  GeneralVerdict out;

  // Commutative families of total transformations are decided outright by
  // the image closure.
  if (m.closed && m.total_modulo_empty() && is_commutative(m).commutative) {
    OrderPair closure = m_closure(data, m);
    out.engine = "commutative-total";
    if (auto cyc = find_cycle(closure, n)) {
      out.verdict = Verdict::NotRationalizable;
      out.closure_cycle = cyc;
      out.derivation = detail::closure_cycle_derivation(*cyc);
      out.reason = "image closure contains a weak cycle through a strict comparison";
    } else {
      out.verdict = Verdict::Rationalizable;
      out.reason = "image closure is acyclic for a commutative total family";
    }
    return out;
  }

  // A strict cycle among the forced comparisons refutes any family.
  OrderPair icl = invariant_closure(data, m, n);
  if (auto cyc = find_cycle(icl, n)) {
    out.engine = "closure-cycle";
    out.verdict = Verdict::NotRationalizable;
    out.closure_cycle = cyc;
    out.derivation = detail::closure_cycle_derivation(*cyc);
    out.reason = "forced comparisons contain a weak cycle through a strict comparison";
    return out;
  }

  if (n > lim.max_universe) {
    out.engine = "guard";
    out.reason = "universe too large for the saturation engine";
    return out;
  }
  if (static_cast<int>(gap_nodes(data, m, n).size()) > lim.max_gap_nodes) {
    out.engine = "guard";
    out.reason = "gap graph too large for the saturation engine";
    return out;
  }

  SaturateResult sr = saturate(data, m, u, lim);
  out.engine = "saturation";
  out.truncation = sr.truncation;
  out.stats = sr.stats;
  switch (sr.status) {
    case SaturateResult::Status::Refuted:
      out.verdict = Verdict::NotRationalizable;
      out.derivation = std::move(sr.derivation);
      out.reason = "derived the empty forbidden subrelation";
      break;
    case SaturateResult::Status::Saturated:
      if (sr.complete) {
        out.verdict = Verdict::Rationalizable;
        out.reason = "saturated without refutation and nothing was truncated";
      } else {
        out.reason = m.closed ? "saturated, but the search was truncated"
                              : "saturated, but the family itself was truncated";
      }
      break;
    case SaturateResult::Status::Exhausted:
      out.reason = "clause store limit reached before saturation";
      break;
  }
  return out;
}

}  // namespace invp
