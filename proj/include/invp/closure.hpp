#pragma once

// Closure operators over order pairs and the decision procedure for
// commutative families of total transformations:
//  - transitive_closure: reflexive-transitive reachability, tracking which
//    derived comparisons ride over at least one strict edge;
//  - m_closure: image closure under every transformation in the family;
//  - invariant_closure: the joint fixpoint of the two (all comparisons the
//    data provably forces on any invariant preference);
//  - find_cycle: a weak cycle through a strict edge, with a deterministic
//    minimal witness;
//  - is_commutative / decide_commutative: the fast path that decides
//    rationalizability by image closure + cycle check alone.

#include <invp/core.hpp>

#include <algorithm>
#include <deque>
#include <optional>
#include <string>
#include <vector>

namespace invp {

enum class Verdict { Rationalizable, NotRationalizable, Unknown, NotApplicable };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Rationalizable: return "rationalizable";
    case Verdict::NotRationalizable: return "not-rationalizable";
    case Verdict::Unknown: return "unknown";
    case Verdict::NotApplicable: return "not-applicable";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Transitive closure

namespace detail {

inline std::vector<std::vector<int>> adjacency(const PairSet& edges, int n, bool reversed) {
  std::vector<std::vector<int>> adj(static_cast<size_t>(n));
  for (auto [x, y] : edges) {
    if (reversed)
      adj[static_cast<size_t>(y)].push_back(x);
    else
      adj[static_cast<size_t>(x)].push_back(y);
  }
  return adj;
}

// Nodes reachable from start (start included).
inline std::vector<char> reachable(const std::vector<std::vector<int>>& adj, int start) {
  std::vector<char> seen(adj.size(), 0);
  std::deque<int> queue{start};
  seen[static_cast<size_t>(start)] = 1;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int w : adj[static_cast<size_t>(v)])
      if (!seen[static_cast<size_t>(w)]) {
        seen[static_cast<size_t>(w)] = 1;
        queue.push_back(w);
      }
  }
  return seen;
}

}  // namespace detail

// Weak part: x reaches y through weak edges (reflexive).  Strict part: some
// weak path from x to y crosses a strict edge — equivalently, for a strict
// edge (u,v): x reaches u and v reaches y.
inline OrderPair transitive_closure(const OrderPair& p, int n) {
  auto fwd = detail::adjacency(p.weak, n, false);
  auto bwd = detail::adjacency(p.weak, n, true);

  std::vector<std::vector<char>> fwd_reach(static_cast<size_t>(n));
  for (int x = 0; x < n; ++x) fwd_reach[static_cast<size_t>(x)] = detail::reachable(fwd, x);

  OrderPair out;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (fwd_reach[static_cast<size_t>(x)][static_cast<size_t>(y)]) out.weak.insert({x, y});

  for (auto [u, v] : p.strict) {
    std::vector<char> into_u = detail::reachable(bwd, u);
    const std::vector<char>& from_v = fwd_reach[static_cast<size_t>(v)];
    for (int x = 0; x < n; ++x) {
      if (!into_u[static_cast<size_t>(x)]) continue;
      for (int y = 0; y < n; ++y)
        if (from_v[static_cast<size_t>(y)]) out.strict.insert({x, y});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Image closure under the transformation family

inline OrderPair m_closure(const OrderPair& p, const Monoid& m) {
  OrderPair out = p;
  for (const auto& t : m.elements) {
    for (auto [x, y] : p.weak)
      if (t.defined(x) && t.defined(y)) out.weak.insert({t(x), t(y)});
    for (auto [x, y] : p.strict)
      if (t.defined(x) && t.defined(y)) out.strict.insert({t(x), t(y)});
  }
  return out;
}

// Joint fixpoint of image closure and transitive closure: every comparison
// any invariant weak order extending the data must contain.
inline OrderPair invariant_closure(const OrderPair& p, const Monoid& m, int n) {
  OrderPair cur = p;
  for (;;) {
    OrderPair next = transitive_closure(m_closure(cur, m), n);
    if (next == cur) return cur;
    cur = std::move(next);
  }
}

// ---------------------------------------------------------------------------
// Cycle detection

struct CycleWitness {
  // nodes = [x_0, ..., x_N]: x_0 ≿ x_1 ≿ ... ≿ x_N and x_N ≻ x_0.
  std::vector<int> nodes;
};

namespace detail {

// Tarjan-free SCC: Kosaraju with two passes.
inline std::vector<int> scc_ids(const PairSet& edges, int n) {
  auto fwd = adjacency(edges, n, false);
  auto bwd = adjacency(edges, n, true);
  std::vector<int> order;
  order.reserve(static_cast<size_t>(n));
  std::vector<char> seen(static_cast<size_t>(n), 0);
  for (int s = 0; s < n; ++s) {
    if (seen[static_cast<size_t>(s)]) continue;
    // Iterative post-order.
    std::vector<std::pair<int, size_t>> stack{{s, 0}};
    seen[static_cast<size_t>(s)] = 1;
    while (!stack.empty()) {
      auto& [v, i] = stack.back();
      if (i < fwd[static_cast<size_t>(v)].size()) {
        int w = fwd[static_cast<size_t>(v)][i++];
        if (!seen[static_cast<size_t>(w)]) {
          seen[static_cast<size_t>(w)] = 1;
          stack.push_back({w, 0});
        }
      } else {
        order.push_back(v);
        stack.pop_back();
      }
    }
  }
  std::vector<int> comp(static_cast<size_t>(n), -1);
  int next_id = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (comp[static_cast<size_t>(*it)] >= 0) continue;
    std::deque<int> queue{*it};
    comp[static_cast<size_t>(*it)] = next_id;
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      for (int w : bwd[static_cast<size_t>(v)])
        if (comp[static_cast<size_t>(w)] < 0) {
          comp[static_cast<size_t>(w)] = next_id;
          queue.push_back(w);
        }
    }
    ++next_id;
  }
  return comp;
}

}  // namespace detail

// A cycle is a weak cycle traversing at least one strict edge.  Returns the
// hop-minimal witness through the lexicographically smallest qualifying
// strict edge, with lexicographic tie-breaking on the path itself.
inline std::optional<CycleWitness> find_cycle(const OrderPair& p, int n) {
  std::vector<int> comp = detail::scc_ids(p.weak, n);
  const Pair* chosen = nullptr;
  for (const Pair& e : p.strict) {  // std::set iterates in lex order
    if (comp[static_cast<size_t>(e.first)] == comp[static_cast<size_t>(e.second)]) {
      chosen = &e;
      break;
    }
  }
  if (!chosen) return std::nullopt;
  auto [src, dst] = *chosen;  // strict edge src ≻ dst closes the cycle
  if (src == dst) return CycleWitness{{src}};

  // Hop-minimal weak path dst -> src: BFS distances to src, then a greedy
  // walk always taking the smallest-id successor one step closer.
  auto bwd = detail::adjacency(p.weak, n, true);
  std::vector<int> dist(static_cast<size_t>(n), -1);
  std::deque<int> queue{src};
  dist[static_cast<size_t>(src)] = 0;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int w : bwd[static_cast<size_t>(v)])
      if (dist[static_cast<size_t>(w)] < 0) {
        dist[static_cast<size_t>(w)] = dist[static_cast<size_t>(v)] + 1;
        queue.push_back(w);
      }
  }
  auto fwd = detail::adjacency(p.weak, n, false);
  for (auto& row : fwd) std::sort(row.begin(), row.end());
  CycleWitness w;
  int cur = dst;
  w.nodes.push_back(cur);
  while (cur != src) {
    for (int nxt : fwd[static_cast<size_t>(cur)]) {
      if (dist[static_cast<size_t>(nxt)] == dist[static_cast<size_t>(cur)] - 1) {
        cur = nxt;
        break;
      }
    }
    w.nodes.push_back(cur);
  }
  return w;
}

// ---------------------------------------------------------------------------
// Commutativity

struct CommutativityReport {
  bool commutative = true;
  // On failure: indices (into monoid.elements) of the offending pair and an
  // alternative where the two compositions disagree.
  int left = -1;
  int right = -1;
  int point = -1;
};

// Compositions must agree extensionally, domains included.  Checking the
// generator pairs suffices: equalities between generators lift to all words.
inline CommutativityReport is_commutative(const Monoid& m) {
  std::vector<int> gens = m.generators;
  if (gens.empty()) {  // hand-built family: compare every pair of elements
    for (size_t i = 0; i < m.elements.size(); ++i) gens.push_back(static_cast<int>(i));
  }
  for (size_t i = 0; i < gens.size(); ++i)
    for (size_t j = i + 1; j < gens.size(); ++j) {
      const auto& a = m.elements[static_cast<size_t>(gens[i])];
      const auto& b = m.elements[static_cast<size_t>(gens[j])];
      PartialTransform ab = compose(a, b);
      PartialTransform ba = compose(b, a);
      if (ab.same_map(ba)) continue;
      CommutativityReport rep;
      rep.commutative = false;
      rep.left = gens[i];
      rep.right = gens[j];
      for (int x = 0; x < ab.size(); ++x)
        if (ab.image[static_cast<size_t>(x)] != ba.image[static_cast<size_t>(x)]) {
          rep.point = x;
          break;
        }
      return rep;
    }
  return {};
}

// ---------------------------------------------------------------------------
// Commutative decision procedure

struct CommutativeVerdict {
  Verdict verdict = Verdict::NotApplicable;
  std::optional<CycleWitness> witness;
  std::string reason;
  OrderPair closure;  // image closure of the normalized data
};

// For a commutative, composition-closed family the data are rationalizable
// iff the image closure is acyclic — provided every transformation is total
// (empty domains are inert).  A cycle refutes regardless of totality; an
// acyclic closure certifies only in the total case, so partial families fall
// through to the general engine.
inline CommutativeVerdict decide_commutative(const OrderPair& raw, const Monoid& m,
                                             const Universe& u) {
  CommutativeVerdict out;
  if (!m.closed) {
    out.reason = "transformation family was truncated before closing under composition";
    return out;
  }
  CommutativityReport rep = is_commutative(m);
  if (!rep.commutative) {
    out.reason = "transformations do not commute: " +
                 m.elements[static_cast<size_t>(rep.left)].name + " vs " +
                 m.elements[static_cast<size_t>(rep.right)].name + " at " +
                 (rep.point >= 0 ? u.label(rep.point) : std::string("?"));
    return out;
  }
  OrderPair data = normalize_data(raw, u);
  out.closure = m_closure(data, m);
  if (auto cyc = find_cycle(out.closure, u.size())) {
    out.verdict = Verdict::NotRationalizable;
    out.witness = std::move(cyc);
    out.reason = "image closure contains a weak cycle through a strict comparison";
    return out;
  }
  if (!m.total_modulo_empty()) {
    out.reason = "acyclic image closure, but partial transformations need the general engine";
    return out;
  }
  out.verdict = Verdict::Rationalizable;
  out.reason = "image closure is acyclic for a commutative total family";
  return out;
}

}  // namespace invp
