#pragma once

// Propositional oracle: encodes "some complete, transitive, coherent,
// invariant preference extends the data" as CNF over atoms [x≽y] and [x≻y],
// solves it with a deterministic DPLL, and answers forcing queries by
// refutation (a comparison is forced iff its denial is unsatisfiable).

#include <invp/closure.hpp>
#include <invp/core.hpp>

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace invp {

struct TooLargeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Atoms: weak(x,y) then strict(x,y), 1-based, 2n² variables in total.

struct VarTable {
  int n = 0;
  int weak_var(int x, int y) const { return 1 + x * n + y; }
  int strict_var(int x, int y) const { return 1 + n * n + x * n + y; }
  int count() const { return 2 * n * n; }

  // Reverse lookup for reports: (is_strict, x, y).
  std::tuple<bool, int, int> atom(int var) const {
    int v = var - 1;
    bool strict = v >= n * n;
    if (strict) v -= n * n;
    return {strict, v / n, v % n};
  }
};

// ---------------------------------------------------------------------------
// Clause store with hygiene: literals sorted and deduplicated, tautologies
// and repeated clauses dropped, insertion order kept otherwise.

struct Cnf {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;

  // Returns true if the clause was stored (false: tautology or duplicate).
  bool add_clause(std::vector<int> lits) {
    std::sort(lits.begin(), lits.end(), [](int a, int b) {
      int va = std::abs(a), vb = std::abs(b);
      return va != vb ? va < vb : a < b;
    });
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (size_t i = 0; i + 1 < lits.size(); ++i)
      if (lits[i] == -lits[i + 1]) return false;  // x ∨ ¬x
    if (seen_.count(lits)) return false;
    seen_.insert(lits);
    clauses.push_back(std::move(lits));
    return true;
  }

 private:
  std::set<std::vector<int>> seen_;
};

// ---------------------------------------------------------------------------
// Encoding

struct SatEncoding {
  VarTable vars;
  Cnf cnf;
};

// Clause groups, in insertion order:
//   completeness   [x≽y] ∨ [y≽x]
//   coherency      ¬[x≽y] ∨ ¬[y≻x]   and   [x≽y] ∨ [y≻x]
//   transitivity   ¬[x≽y] ∨ ¬[y≽z] ∨ [x≽z]
//   observations   unit clauses from the normalized data
//   invariance     [x≽y] ↔ [ω(x)≽ω(y)] for every ω and x,y in its domain
inline SatEncoding encode_phi(const OrderPair& raw, const Monoid& m, const Universe& u) {
  const int n = u.size();
  if (n > 64) throw TooLargeError("propositional encoding supports at most 64 alternatives");
  SatEncoding enc;
  enc.vars.n = n;
  enc.cnf.num_vars = enc.vars.count();
  const VarTable& V = enc.vars;

  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) enc.cnf.add_clause({V.weak_var(x, y), V.weak_var(y, x)});

  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      enc.cnf.add_clause({-V.weak_var(x, y), -V.strict_var(y, x)});
      enc.cnf.add_clause({V.weak_var(x, y), V.strict_var(y, x)});
    }

  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z)
        enc.cnf.add_clause({-V.weak_var(x, y), -V.weak_var(y, z), V.weak_var(x, z)});

  OrderPair data = normalize_data(raw, u);
  for (auto [x, y] : data.weak) enc.cnf.add_clause({V.weak_var(x, y)});
  for (auto [x, y] : data.strict) enc.cnf.add_clause({V.strict_var(x, y)});

  for (const auto& t : m.elements)
    for (int x = 0; x < n; ++x) {
      if (!t.defined(x)) continue;
      for (int y = 0; y < n; ++y) {
        if (!t.defined(y)) continue;
        enc.cnf.add_clause({-V.weak_var(x, y), V.weak_var(t(x), t(y))});
        enc.cnf.add_clause({V.weak_var(x, y), -V.weak_var(t(x), t(y))});
      }
    }
  return enc;
}

// ---------------------------------------------------------------------------
// DPLL with two watched literals, unit propagation, and chronological
// backtracking.  Branching is deterministic: the unassigned variable of
// smallest rank, tried true first.  A seed permutes only the variable rank
// order, never the polarity.

class DpllSolver {
 public:
  DpllSolver(const Cnf& cnf, std::optional<unsigned> seed = std::nullopt)
      : nv_(cnf.num_vars), clauses_(cnf.clauses) {
    assign_.assign(static_cast<size_t>(nv_) + 1, 0);
    watchers_.assign(2 * (static_cast<size_t>(nv_) + 1), {});
    by_rank_.resize(static_cast<size_t>(nv_));
    for (int v = 1; v <= nv_; ++v) by_rank_[static_cast<size_t>(v - 1)] = v;
    if (seed) {
      std::mt19937 eng(*seed);
      std::shuffle(by_rank_.begin(), by_rank_.end(), eng);
    }
    for (size_t ci = 0; ci < clauses_.size(); ++ci) {
      const auto& cl = clauses_[ci];
      if (cl.empty()) {
        contradictory_ = true;
      } else if (cl.size() == 1) {
        initial_units_.push_back(cl[0]);
      } else {
        watchers_[code(cl[0])].push_back(static_cast<int>(ci));
        watchers_[code(cl[1])].push_back(static_cast<int>(ci));
      }
    }
  }

  // Satisfying assignment indexed by variable (entry 0 unused), or nullopt.
  std::optional<std::vector<bool>> solve() {
    if (contradictory_) return std::nullopt;
    for (int lit : initial_units_)
      if (!enqueue(lit)) return std::nullopt;
    for (;;) {
      if (!propagate()) {
        while (!frames_.empty() && frames_.back().flipped) {
          undo_to(frames_.back().mark);
          frames_.pop_back();
        }
        if (frames_.empty()) return std::nullopt;
        Frame f = frames_.back();
        frames_.pop_back();
        undo_to(f.mark);
        frames_.push_back({f.var, f.mark, true});
        enqueue(-f.var);
        continue;
      }
      int var = 0;
      for (int v : by_rank_)
        if (assign_[static_cast<size_t>(v)] == 0) {
          var = v;
          break;
        }
      if (var == 0) {
        std::vector<bool> model(static_cast<size_t>(nv_) + 1, false);
        for (int v = 1; v <= nv_; ++v) model[static_cast<size_t>(v)] = assign_[static_cast<size_t>(v)] > 0;
        return model;
      }
      frames_.push_back({var, trail_.size(), false});
      enqueue(var);
    }
  }

 private:
  struct Frame {
    int var;
    size_t mark;
    bool flipped;
  };

  static size_t code(int lit) {
    return 2 * static_cast<size_t>(std::abs(lit)) + (lit < 0 ? 1 : 0);
  }
  bool is_true(int lit) const {
    int v = assign_[static_cast<size_t>(std::abs(lit))];
    return lit > 0 ? v > 0 : v < 0;
  }
  bool is_false(int lit) const {
    int v = assign_[static_cast<size_t>(std::abs(lit))];
    return lit > 0 ? v < 0 : v > 0;
  }

  bool enqueue(int lit) {
    if (is_true(lit)) return true;
    if (is_false(lit)) return false;
    assign_[static_cast<size_t>(std::abs(lit))] = lit > 0 ? 1 : -1;
    trail_.push_back(lit);
    return true;
  }

  void undo_to(size_t mark) {
    while (trail_.size() > mark) {
      assign_[static_cast<size_t>(std::abs(trail_.back()))] = 0;
      trail_.pop_back();
    }
    qhead_ = trail_.size();
  }

  bool propagate() {
    while (qhead_ < trail_.size()) {
      int made_false = -trail_[qhead_++];
      auto& wl = watchers_[code(made_false)];
      std::vector<int> keep;
      keep.reserve(wl.size());
      bool conflict = false;
      for (size_t wi = 0; wi < wl.size(); ++wi) {
        int ci = wl[wi];
        auto& cl = clauses_[static_cast<size_t>(ci)];
        if (cl[0] != made_false) std::swap(cl[0], cl[1]);
        if (is_true(cl[1])) {
          keep.push_back(ci);
          continue;
        }
        bool moved = false;
        for (size_t k = 2; k < cl.size(); ++k)
          if (!is_false(cl[k])) {
            std::swap(cl[0], cl[k]);
            watchers_[code(cl[0])].push_back(ci);
            moved = true;
            break;
          }
        if (moved) continue;
        keep.push_back(ci);
        if (!enqueue(cl[1])) {
          for (size_t rest = wi + 1; rest < wl.size(); ++rest) keep.push_back(wl[rest]);
          conflict = true;
          break;
        }
      }
      wl = std::move(keep);
      if (conflict) return false;
    }
    return true;
  }

  int nv_;
  std::vector<std::vector<int>> clauses_;
  std::vector<std::vector<int>> watchers_;
  std::vector<int> assign_;
  std::vector<int> trail_;
  size_t qhead_ = 0;
  std::vector<Frame> frames_;
  std::vector<int> by_rank_;
  std::vector<int> initial_units_;
  bool contradictory_ = false;
};

inline std::optional<std::vector<bool>> solve_cnf(const Cnf& cnf,
                                                  std::optional<unsigned> seed = std::nullopt) {
  return DpllSolver(cnf, seed).solve();
}

// ---------------------------------------------------------------------------
// Decision, forcing queries, model enumeration

struct SatDecision {
  Verdict verdict = Verdict::Unknown;
  std::optional<OrderPair> order;  // a certifying preference when rationalizable
};

namespace detail {

inline OrderPair extract_order(const std::vector<bool>& model, const VarTable& V) {
  OrderPair out;
  for (int x = 0; x < V.n; ++x)
    for (int y = 0; y < V.n; ++y) {
      if (model[static_cast<size_t>(V.weak_var(x, y))]) out.weak.insert({x, y});
      if (model[static_cast<size_t>(V.strict_var(x, y))]) out.strict.insert({x, y});
    }
  return out;
}

// Independent re-check of every property the encoding promises.  A failure
// here is a bug in the encoding or solver, never a property of the input.
inline void verify_model(const OrderPair& o, const OrderPair& data, const Monoid& m, int n) {
  auto fail = [](const char* what) {
    throw std::logic_error(std::string("sat model verification failed: ") + what);
  };
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (!o.weak.count({x, y}) && !o.weak.count({y, x})) fail("completeness");
  for (auto [x, y] : o.weak)
    for (auto [y2, z] : o.weak)
      if (y2 == y && !o.weak.count({x, z})) fail("transitivity");
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (o.strict.count({x, y}) == o.weak.count({y, x})) fail("coherency");
  for (auto pr : data.weak)
    if (!o.weak.count(pr)) fail("weak observation dropped");
  for (auto pr : data.strict)
    if (!o.strict.count(pr)) fail("strict observation dropped");
  for (const auto& t : m.elements)
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        if (!t.defined(x) || !t.defined(y)) continue;
        if (o.weak.count({x, y}) != o.weak.count({t(x), t(y)})) fail("weak invariance");
        if (o.strict.count({x, y}) != o.strict.count({t(x), t(y)})) fail("strict invariance");
      }
}

}  // namespace detail

inline SatDecision sat_decide(const OrderPair& raw, const Monoid& m, const Universe& u,
                              std::optional<unsigned> seed = std::nullopt) {
  SatEncoding enc = encode_phi(raw, m, u);
  SatDecision out;
  auto model = solve_cnf(enc.cnf, seed);
  if (!model) {
    out.verdict = Verdict::NotRationalizable;
    return out;
  }
  OrderPair order = detail::extract_order(*model, enc.vars);
  detail::verify_model(order, normalize_data(raw, u), m, u.size());
  out.verdict = Verdict::Rationalizable;
  out.order = std::move(order);
  return out;
}

// x ≽ y in every model  ⟺  Φ ∪ {[y≻x]} is unsatisfiable.
inline bool sat_forced_weak(const SatEncoding& enc, int x, int y,
                            std::optional<unsigned> seed = std::nullopt) {
  Cnf q = enc.cnf;
  q.add_clause({enc.vars.strict_var(y, x)});
  return !solve_cnf(q, seed).has_value();
}

// x ≻ y in every model  ⟺  Φ ∪ {[y≽x]} is unsatisfiable.
inline bool sat_forced_strict(const SatEncoding& enc, int x, int y,
                              std::optional<unsigned> seed = std::nullopt) {
  Cnf q = enc.cnf;
  q.add_clause({enc.vars.weak_var(y, x)});
  return !solve_cnf(q, seed).has_value();
}

// All invariant complete preferences extending the data, via full-assignment
// blocking clauses.  Distinct models differ in their weak part because the
// strict atoms are functionally determined.
inline std::vector<OrderPair> enumerate_models(const OrderPair& raw, const Monoid& m,
                                               const Universe& u,
                                               size_t max_models = SIZE_MAX) {
  SatEncoding enc = encode_phi(raw, m, u);
  std::vector<OrderPair> out;
  while (out.size() < max_models) {
    auto model = solve_cnf(enc.cnf);
    if (!model) break;
    out.push_back(detail::extract_order(*model, enc.vars));
    std::vector<int> block;
    block.reserve(static_cast<size_t>(enc.cnf.num_vars));
    for (int v = 1; v <= enc.cnf.num_vars; ++v)
      block.push_back((*model)[static_cast<size_t>(v)] ? -v : v);
    enc.cnf.add_clause(std::move(block));
  }
  return out;
}

// ---------------------------------------------------------------------------
// DIMACS export with an atom map in the comments.

inline std::string to_dimacs(const SatEncoding& enc, const Universe& u) {
  std::ostringstream os;
  const VarTable& V = enc.vars;
  for (int v = 1; v <= enc.cnf.num_vars; ++v) {
    auto [strict, x, y] = V.atom(v);
    os << "c var " << v << " = " << (strict ? "strict(" : "weak(") << u.label(x) << ","
       << u.label(y) << ")\n";
  }
  os << "p cnf " << enc.cnf.num_vars << ' ' << enc.cnf.clauses.size() << '\n';
  for (const auto& cl : enc.cnf.clauses) {
    for (int lit : cl) os << lit << ' ';
    os << "0\n";
  }
  return os.str();
}

}  // namespace invp
