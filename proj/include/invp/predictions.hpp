#pragma once

// Out-of-sample predictions.  A comparison x≽y (or x≻y) is forced when every
// admissible invariant preference extending the data contains it, which is
// exactly when the corresponding unit forbidden subrelation ⟨{(y,x)},{(y,x)}⟩
// (resp. ⟨{(y,x)},∅⟩) is derivable.  The scan over the saturated clause store
// is always sound; when saturation was truncated the remaining pairs are
// settled by per-pair solver queries, which are exact for closed families.

#include <invp/refutation.hpp>
#include <invp/sat.hpp>

#include <map>
#include <optional>
#include <string>

namespace invp {

struct ForcedComparisons {
  Verdict verdict = Verdict::Unknown;
  PairSet weak, strict;  // forced comparisons, diagonal omitted
  std::map<Pair, std::string> weak_how, strict_how;  // "observation" | "cycle" | "collapse" | "sat"
  bool exact = false;  // the sets are provably the complete forced sets
  std::string reason;
  Truncation truncation;
};

namespace detail {

inline std::string kind_tag(DerivationStep::Kind k) {
  switch (k) {
    case DerivationStep::Kind::ObservationAxiom: return "observation";
    case DerivationStep::Kind::CycleAxiom: return "cycle";
    case DerivationStep::Kind::Collapse: return "collapse";
  }
  return "collapse";
}

}  // namespace detail

inline ForcedComparisons forced_comparisons(const OrderPair& raw, const Monoid& m,
                                            const Universe& u, const Limits& lim = {},
                                            std::optional<unsigned> seed = std::nullopt) {
  const int n = u.size();
  OrderPair data = normalize_data(raw, u);
  ForcedComparisons out;

  SaturateResult sr = saturate(data, m, u, lim);
  out.truncation = sr.truncation;
  if (sr.status == SaturateResult::Status::Refuted) {
    out.verdict = Verdict::NotRationalizable;
    out.reason = "the data admit no invariant preference";
    return out;
  }

  // Unit clauses in the store are forced comparisons: ⟨{(y,x)},{(y,x)}⟩
  // forbids y≻x (so x≽y is forced), ⟨{(y,x)},∅⟩ forbids y≽x (so x≻y is).
  for (const StoredClause& sc : sr.store) {
    if (sc.lits.size() != 1) continue;
    const Lit& l = sc.lits.front();
    if (l.x == l.y) continue;
    Pair forced{l.y, l.x};
    if (l.strict) {
      if (out.weak.insert(forced).second) out.weak_how[forced] = detail::kind_tag(sc.kind);
    } else {
      if (out.strict.insert(forced).second) out.strict_how[forced] = detail::kind_tag(sc.kind);
    }
  }
  for (const Pair& p : out.strict)
    if (out.weak.insert(p).second) out.weak_how[p] = out.strict_how[p];

  if (sr.complete) {
    out.verdict = Verdict::Rationalizable;
    out.exact = true;
    out.reason = "saturation was complete; the unit scan is the full answer";
    return out;
  }

  // Solver fallback for the pairs the truncated saturation may have missed.
  SatEncoding enc = encode_phi(data, m, u);  // throws TooLargeError past 64 alternatives
  if (!solve_cnf(enc.cnf, seed)) {
    out.verdict = Verdict::NotRationalizable;
    out.weak.clear();
    out.strict.clear();
    out.weak_how.clear();
    out.strict_how.clear();
    out.reason = "the data admit no invariant preference";
    return out;
  }
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (x == y) continue;
      Pair p{x, y};
      if (!out.weak.count(p) && sat_forced_weak(enc, x, y, seed)) {
        out.weak.insert(p);
        out.weak_how[p] = "sat";
      }
      if (!out.strict.count(p) && sat_forced_strict(enc, x, y, seed)) {
        out.strict.insert(p);
        out.strict_how[p] = "sat";
      }
    }
  }
  for (const Pair& p : out.strict)
    if (out.weak.insert(p).second) out.weak_how[p] = "sat";

  if (m.closed) {
    out.verdict = Verdict::Rationalizable;
    out.exact = true;
    out.reason = "solver queries settled the pairs the truncated search left open";
  } else {
    out.verdict = Verdict::Unknown;
    out.exact = false;
    out.reason = "the family itself was truncated; forced sets are a sound lower bound";
  }
  return out;
}

}  // namespace invp
