#pragma once

// Plain-text rendering of refutation evidence: collapse derivations and
// image-closure cycle witnesses.  Rendering is one-way — traces are a report
// format, not an interchange format — and every emitter in the toolchain
// re-validates the object before printing it.

#include <sstream>
#include <string>

#include "invp/closure.hpp"
#include "invp/core.hpp"
#include "invp/refutation.hpp"

namespace invp {

inline std::string render_pair(Pair p, const Universe& u) {
  return "(" + u.label(p.first) + ", " + u.label(p.second) + ")";
}

// A forbidden subrelation prints as W={...} S={...}: W lists every pair the
// clause touches, S the subset whose strict comparison is ruled out.
inline std::string render_clause(const Clause& c, const Universe& u) {
  std::ostringstream w, s;
  bool first_w = true, first_s = true;
  for (const Lit& l : c) {
    (first_w ? w : w << ", ") << render_pair({l.x, l.y}, u);
    first_w = false;
    if (l.strict) {
      (first_s ? s : s << ", ") << render_pair({l.x, l.y}, u);
      first_s = false;
    }
  }
  return "W={" + w.str() + "} S={" + s.str() + "}";
}

namespace detail {

inline std::string transform_name(int idx, const Monoid& m) {
  if (idx < 0 || idx >= static_cast<int>(m.elements.size())) return "?";
  return m.elements[static_cast<size_t>(idx)].name;
}

}  // namespace detail

inline std::string render_step(const DerivationStep& st, const Universe& u, const Monoid& m) {
  std::ostringstream out;
  out << st.id << ". ";
  switch (st.kind) {
    case DerivationStep::Kind::ObservationAxiom:
      out << "observation " << (st.observed && st.observed->strict ? "strict " : "weak ")
          << (st.observed ? render_pair({st.observed->x, st.observed->y}, u) : std::string("?"));
      break;
    case DerivationStep::Kind::CycleAxiom: {
      out << "broken-cycle" << (st.cycle && st.cycle->strict ? " (strict)" : "") << " links:";
      if (st.cycle)
        for (const auto& link : st.cycle->links)
          out << " " << detail::transform_name(link.omega, m) << ":"
              << render_pair({link.x, link.y}, u);
      break;
    }
    case DerivationStep::Kind::Collapse:
      out << "collapse " << st.left << " with " << st.right << " via "
          << detail::transform_name(st.omega, m) << " / "
          << detail::transform_name(st.omega_prime, m) << " at " << render_pair(st.preimage, u)
          << ", cancelling " << render_pair(st.cancelled_left, u) << " | "
          << render_pair(st.cancelled_right, u);
      break;
  }
  out << "  =>  " << render_clause(st.result, u);
  return out.str();
}

inline std::string render_derivation(const Derivation& d, const Universe& u, const Monoid& m) {
  std::ostringstream out;
  out << "refutation trace (format_version 1)\n";
  out << "steps: " << d.steps.size() << "\n";
  for (const auto& st : d.steps) out << "  " << render_step(st, u, m) << "\n";
  if (!d.steps.empty() && d.steps.back().result.empty())
    out << "the final step derives the empty forbidden subrelation: no invariant preference "
           "rationalizes the data\n";
  return out.str();
}

// nodes = [x_0, ..., x_N]: each x_i is weakly above x_{i+1} in the image
// closure, and x_N is strictly above x_0, so the chain cannot be ordered.
inline std::string render_cycle_witness(const CycleWitness& w, const Universe& u) {
  std::ostringstream out;
  out << "closure cycle witness (format_version 1)\n  ";
  for (size_t i = 0; i < w.nodes.size(); ++i) {
    if (i) out << " >= ";
    out << u.label(w.nodes[i]);
  }
  if (!w.nodes.empty())
    out << "\n  with " << u.label(w.nodes.back()) << " > " << u.label(w.nodes.front())
        << " observed in the closure\n";
  return out.str();
}

}  // namespace invp
