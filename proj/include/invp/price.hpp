#pragma once

// Revealed-preference tests on price–consumption data:
//  - revealed_pair: the budget-inequality comparisons between observed
//    bundles (weak when affordable, strict when strictly cheaper);
//  - quasilinear_check / homothetic_check / translation_check: closed-form
//    negative-cycle tests for rationalizability by a preference that is
//    invariant under payments, scalings, or portfolio shifts respectively;
//  - garp_check: acyclicity of the revealed comparisons themselves;
//  - CSV ingestion (one row per observation: L price columns, L quantity
//    columns, header row required).
//
// All comparisons on the decision path use exact rational arithmetic; the
// conditions are strict inequalities and float ties would be unsound.

#include <invp/closure.hpp>
#include <invp/core.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace invp {

using Rational = boost::multiprecision::cpp_rational;

struct PriceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : PriceError {
  using PriceError::PriceError;
};

struct PriceObservation {
  std::vector<Rational> price;   // strictly positive componentwise
  std::vector<Rational> bundle;  // non-negative componentwise
};

struct PriceDataset {
  std::vector<PriceObservation> obs;
  int dimension() const { return obs.empty() ? 0 : static_cast<int>(obs.front().price.size()); }
  int size() const { return static_cast<int>(obs.size()); }
};

namespace detail {

inline Rational dot(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  Rational s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

// Structural validation shared by every entry point.
inline void validate_dataset(const PriceDataset& ds) {
  if (ds.obs.empty()) throw PriceError("dataset has no observations");
  size_t L = ds.obs.front().price.size();
  if (L < 1) throw DimensionMismatch("dimension must be at least 1");
  for (size_t k = 0; k < ds.obs.size(); ++k) {
    const PriceObservation& o = ds.obs[k];
    if (o.price.size() != L || o.bundle.size() != L)
      throw DimensionMismatch("observation " + std::to_string(k + 1) +
                              " does not match dimension " + std::to_string(L));
    for (const Rational& p : o.price)
      if (p <= 0)
        throw PriceError("observation " + std::to_string(k + 1) + " has a non-positive price");
    for (const Rational& x : o.bundle)
      if (x < 0)
        throw PriceError("observation " + std::to_string(k + 1) + " has a negative quantity");
  }
}

// ---------------------------------------------------------------------------
// Revealed comparisons between observed bundles

struct RevealedPreference {
  Universe universe;           // one node per distinct bundle
  OrderPair data;              // weak: affordable at the chooser's prices; strict: strictly cheaper
  std::vector<int> bundle_of;  // observation index -> universe node
};

namespace detail {

inline std::string bundle_label(const std::vector<Rational>& x) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < x.size(); ++i) {
    if (i) os << ",";
    os << x[i];
  }
  os << ")";
  return os.str();
}

}  // namespace detail

inline RevealedPreference revealed_pair(const PriceDataset& ds) {
  validate_dataset(ds);
  std::map<std::vector<Rational>, int> node_of;
  std::vector<std::string> labels;
  std::vector<const std::vector<Rational>*> bundles;
  std::vector<int> bundle_of;
  for (const PriceObservation& o : ds.obs) {
    auto [it, fresh] = node_of.insert({o.bundle, static_cast<int>(labels.size())});
    if (fresh) {
      labels.push_back(detail::bundle_label(o.bundle));
      bundles.push_back(&it->first);
    }
    bundle_of.push_back(it->second);
  }
  RevealedPreference rp{Universe(labels), {}, std::move(bundle_of)};
  for (int k = 0; k < ds.size(); ++k) {
    const PriceObservation& o = ds.obs[static_cast<size_t>(k)];
    Rational spent = detail::dot(o.price, o.bundle);
    for (size_t j = 0; j < bundles.size(); ++j) {
      Rational cost = detail::dot(o.price, *bundles[j]);
      if (spent >= cost) rp.data.weak.insert({rp.bundle_of[static_cast<size_t>(k)], static_cast<int>(j)});
      if (spent > cost) rp.data.strict.insert({rp.bundle_of[static_cast<size_t>(k)], static_cast<int>(j)});
    }
  }
  for (int j = 0; j < rp.universe.size(); ++j) rp.data.weak.insert({j, j});
  return rp;
}

// ---------------------------------------------------------------------------
// Negative-cycle tests

struct PriceCheck {
  bool pass = true;
  std::vector<int> cycle;  // observation indices; edges run cycle[t] -> cycle[t+1], wrapping
  Rational margin = 0;     // the witness cycle's total: sum (additive) or product (multiplicative)
};

namespace detail {

// Exact Bellman–Ford negative-cycle detection on a complete digraph given by
// a weight matrix. Additive flavour looks for a cycle summing below zero;
// multiplicative flavour (all weights positive) for a cycle multiplying
// below one. Deterministic: edges relax in lexicographic order and the first
// improvement of the final pass is taken.
inline std::optional<std::vector<int>> negative_cycle(const std::vector<std::vector<Rational>>& w,
                                                      bool multiplicative) {
  const int k = static_cast<int>(w.size());
  std::vector<Rational> dist(static_cast<size_t>(k), multiplicative ? Rational(1) : Rational(0));
  std::vector<int> pred(static_cast<size_t>(k), -1);
  int improved = -1;
  for (int pass = 0; pass < k && improved < 0; ++pass) {
    bool moved = false;
    for (int i = 0; i < k && improved < 0; ++i) {
      for (int j = 0; j < k; ++j) {
        if (i == j) continue;
        const auto si = static_cast<size_t>(i);
        const auto sj = static_cast<size_t>(j);
        Rational cand = multiplicative ? Rational(dist[si] * w[si][sj]) : Rational(dist[si] + w[si][sj]);
        if (cand < dist[sj]) {
          dist[sj] = cand;
          pred[sj] = i;
          moved = true;
          if (pass == k - 1) {
            improved = j;
            break;
          }
        }
      }
    }
    if (!moved) return std::nullopt;  // early fixpoint: no negative cycle
  }
  if (improved < 0) return std::nullopt;

  // An improvement on the k-th pass sits on a predecessor chain of length at
  // least k, so walking k steps back lands inside a predecessor cycle.
  int v = improved;
  for (int s = 0; s < k; ++s) v = pred[static_cast<size_t>(v)];
  std::vector<int> cyc{v};
  for (int c = pred[static_cast<size_t>(v)]; c != v; c = pred[static_cast<size_t>(c)]) cyc.push_back(c);
  // The walk runs against the edges; flip it and start at the smallest index.
  std::reverse(cyc.begin(), cyc.end());
  auto mn = std::min_element(cyc.begin(), cyc.end());
  std::rotate(cyc.begin(), mn, cyc.end());
  return cyc;
}

// Recompute a witness cycle's total exactly; this is the re-verification the
// callers expose through PriceCheck::margin.
inline Rational cycle_total(const std::vector<std::vector<Rational>>& w, const std::vector<int>& cyc,
                            bool multiplicative) {
  Rational total = multiplicative ? 1 : 0;
  for (size_t t = 0; t < cyc.size(); ++t) {
    const auto i = static_cast<size_t>(cyc[t]);
    const auto j = static_cast<size_t>(cyc[(t + 1) % cyc.size()]);
    if (multiplicative)
      total *= w[i][j];
    else
      total += w[i][j];
  }
  return total;
}

inline PriceCheck run_cycle_test(const std::vector<std::vector<Rational>>& w, bool multiplicative) {
  PriceCheck out;
  out.margin = multiplicative ? 1 : 0;
  if (auto cyc = negative_cycle(w, multiplicative)) {
    out.pass = false;
    out.cycle = *cyc;
    out.margin = cycle_total(w, *cyc, multiplicative);
    if (multiplicative ? !(out.margin < 1) : !(out.margin < 0))
      throw std::logic_error("cycle witness failed exact re-verification");
  }
  return out;
}

}  // namespace detail

// Rationalizability by a quasilinear preference (invariant under transfers of
// the numeraire, the last coordinate). Prices are normalized so the numeraire
// price is one; a violation is a cycle of observations whose non-numeraire
// expenditure differences sum below zero.
inline PriceCheck quasilinear_check(const PriceDataset& ds) {
  validate_dataset(ds);
  const int k = ds.size();
  const size_t L = static_cast<size_t>(ds.dimension());
  std::vector<std::vector<Rational>> w(static_cast<size_t>(k),
                                       std::vector<Rational>(static_cast<size_t>(k), 0));
  for (int i = 0; i < k; ++i) {
    const PriceObservation& oi = ds.obs[static_cast<size_t>(i)];
    Rational numeraire = oi.price[L - 1];
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      const PriceObservation& oj = ds.obs[static_cast<size_t>(j)];
      Rational s = 0;
      for (size_t l = 0; l + 1 < L; ++l)
        s += (oi.price[l] / numeraire) * (oj.bundle[l] - oi.bundle[l]);
      w[static_cast<size_t>(i)][static_cast<size_t>(j)] = s;
    }
  }
  return detail::run_cycle_test(w, /*multiplicative=*/false);
}

// Rationalizability by a homothetic preference (invariant under positive
// scalings). Prices are normalized so each observation's expenditure is one;
// a violation is a cycle whose cross-expenditure products multiply below one.
inline PriceCheck homothetic_check(const PriceDataset& ds) {
  validate_dataset(ds);
  const int k = ds.size();
  std::vector<Rational> scale;
  for (const PriceObservation& o : ds.obs) {
    Rational spent = detail::dot(o.price, o.bundle);
    if (spent <= 0)
      throw PriceError("zero expenditure cannot be normalized for the homothetic test");
    scale.push_back(spent);
  }
  std::vector<std::vector<Rational>> w(static_cast<size_t>(k),
                                       std::vector<Rational>(static_cast<size_t>(k), 1));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      w[static_cast<size_t>(i)][static_cast<size_t>(j)] =
          detail::dot(ds.obs[static_cast<size_t>(i)].price, ds.obs[static_cast<size_t>(j)].bundle) /
          scale[static_cast<size_t>(i)];
    }
  return detail::run_cycle_test(w, /*multiplicative=*/true);
}

// Rationalizability by a translation-invariant preference (invariant under
// adding a constant to every coordinate). Prices are normalized to unit l1
// norm; a violation is a cycle of normalized expenditure differences summing
// below zero.
inline PriceCheck translation_check(const PriceDataset& ds) {
  validate_dataset(ds);
  const int k = ds.size();
  const size_t L = static_cast<size_t>(ds.dimension());
  std::vector<std::vector<Rational>> w(static_cast<size_t>(k),
                                       std::vector<Rational>(static_cast<size_t>(k), 0));
  for (int i = 0; i < k; ++i) {
    const PriceObservation& oi = ds.obs[static_cast<size_t>(i)];
    Rational norm = 0;
    for (const Rational& p : oi.price) norm += p;
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      const PriceObservation& oj = ds.obs[static_cast<size_t>(j)];
      Rational s = 0;
      for (size_t l = 0; l < L; ++l) s += (oi.price[l] / norm) * (oj.bundle[l] - oi.bundle[l]);
      w[static_cast<size_t>(i)][static_cast<size_t>(j)] = s;
    }
  }
  return detail::run_cycle_test(w, /*multiplicative=*/false);
}

// ---------------------------------------------------------------------------
// Plain revealed-preference acyclicity (no invariance structure)

struct GarpResult {
  bool pass = true;
  RevealedPreference revealed;
  std::optional<CycleWitness> cycle;  // bundle nodes; weak path plus a closing strict edge
};

inline GarpResult garp_check(const PriceDataset& ds) {
  GarpResult out;
  out.revealed = revealed_pair(ds);
  out.cycle = find_cycle(out.revealed.data, out.revealed.universe.size());
  out.pass = !out.cycle.has_value();
  return out;
}

// ---------------------------------------------------------------------------
// CSV ingestion

namespace detail {

inline std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline Rational parse_rational(const std::string& raw, const std::string& where) {
  std::string s = trim(raw);
  if (s.empty()) throw PriceError(where + ": empty field");
  try {
    size_t slash = s.find('/');
    if (slash != std::string::npos) {
      Rational den(s.substr(slash + 1));
      if (den == 0) throw PriceError(where + ": division by zero");
      return Rational(s.substr(0, slash)) / den;
    }
    size_t point = s.find('.');
    if (point != std::string::npos) {
      std::string digits = s.substr(0, point) + s.substr(point + 1);
      size_t frac = s.size() - point - 1;
      Rational den = 1;
      for (size_t i = 0; i < frac; ++i) den *= 10;
      return Rational(digits) / den;
    }
    return Rational(s);
  } catch (const PriceError&) {
    throw;
  } catch (const std::exception&) {
    throw PriceError(where + ": cannot parse '" + s + "' as a rational");
  }
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace detail

// One row per observation: L price columns then L quantity columns. The
// header row is required (its column count fixes L). Values may be integers,
// decimals, or fractions like 3/2.
inline PriceDataset parse_price_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw PriceError("line 1: missing header row");
  size_t cols = detail::split_csv_line(line).size();
  if (cols < 2 || cols % 2 != 0)
    throw PriceError("line 1: header must have an even number of columns (prices then quantities)");
  size_t L = cols / 2;
  PriceDataset ds;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    std::vector<std::string> fields = detail::split_csv_line(line);
    std::string where = "line " + std::to_string(lineno);
    if (fields.size() != cols)
      throw PriceError(where + ": expected " + std::to_string(cols) + " fields, got " +
                       std::to_string(fields.size()));
    PriceObservation o;
    for (size_t i = 0; i < L; ++i)
      o.price.push_back(detail::parse_rational(fields[i], where));
    for (size_t i = L; i < cols; ++i)
      o.bundle.push_back(detail::parse_rational(fields[i], where));
    ds.obs.push_back(std::move(o));
  }
  validate_dataset(ds);
  return ds;
}

inline PriceDataset parse_price_csv(const std::string& text) {
  std::istringstream in(text);
  return parse_price_csv(in);
}

}  // namespace invp
