#pragma once

// Finite universes, partial transformations, monoid generation, and order
// pairs: the shared vocabulary of the whole library.
//
// A partial transformation is stored as a dense image vector over the
// universe, with -1 marking alternatives outside its domain.  Transforms are
// compared extensionally (domain + pointwise images); names are bookkeeping
// for reports and never affect semantics.

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace invp {

using Pair = std::pair<int, int>;
using PairSet = std::set<Pair>;

// ---------------------------------------------------------------------------
// Universe

struct Universe {
  std::vector<std::string> labels;
  std::unordered_map<std::string, int> index;

  Universe() = default;
  explicit Universe(std::vector<std::string> names) {
    for (auto& s : names) add(s);
    if (labels.empty()) throw std::invalid_argument("universe must be non-empty");
  }

  int add(const std::string& label) {
    if (label.empty()) throw std::invalid_argument("empty alternative label");
    auto [it, fresh] = index.emplace(label, static_cast<int>(labels.size()));
    if (!fresh) throw std::invalid_argument("duplicate alternative label: " + label);
    labels.push_back(label);
    return it->second;
  }

  int size() const { return static_cast<int>(labels.size()); }

  int id_of(const std::string& label) const {
    auto it = index.find(label);
    if (it == index.end()) throw std::out_of_range("unknown alternative label: " + label);
    return it->second;
  }

  const std::string& label(int id) const {
    if (id < 0 || id >= size()) throw std::out_of_range("alternative id out of range");
    return labels[static_cast<size_t>(id)];
  }
};

// ---------------------------------------------------------------------------
// PartialTransform

struct PartialTransform {
  std::string name;
  std::vector<int> image;  // image[x] == -1  <=>  x outside the domain

  bool defined(int x) const { return image[static_cast<size_t>(x)] >= 0; }
  int operator()(int x) const { return image[static_cast<size_t>(x)]; }
  int size() const { return static_cast<int>(image.size()); }

  int domain_size() const {
    int k = 0;
    for (int v : image) k += (v >= 0);
    return k;
  }
  bool empty_domain() const { return domain_size() == 0; }
  bool total() const { return domain_size() == size(); }

  // Extensional equality: same domain, same images.  Names are ignored.
  bool same_map(const PartialTransform& other) const { return image == other.image; }
};

inline PartialTransform identity_transform(int n) {
  PartialTransform t;
  t.name = "id";
  t.image.resize(static_cast<size_t>(n));
  for (int x = 0; x < n; ++x) t.image[static_cast<size_t>(x)] = x;
  return t;
}

inline PartialTransform make_transform(const std::string& name, int n,
                                       const std::vector<Pair>& maplets) {
  PartialTransform t;
  t.name = name;
  t.image.assign(static_cast<size_t>(n), -1);
  for (auto [x, y] : maplets) {
    if (x < 0 || x >= n || y < 0 || y >= n)
      throw std::out_of_range("transform maplet out of range in " + name);
    t.image[static_cast<size_t>(x)] = y;
  }
  return t;
}

// Composition outer∘inner: defined at x iff inner is defined at x and outer is
// defined at inner(x).  An empty domain is a legal (vacuous) result.
inline PartialTransform compose(const PartialTransform& outer, const PartialTransform& inner) {
  if (outer.size() != inner.size())
    throw std::invalid_argument("compose: transforms over different universes");
  PartialTransform t;
  t.name = outer.name + "*" + inner.name;
  t.image.assign(inner.image.size(), -1);
  for (int x = 0; x < inner.size(); ++x) {
    if (!inner.defined(x)) continue;
    int mid = inner(x);
    if (outer.defined(mid)) t.image[static_cast<size_t>(x)] = outer(mid);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Monoid

struct Monoid {
  std::vector<PartialTransform> elements;  // elements[0] is the identity
  std::vector<int> generators;             // indices into `elements`
  bool closed = true;                      // false iff generation hit the cap
  int cap = 0;

  const PartialTransform& id() const { return elements.front(); }

  // True when every element is either total or has an empty domain.  Empty
  // transforms impose no invariance constraints, so they do not spoil results
  // that are stated for families of total transformations.
  bool total_modulo_empty() const {
    for (const auto& t : elements)
      if (!t.total() && !t.empty_domain()) return false;
    return true;
  }
};

// Breadth-first closure under composition with the generators.  Extensional
// deduplication; the first name found for a map is kept.  Composing only
// generator∘element reaches the full composition closure: any product of two
// words is itself a word, built one left factor at a time.
inline Monoid generate_monoid(const std::vector<PartialTransform>& gens, const Universe& u,
                              int cap = 10000) {
  if (cap < 1) throw std::invalid_argument("generate_monoid: cap must be >= 1");
  const int n = u.size();
  for (const auto& g : gens)
    if (g.size() != n) throw std::invalid_argument("generator over wrong universe: " + g.name);

  Monoid m;
  m.cap = cap;
  std::map<std::vector<int>, int> seen;

  auto insert = [&](const PartialTransform& t) -> int {
    auto it = seen.find(t.image);
    if (it != seen.end()) return it->second;
    int idx = static_cast<int>(m.elements.size());
    seen.emplace(t.image, idx);
    m.elements.push_back(t);
    return idx;
  };

  insert(identity_transform(n));
  for (const auto& g : gens) m.generators.push_back(insert(g));

  for (size_t next = 0; next < m.elements.size(); ++next) {
    for (int gi : m.generators) {
      PartialTransform c = compose(m.elements[static_cast<size_t>(gi)], m.elements[next]);
      if (seen.count(c.image)) continue;
      if (static_cast<int>(m.elements.size()) >= cap) {
        m.closed = false;
        return m;
      }
      insert(c);
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// OrderPair

struct OrderPair {
  PairSet weak;
  PairSet strict;

  bool operator==(const OrderPair&) const = default;
};

// Both invariants an order pair must satisfy as ingested data.
inline bool is_normalized(const OrderPair& p, int n) {
  for (auto pr : p.strict)
    if (!p.weak.count(pr)) return false;
  for (int x = 0; x < n; ++x)
    if (!p.weak.count({x, x})) return false;
  return true;
}

struct NormalizeReport {
  int diagonal_added = 0;
  int strict_into_weak = 0;
};

// Adds the diagonal to `weak` and restores strict ⊆ weak.  Rejects ids
// outside the universe.
inline OrderPair normalize_data(const OrderPair& raw, const Universe& u,
                                NormalizeReport* report = nullptr) {
  const int n = u.size();
  auto check = [n](Pair pr) {
    if (pr.first < 0 || pr.first >= n || pr.second < 0 || pr.second >= n)
      throw std::out_of_range("order pair references an unknown alternative id");
  };
  for (auto pr : raw.weak) check(pr);
  for (auto pr : raw.strict) check(pr);

  OrderPair out = raw;
  NormalizeReport rep;
  for (auto pr : raw.strict)
    if (out.weak.insert(pr).second) ++rep.strict_into_weak;
  for (int x = 0; x < n; ++x)
    if (out.weak.insert({x, x}).second) ++rep.diagonal_added;
  if (report) *report = rep;
  return out;
}

}  // namespace invp
