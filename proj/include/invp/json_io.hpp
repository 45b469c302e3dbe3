#pragma once

// JSON instance ingestion and emission.
//
// An instance document is a single JSON object:
//
//   {
//     "format_version": 1,
//     "alternatives": ["x", "y", ...],
//     "transforms":   [{ "name": "a", "map": { "x": "ax", ... } }, ...],
//     "weak":         [["x", "y"], ...],
//     "strict":       [["x", "y"], ...],
//     "options":      { "max_links": 0, "max_clauses": 50000,
//                       "max_width": 4, "monoid_cap": 10000 }
//   }
//
// The domain of a transform is exactly the key set of its "map".  Every
// section except "alternatives" may be omitted; omitted options keep their
// defaults, and a missing "format_version" is read as version 1 (it is always
// written on output).  Parsing promotes strict pairs into the weak relation,
// so the in-memory instance is already normalized; the reflexive closure is
// left to the engines.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "invp/core.hpp"
#include "invp/refutation.hpp"

namespace invp {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A label used in a pair or a transform map that is not listed in
// "alternatives".
struct UnknownLabel : ParseError {
  using ParseError::ParseError;
};

// Two generators share a name, or a generator reuses the reserved name "id".
struct DuplicateTransformName : ParseError {
  using ParseError::ParseError;
};

struct Instance {
  Universe u;
  std::vector<PartialTransform> generators;  // as listed, without the identity
  Monoid m;                                  // composition closure (capped)
  OrderPair raw;                             // strict already folded into weak
  Limits limits;
};

namespace detail {

using ordered_json = nlohmann::ordered_json;

inline const ordered_json& expect(const ordered_json& obj, const char* key,
                                  ordered_json::value_t type, const char* what) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(std::string("missing field \"") + key + "\"");
  if (it->type() != type)
    throw ParseError(std::string("field \"") + key + "\" must be " + what);
  return *it;
}

inline void reject_unknown_keys(const ordered_json& obj, const std::vector<std::string>& allowed,
                                const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const auto& k : allowed) ok = ok || it.key() == k;
    if (!ok) throw ParseError("unknown field \"" + it.key() + "\" in " + where);
  }
}

inline int label_id(const Universe& u, const ordered_json& node, const std::string& where) {
  if (!node.is_string())
    throw ParseError("expected an alternative label (string) in " + where);
  const auto label = node.get<std::string>();
  try {
    return u.id_of(label);
  } catch (const std::out_of_range&) {
    throw UnknownLabel("unknown alternative \"" + label + "\" in " + where);
  }
}

inline PairSet parse_pairs(const Universe& u, const ordered_json& doc, const char* key) {
  PairSet out;
  auto it = doc.find(key);
  if (it == doc.end()) return out;
  if (!it->is_array())
    throw ParseError(std::string("field \"") + key + "\" must be an array of [a, b] pairs");
  int row = 0;
  for (const auto& entry : *it) {
    std::string where = std::string(key) + "[" + std::to_string(row) + "]";
    if (!entry.is_array() || entry.size() != 2)
      throw ParseError(where + " must be a two-element [a, b] pair");
    out.insert({label_id(u, entry[0], where), label_id(u, entry[1], where)});
    ++row;
  }
  return out;
}

inline long long option_value(const ordered_json& node, const std::string& name) {
  if (!node.is_number_integer() || node.get<long long>() < 0)
    throw ParseError("option \"" + name + "\" must be a non-negative integer");
  return node.get<long long>();
}

}  // namespace detail

inline Instance parse_instance(const std::string& text) {
  using detail::ordered_json;
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("instance document must be a JSON object");
  detail::reject_unknown_keys(
      doc, {"format_version", "alternatives", "transforms", "weak", "strict", "options"},
      "instance document");

  if (auto it = doc.find("format_version"); it != doc.end()) {
    if (!it->is_number_integer() || it->get<long long>() != 1)
      throw ParseError("unsupported format_version (expected 1)");
  }

  Instance inst;

  const auto& alts =
      detail::expect(doc, "alternatives", ordered_json::value_t::array, "an array of labels");
  int row = 0;
  for (const auto& node : alts) {
    if (!node.is_string())
      throw ParseError("alternatives[" + std::to_string(row) + "] must be a string label");
    try {
      inst.u.add(node.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ParseError("alternatives[" + std::to_string(row) + "]: " + e.what());
    }
    ++row;
  }

  if (auto it = doc.find("transforms"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("field \"transforms\" must be an array");
    std::vector<std::string> names{"id"};  // the identity's name is reserved
    int t = 0;
    for (const auto& node : *it) {
      std::string where = "transforms[" + std::to_string(t) + "]";
      if (!node.is_object()) throw ParseError(where + " must be an object");
      detail::reject_unknown_keys(node, {"name", "map"}, where);
      const auto& name_node =
          detail::expect(node, "name", ordered_json::value_t::string, "a string");
      const auto name = name_node.get<std::string>();
      if (name.empty()) throw ParseError(where + ": transform name must be non-empty");
      for (const auto& prev : names)
        if (prev == name)
          throw DuplicateTransformName("transform name \"" + name + "\" is already taken");
      names.push_back(name);

      const auto& map_node =
          detail::expect(node, "map", ordered_json::value_t::object, "an object of label: label");
      std::vector<Pair> maplets;
      for (auto entry = map_node.begin(); entry != map_node.end(); ++entry) {
        int from = detail::label_id(inst.u, ordered_json(entry.key()),
                                    where + ".map (domain of \"" + name + "\")");
        int to = detail::label_id(inst.u, entry.value(),
                                  where + ".map[\"" + entry.key() + "\"]");
        maplets.push_back({from, to});
      }
      inst.generators.push_back(make_transform(name, inst.u.size(), maplets));
      ++t;
    }
  }

  inst.raw.weak = detail::parse_pairs(inst.u, doc, "weak");
  inst.raw.strict = detail::parse_pairs(inst.u, doc, "strict");
  for (auto pr : inst.raw.strict) inst.raw.weak.insert(pr);

  if (auto it = doc.find("options"); it != doc.end()) {
    if (!it->is_object()) throw ParseError("field \"options\" must be an object");
    detail::reject_unknown_keys(*it, {"max_links", "max_clauses", "max_width", "monoid_cap"},
                                "options");
    for (auto entry = it->begin(); entry != it->end(); ++entry) {
      long long v = detail::option_value(entry.value(), entry.key());
      if (entry.key() == "max_links") inst.limits.max_links = static_cast<int>(v);
      if (entry.key() == "max_clauses") inst.limits.max_clauses = static_cast<size_t>(v);
      if (entry.key() == "max_width") inst.limits.max_width = static_cast<int>(v);
      if (entry.key() == "monoid_cap") {
        if (v < 1) throw ParseError("option \"monoid_cap\" must be at least 1");
        inst.limits.monoid_cap = static_cast<int>(v);
      }
    }
  }

  inst.m = generate_monoid(inst.generators, inst.u, inst.limits.monoid_cap);
  return inst;
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

// Canonical emission: strict pairs are listed once (under "strict"); the weak
// section carries only the non-strict comparisons, since parsing restores the
// promotion.  Round-tripping a parsed instance reproduces it exactly.
inline std::string serialize_instance(const Instance& inst) {
  using detail::ordered_json;
  ordered_json doc;
  doc["format_version"] = 1;
  doc["alternatives"] = ordered_json::array();
  for (const auto& label : inst.u.labels) doc["alternatives"].push_back(label);

  doc["transforms"] = ordered_json::array();
  for (const auto& g : inst.generators) {
    ordered_json node;
    node["name"] = g.name;
    ordered_json map = ordered_json::object();
    for (int x = 0; x < g.size(); ++x)
      if (g.defined(x)) map[inst.u.label(x)] = inst.u.label(g(x));
    node["map"] = std::move(map);
    doc["transforms"].push_back(std::move(node));
  }

  auto pair_rows = [&](const PairSet& pairs, const PairSet& skip) {
    ordered_json rows = ordered_json::array();
    for (auto pr : pairs) {
      if (skip.count(pr)) continue;
      rows.push_back(ordered_json::array({inst.u.label(pr.first), inst.u.label(pr.second)}));
    }
    return rows;
  };
  doc["weak"] = pair_rows(inst.raw.weak, inst.raw.strict);
  doc["strict"] = pair_rows(inst.raw.strict, {});

  doc["options"] = {{"max_links", inst.limits.max_links},
                    {"max_clauses", inst.limits.max_clauses},
                    {"max_width", inst.limits.max_width},
                    {"monoid_cap", inst.limits.monoid_cap}};
  return doc.dump(2) + "\n";
}

}  // namespace invp
