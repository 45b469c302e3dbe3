// Instance document parsing, serialization round-trips, and trace rendering.

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "invp/instances.hpp"
#include "invp/json_io.hpp"
#include "invp/predictions.hpp"
#include "invp/refutation.hpp"
#include "invp/trace.hpp"

namespace {

invp::Instance reparse(const invp::Instance& inst) {
  return invp::parse_instance(invp::serialize_instance(inst));
}

bool same_instance(const invp::Instance& a, const invp::Instance& b) {
  if (a.u.labels != b.u.labels) return false;
  if (a.raw.weak != b.raw.weak || a.raw.strict != b.raw.strict) return false;
  if (a.generators.size() != b.generators.size()) return false;
  for (size_t i = 0; i < a.generators.size(); ++i) {
    if (a.generators[i].name != b.generators[i].name) return false;
    if (!a.generators[i].same_map(b.generators[i])) return false;
  }
  return a.limits.max_links == b.limits.max_links &&
         a.limits.max_clauses == b.limits.max_clauses &&
         a.limits.max_width == b.limits.max_width &&
         a.limits.monoid_cap == b.limits.monoid_cap &&
         a.m.elements.size() == b.m.elements.size();
}

}  // namespace

TEST_CASE("a minimal document parses to the identity-only family") {
  invp::Instance inst = invp::parse_instance(
      R"({"alternatives": ["x", "y"], "transforms": [], "weak": [["x", "y"]], "strict": []})");
  CHECK(inst.u.size() == 2);
  CHECK(inst.generators.empty());
  REQUIRE(inst.m.elements.size() == 1);  // just the identity
  CHECK(inst.m.elements[0].total());
  CHECK(inst.raw.weak.count({inst.u.id_of("x"), inst.u.id_of("y")}) == 1);
  CHECK(inst.raw.strict.empty());
  // Omitted options keep their defaults.
  CHECK(inst.limits.max_width == invp::Limits{}.max_width);
  CHECK(inst.limits.monoid_cap == invp::Limits{}.monoid_cap);

  // Every section except the alternatives may be omitted.
  invp::Instance bare = invp::parse_instance(R"({"alternatives": ["only"]})");
  CHECK(bare.u.size() == 1);
  CHECK(bare.raw.weak.empty());
}

TEST_CASE("parsing normalizes strict observations into the weak relation") {
  invp::Instance inst = invp::parse_instance(
      R"({"alternatives": ["x", "y"], "strict": [["y", "x"]]})");
  invp::Pair p{inst.u.id_of("y"), inst.u.id_of("x")};
  CHECK(inst.raw.strict.count(p) == 1);
  CHECK(inst.raw.weak.count(p) == 1);
}

TEST_CASE("transform maps define partial functions by their key sets") {
  invp::Instance inst = invp::parse_instance(R"({
    "alternatives": ["x", "y", "fx"],
    "transforms": [{"name": "f", "map": {"x": "fx"}}]
  })");
  REQUIRE(inst.generators.size() == 1);
  const invp::PartialTransform& f = inst.generators[0];
  CHECK(f.defined(inst.u.id_of("x")));
  CHECK_FALSE(f.defined(inst.u.id_of("y")));
  CHECK(f(inst.u.id_of("x")) == inst.u.id_of("fx"));
  CHECK(inst.m.elements.size() >= 2);
}

TEST_CASE("malformed documents raise parse errors with field context") {
  using invp::ParseError;
  CHECK_THROWS_AS(invp::parse_instance("not json at all"), ParseError);
  CHECK_THROWS_AS(invp::parse_instance("[1, 2]"), ParseError);
  CHECK_THROWS_AS(invp::parse_instance(R"({"weak": []})"), ParseError);  // no alternatives
  CHECK_THROWS_AS(invp::parse_instance(R"({"alternatives": ["x"], "surprise": 1})"), ParseError);
  CHECK_THROWS_AS(invp::parse_instance(R"({"alternatives": [1]})"), ParseError);
  CHECK_THROWS_AS(invp::parse_instance(R"({"alternatives": ["x", "x"]})"), ParseError);
  CHECK_THROWS_AS(invp::parse_instance(R"({"alternatives": [""]})"), ParseError);
  CHECK_THROWS_AS(invp::parse_instance(R"({"alternatives": ["x"], "weak": [["x"]]})"),
                  ParseError);
  CHECK_THROWS_AS(invp::parse_instance(R"({"alternatives": ["x"], "weak": ["x"]})"), ParseError);
  CHECK_THROWS_AS(
      invp::parse_instance(
          R"({"alternatives": ["x"], "transforms": [{"name": "f", "map": {}, "extra": 0}]})"),
      ParseError);
  CHECK_THROWS_AS(
      invp::parse_instance(R"({"alternatives": ["x"], "transforms": [{"map": {}}]})"), ParseError);

  // Version field: absent means 1; anything else is rejected.
  CHECK_NOTHROW(invp::parse_instance(R"({"format_version": 1, "alternatives": ["x"]})"));
  CHECK_THROWS_AS(invp::parse_instance(R"({"format_version": 2, "alternatives": ["x"]})"),
                  ParseError);
  CHECK_THROWS_AS(invp::parse_instance(R"({"format_version": "1", "alternatives": ["x"]})"),
                  ParseError);
}

TEST_CASE("unknown labels and duplicate transform names are dedicated errors") {
  CHECK_THROWS_AS(invp::parse_instance(R"({"alternatives": ["x"], "weak": [["x", "z"]]})"),
                  invp::UnknownLabel);
  CHECK_THROWS_AS(invp::parse_instance(R"({"alternatives": ["x"], "strict": [["z", "x"]]})"),
                  invp::UnknownLabel);
  // A malformed map target is specifically an unknown-label error.
  CHECK_THROWS_AS(
      invp::parse_instance(
          R"({"alternatives": ["x"], "transforms": [{"name": "f", "map": {"x": "zz"}}]})"),
      invp::UnknownLabel);
  CHECK_THROWS_AS(
      invp::parse_instance(
          R"({"alternatives": ["x"], "transforms": [{"name": "f", "map": {"zz": "x"}}]})"),
      invp::UnknownLabel);

  CHECK_THROWS_AS(invp::parse_instance(R"({
        "alternatives": ["x"],
        "transforms": [{"name": "f", "map": {}}, {"name": "f", "map": {}}]
      })"),
                  invp::DuplicateTransformName);
  CHECK_THROWS_AS(
      invp::parse_instance(R"({"alternatives": ["x"], "transforms": [{"name": "id", "map": {}}]})"),
      invp::DuplicateTransformName);

  // Both are parse errors too, so one catch handler suffices downstream.
  CHECK_THROWS_AS(invp::parse_instance(R"({"alternatives": ["x"], "weak": [["x", "z"]]})"),
                  invp::ParseError);
}

TEST_CASE("options land in the solver limits") {
  invp::Instance inst = invp::parse_instance(R"({
    "alternatives": ["x"],
    "options": {"max_links": 3, "max_clauses": 77, "max_width": 2, "monoid_cap": 5}
  })");
  CHECK(inst.limits.max_links == 3);
  CHECK(inst.limits.max_clauses == 77);
  CHECK(inst.limits.max_width == 2);
  CHECK(inst.limits.monoid_cap == 5);

  using invp::ParseError;
  CHECK_THROWS_AS(invp::parse_instance(R"({"alternatives":["x"],"options":{"max_width":-1}})"),
                  ParseError);
  CHECK_THROWS_AS(invp::parse_instance(R"({"alternatives":["x"],"options":{"max_width":"4"}})"),
                  ParseError);
  CHECK_THROWS_AS(invp::parse_instance(R"({"alternatives":["x"],"options":{"monoid_cap":0}})"),
                  ParseError);
  CHECK_THROWS_AS(invp::parse_instance(R"({"alternatives":["x"],"options":{"max_time":9}})"),
                  ParseError);

  // A cap below the closure size leaves the family marked truncated.
  invp::Instance capped = invp::parse_instance(R"({
    "alternatives": ["a", "b", "c"],
    "transforms": [{"name": "rot", "map": {"a": "b", "b": "c", "c": "a"}}],
    "options": {"monoid_cap": 2}
  })");
  CHECK_FALSE(capped.m.closed);
}

TEST_CASE("serialization round-trips every bundled instance byte-for-byte") {
  auto check_roundtrip = [](const invp::Instance& inst) {
    std::string doc = invp::serialize_instance(inst);
    invp::Instance back = invp::parse_instance(doc);
    CHECK(same_instance(inst, back));
    CHECK(invp::serialize_instance(back) == doc);
  };
  check_roundtrip(invp::instances::stationarity());
  check_roundtrip(invp::instances::dated_rewards());
  check_roundtrip(invp::instances::ellsberg());
  check_roundtrip(invp::instances::reformulation_noncommuting());
  check_roundtrip(invp::instances::reformulation_commuting());
  check_roundtrip(invp::instances::random_seed42());

  std::string version_head = R"({
  "format_version": 1,)";
  CHECK(invp::serialize_instance(invp::instances::ellsberg()).substr(0, version_head.size()) ==
        version_head);
}

TEST_CASE("loading a document from disk matches parsing it from memory") {
  namespace fs = std::filesystem;
  fs::path path = fs::temp_directory_path() / "invp_io_test_instance.json";
  invp::Instance inst = invp::instances::ellsberg();
  {
    std::ofstream out(path);
    out << invp::serialize_instance(inst);
  }
  invp::Instance loaded = invp::load_instance(path.string());
  CHECK(same_instance(inst, loaded));
  fs::remove(path);

  CHECK_THROWS_AS(invp::load_instance((fs::temp_directory_path() / "no_such_file.json").string()),
                  invp::ParseError);
}

TEST_CASE("bundled documents parse and decide as documented") {
  // The stationarity data refute through a pair of one-pair forbidden
  // subrelations on the core alternatives.
  invp::Instance st = reparse(invp::instances::stationarity());
  invp::GeneralVerdict gv = invp::decide_general(st.raw, st.m, st.u, st.limits);
  REQUIRE(gv.verdict == invp::Verdict::NotRationalizable);
  REQUIRE(gv.derivation.has_value());
  REQUIRE(gv.derivation->steps.size() == 3);
  int x = st.u.id_of("x"), y = st.u.id_of("y");
  CHECK(gv.derivation->steps[0].result == invp::make_clause({{y, x, false}}));
  CHECK(gv.derivation->steps[1].result == invp::make_clause({{x, y, false}}));
  CHECK(gv.derivation->steps[2].result.empty());

  // The delayed-rewards data stay rationalizable and force the undated pair.
  invp::Instance dr = reparse(invp::instances::dated_rewards());
  invp::ForcedComparisons fc = invp::forced_comparisons(dr.raw, dr.m, dr.u, dr.limits);
  CHECK(fc.verdict == invp::Verdict::Rationalizable);
  CHECK(fc.exact);
  CHECK(fc.strict.count({dr.u.id_of("a0"), dr.u.id_of("b0")}) == 1);
}

TEST_CASE("traces render verified evidence with readable names") {
  invp::Instance el = invp::instances::ellsberg();
  invp::GeneralVerdict gv = invp::decide_general(el.raw, el.m, el.u, el.limits);
  REQUIRE(gv.derivation.has_value());
  REQUIRE(invp::check_derivation(*gv.derivation, el.raw, el.m, el.u).ok);
  std::string trace = invp::render_derivation(*gv.derivation, el.u, el.m);
  CHECK(trace.find("refutation trace (format_version 1)") == 0);
  CHECK(trace.find("steps: 3") != std::string::npos);
  CHECK(trace.find("collapse") != std::string::npos);
  CHECK(trace.find("red_or_yellow") != std::string::npos);
  CHECK(trace.find("empty forbidden subrelation") != std::string::npos);

  invp::Instance rc = invp::instances::reformulation_commuting();
  invp::CommutativeVerdict cv = invp::decide_commutative(rc.raw, rc.m, rc.u);
  REQUIRE(cv.verdict == invp::Verdict::NotRationalizable);
  REQUIRE(cv.witness.has_value());
  std::string witness = invp::render_cycle_witness(*cv.witness, rc.u);
  CHECK(witness.find("closure cycle witness (format_version 1)") == 0);
  CHECK(witness.find(">=") != std::string::npos);

  // A one-pair clause renders both parts of the subrelation.
  invp::Clause c = invp::make_clause({{rc.u.id_of("adx"), rc.u.id_of("bdy"), true}});
  CHECK(invp::render_clause(c, rc.u) == "W={(adx, bdy)} S={(adx, bdy)}");
}
