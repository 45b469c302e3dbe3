// invp: decide whether revealed-preference data admit a preference invariant
// under a family of (possibly partial) transformations; explain refutations;
// enumerate forced out-of-sample comparisons; run the budget-data checks.
//
// Exit codes: 0 rationalizable / pass, 1 not rationalizable / fail,
// 2 undecided within limits, 3 usage or input error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "invp/closure.hpp"
#include "invp/instances.hpp"
#include "invp/json_io.hpp"
#include "invp/predictions.hpp"
#include "invp/price.hpp"
#include "invp/refutation.hpp"
#include "invp/sat.hpp"
#include "invp/trace.hpp"

namespace {

constexpr int kExitRationalizable = 0;
constexpr int kExitRefuted = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitError = 3;

int exit_for(invp::Verdict v) {
  switch (v) {
    case invp::Verdict::Rationalizable: return kExitRationalizable;
    case invp::Verdict::NotRationalizable: return kExitRefuted;
    default: return kExitUnknown;
  }
}

const char* verdict_word(invp::Verdict v) {
  switch (v) {
    case invp::Verdict::Rationalizable: return "rationalizable";
    case invp::Verdict::NotRationalizable: return "not-rationalizable";
    case invp::Verdict::Unknown: return "unknown";
    default: return "not-applicable";
  }
}

// "--limits k=v,k=v" overrides on top of the instance's own options.
void apply_limits(invp::Limits& lim, const std::string& text) {
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw invp::ParseError("--limits expects name=value, got \"" + item + "\"");
    std::string key = item.substr(0, eq);
    long long value = 0;
    try {
      size_t used = 0;
      value = std::stoll(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      throw invp::ParseError("--limits value for \"" + key + "\" must be an integer");
    }
    if (value < 0) throw invp::ParseError("--limits value for \"" + key + "\" must be >= 0");
    if (key == "max_links") lim.max_links = static_cast<int>(value);
    else if (key == "max_clauses") lim.max_clauses = static_cast<size_t>(value);
    else if (key == "max_width") lim.max_width = static_cast<int>(value);
    else if (key == "monoid_cap") lim.monoid_cap = static_cast<int>(value);
    else if (key == "max_cycles") lim.max_cycles = static_cast<int>(value);
    else if (key == "cycle_budget") lim.cycle_budget = static_cast<long long>(value);
    else if (key == "max_universe") lim.max_universe = static_cast<int>(value);
    else if (key == "max_gap_nodes") lim.max_gap_nodes = static_cast<int>(value);
    else if (key == "max_triple_clauses") lim.max_triple_clauses = static_cast<long long>(value);
    else throw invp::ParseError("--limits does not know \"" + key + "\"");
  }
}

invp::Instance load_with_overrides(const std::string& path, const std::string& limits_text) {
  invp::Instance inst = invp::load_instance(path);
  if (!limits_text.empty()) {
    int old_cap = inst.limits.monoid_cap;
    apply_limits(inst.limits, limits_text);
    if (inst.limits.monoid_cap != old_cap)
      inst.m = invp::generate_monoid(inst.generators, inst.u, inst.limits.monoid_cap);
  }
  return inst;
}

// The two parents of the final collapse, rendered — the pair of forbidden
// subrelations whose collapse closed the refutation.
void print_collapsed_parents(const invp::Derivation& d, const invp::Universe& u) {
  if (d.steps.empty()) return;
  const invp::DerivationStep& last = d.steps.back();
  if (last.kind != invp::DerivationStep::Kind::Collapse) return;
  auto clause_of = [&](int id) -> const invp::Clause* {
    for (const auto& st : d.steps)
      if (st.id == id) return &st.result;
    return nullptr;
  };
  const invp::Clause* left = clause_of(last.left);
  const invp::Clause* right = clause_of(last.right);
  if (left && right)
    std::cout << "collapsed forbidden subrelations: " << invp::render_clause(*left, u) << "  and  "
              << invp::render_clause(*right, u) << "\n";
}

bool cycle_witness_ok(const invp::CycleWitness& w, const invp::Instance& inst) {
  if (w.nodes.empty()) return false;
  invp::OrderPair icl = invp::invariant_closure(invp::normalize_data(inst.raw, inst.u), inst.m,
                                                inst.u.size());
  for (size_t i = 0; i + 1 < w.nodes.size(); ++i)
    if (!icl.weak.count({w.nodes[i], w.nodes[i + 1]})) return false;
  return icl.strict.count({w.nodes.back(), w.nodes.front()}) > 0;
}

struct CheckOptions {
  std::string path;
  std::string mode = "auto";
  std::string limits;
  bool oracle = false;
  std::optional<unsigned> seed;
  std::string dimacs_out;
};

int run_check(const CheckOptions& opt) {
  invp::Instance inst = load_with_overrides(opt.path, opt.limits);
  std::cout << "instance: " << opt.path << "  (" << inst.u.size() << " alternatives, "
            << inst.generators.size() << " transforms, family of " << inst.m.elements.size()
            << (inst.m.closed ? ", closed)" : ", truncated)") << "\n";

  if (!opt.dimacs_out.empty()) {
    invp::SatEncoding enc =
        invp::encode_phi(invp::normalize_data(inst.raw, inst.u), inst.m, inst.u);
    std::ofstream out(opt.dimacs_out);
    if (!out) throw invp::ParseError("cannot write DIMACS file: " + opt.dimacs_out);
    out << "c invariance constraints (format_version 1)\n" << invp::to_dimacs(enc, inst.u);
    std::cout << "dimacs: wrote " << opt.dimacs_out << "\n";
  }

  invp::Verdict verdict = invp::Verdict::Unknown;
  std::optional<invp::GeneralVerdict> gv;
  std::optional<invp::SatDecision> sat;
  std::string reason;

  auto run_sat = [&]() {
    if (sat) return;
    try {
      sat = invp::sat_decide(inst.raw, inst.m, inst.u, opt.seed);
    } catch (const invp::TooLargeError& e) {
      std::cout << "solver: skipped (" << e.what() << ")\n";
    }
  };

  if (opt.mode == "collapse" || opt.mode == "auto") {
    gv = invp::decide_general(inst.raw, inst.m, inst.u, inst.limits);
    verdict = gv->verdict;
    reason = gv->reason;
    std::cout << "engine: " << gv->engine << "\n";
  }
  if (opt.mode == "sat" || (opt.mode == "auto" && verdict == invp::Verdict::Unknown)) {
    run_sat();
    if (sat) {
      std::cout << "engine: solver\n";
      verdict = sat->verdict;
      reason = sat->verdict == invp::Verdict::Rationalizable
                   ? "the invariance constraints are satisfiable"
                   : "the invariance constraints are unsatisfiable";
    }
  }

  if (opt.oracle) {
    run_sat();
    if (sat) {
      std::cout << "oracle: solver says " << verdict_word(sat->verdict) << "\n";
      if (verdict != invp::Verdict::Unknown && sat->verdict != verdict)
        throw std::runtime_error("engine disagreement: collapse engine says " +
                                 std::string(verdict_word(verdict)) + ", solver says " +
                                 verdict_word(sat->verdict));
    }
  }

  if (gv && gv->derivation) {
    invp::CheckReport rep = invp::check_derivation(*gv->derivation, inst.raw, inst.m, inst.u);
    if (!rep.ok) throw std::runtime_error("emitted derivation failed validation: " + rep.reason);
    std::cout << "refutation: " << gv->derivation->steps.size() << " steps (verified)\n";
    print_collapsed_parents(*gv->derivation, inst.u);
  }

  std::cout << "verdict: " << verdict_word(verdict) << "\n";
  if (!reason.empty()) std::cout << "reason: " << reason << "\n";
  return exit_for(verdict);
}

int run_predict(const std::string& path, const std::string& limits_text,
                std::optional<unsigned> seed) {
  invp::Instance inst = load_with_overrides(path, limits_text);
  invp::ForcedComparisons fc =
      invp::forced_comparisons(inst.raw, inst.m, inst.u, inst.limits, seed);

  nlohmann::ordered_json doc;
  doc["format_version"] = 1;
  doc["verdict"] = fc.verdict == invp::Verdict::Rationalizable       ? "rationalizable"
                   : fc.verdict == invp::Verdict::NotRationalizable ? "not_rationalizable"
                                                                    : "unknown";
  doc["exact"] = fc.exact;
  auto rows = [&](const invp::PairSet& pairs) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (auto pr : pairs)
      arr.push_back({inst.u.label(pr.first), inst.u.label(pr.second)});
    return arr;
  };
  auto sourced = [&](const std::map<invp::Pair, std::string>& how) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& [pr, tag] : how)
      arr.push_back({inst.u.label(pr.first), inst.u.label(pr.second), tag});
    return arr;
  };
  doc["weak"] = rows(fc.weak);
  doc["strict"] = rows(fc.strict);
  doc["source"] = {{"weak", sourced(fc.weak_how)}, {"strict", sourced(fc.strict_how)}};
  std::cout << doc.dump(2) << "\n";
  return exit_for(fc.verdict);
}

int run_explain(const std::string& path, const std::string& limits_text) {
  invp::Instance inst = load_with_overrides(path, limits_text);
  invp::GeneralVerdict gv = invp::decide_general(inst.raw, inst.m, inst.u, inst.limits);
  if (gv.verdict == invp::Verdict::Rationalizable) {
    std::cout << "rationalizable: no refutation exists (" << gv.reason << ")\n";
    return kExitRationalizable;
  }
  if (gv.verdict != invp::Verdict::NotRationalizable) {
    std::cout << "unknown: " << gv.reason << "\n";
    return kExitUnknown;
  }
  if (gv.derivation) {
    invp::CheckReport rep = invp::check_derivation(*gv.derivation, inst.raw, inst.m, inst.u);
    if (!rep.ok) throw std::runtime_error("emitted derivation failed validation: " + rep.reason);
    std::cout << invp::render_derivation(*gv.derivation, inst.u, inst.m);
  }
  if (gv.closure_cycle) {
    if (!cycle_witness_ok(*gv.closure_cycle, inst))
      throw std::runtime_error("emitted cycle witness failed re-verification");
    std::cout << invp::render_cycle_witness(*gv.closure_cycle, inst.u);
  }
  return kExitRefuted;
}

int run_price(const std::string& test, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invp::PriceError("cannot open CSV file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  invp::PriceDataset data = invp::parse_price_csv(buf.str());
  std::cout << "dataset: " << data.size() << " observations, dimension " << data.dimension()
            << "\n";

  auto report = [&](const invp::PriceCheck& pc, const char* name) {
    if (pc.pass) {
      std::cout << name << ": PASS\n";
      return kExitRationalizable;
    }
    std::cout << name << ": FAIL  margin=" << pc.margin << "  cycle:";
    for (size_t i = 0; i < pc.cycle.size(); ++i)
      std::cout << (i ? " -> " : " ") << "obs" << pc.cycle[i];
    std::cout << " -> obs" << pc.cycle.front() << "\n";
    return kExitRefuted;
  };

  if (test == "quasilinear") return report(invp::quasilinear_check(data), "quasilinear");
  if (test == "homothetic") return report(invp::homothetic_check(data), "homothetic");
  if (test == "translation") return report(invp::translation_check(data), "translation");

  invp::GarpResult gr = invp::garp_check(data);
  if (gr.pass) {
    std::cout << "garp: PASS\n";
    return kExitRationalizable;
  }
  std::cout << "garp: FAIL  cycle:";
  for (size_t i = 0; i < gr.cycle->nodes.size(); ++i)
    std::cout << (i ? " -> " : " ") << gr.revealed.universe.label(gr.cycle->nodes[i]);
  std::cout << " -> " << gr.revealed.universe.label(gr.cycle->nodes.front()) << "\n";
  return kExitRefuted;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"invariant-preference rationalizability toolkit"};
  app.require_subcommand(1);

  CheckOptions check_opt;
  unsigned seed_value = 0;

  CLI::App* check = app.add_subcommand("check", "decide rationalizability of an instance");
  check->add_option("instance", check_opt.path, "instance JSON file")->required();
  check->add_option("--mode", check_opt.mode, "engine: auto, collapse, or sat")
      ->check(CLI::IsMember({"auto", "collapse", "sat"}));
  check->add_flag("--oracle", check_opt.oracle, "cross-check the verdict against the solver");
  check->add_option("--limits", check_opt.limits, "override limits, e.g. max_width=4,max_links=8");
  CLI::Option* check_seed = check->add_option("--seed", seed_value, "solver heuristic seed");
  check->add_option("--dimacs-out", check_opt.dimacs_out, "export the CNF encoding to a file");

  std::string predict_path, predict_limits;
  CLI::App* predict = app.add_subcommand("predict", "emit all forced comparisons as JSON");
  predict->add_option("instance", predict_path, "instance JSON file")->required();
  predict->add_option("--limits", predict_limits, "override limits");
  CLI::Option* predict_seed = predict->add_option("--seed", seed_value, "solver heuristic seed");

  std::string explain_path, explain_limits;
  CLI::App* explain = app.add_subcommand("explain", "print the verified refutation evidence");
  explain->add_option("instance", explain_path, "instance JSON file")->required();
  explain->add_option("--limits", explain_limits, "override limits");

  std::string price_test, price_path;
  CLI::App* price = app.add_subcommand("price", "run a budget-data axiom check on CSV input");
  price->add_option("test", price_test, "quasilinear, homothetic, translation, or garp")
      ->required()
      ->check(CLI::IsMember({"quasilinear", "homothetic", "translation", "garp"}));
  price->add_option("data", price_path, "CSV file: prices then quantities, one row per observation")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (check->parsed()) {
      if (check_seed->count()) check_opt.seed = seed_value;
      return run_check(check_opt);
    }
    if (predict->parsed()) {
      std::optional<unsigned> seed;
      if (predict_seed->count()) seed = seed_value;
      return run_predict(predict_path, predict_limits, seed);
    }
    if (explain->parsed()) return run_explain(explain_path, explain_limits);
    if (price->parsed()) return run_price(price_test, price_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
