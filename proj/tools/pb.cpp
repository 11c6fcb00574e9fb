#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pb/axioms.hpp"
#include "pb/generator.hpp"
#include "pb/pricing.hpp"
#include "pb/report_io.hpp"
#include "pb/repro.hpp"
#include "pb/rules.hpp"

namespace {

enum Exit : int { ok = 0, io = 1, violation = 2, guard = 3, usage = 64 };

/// Bad flag combination detected after CLI11 parsing.
struct UsageError : pb::Error {
  using pb::Error::Error;
};

struct Globals {
  std::string format = "json";
  bool quiet = false;
};

Globals g;

void emit(const pb::Json& j) { std::cout << (g.format == "pretty" ? j.dump(2) : j.dump()) << '\n'; }

void note(const std::string& s) {
  if (!g.quiet) std::cerr << s << '\n';
}

/// Argument holding JSON: inline text when it starts with '[' or '{', else a path ("-" = stdin).
pb::Json json_arg(const std::string& arg, std::string_view what) {
  const std::string_view t = pb::detail::trim(arg);
  if (!t.empty() && (t.front() == '[' || t.front() == '{')) return pb::parse_json_text(arg, what);
  return pb::parse_json_text(pb::read_text(arg), what);
}

void one_stdin(std::initializer_list<const std::string*> args) {
  int n = 0;
  for (const auto* a : args) n += *a == "-";
  if (n > 1) throw UsageError("only one input may come from stdin");
}

pb::SatisfactionFunction sat_of(const pb::Instance& inst, const std::string& sel) {
  static const std::vector<std::string> names{"cost", "card", "cardinality", "sqrt", "log", "cc", "share"};
  if (std::find(names.begin(), names.end(), sel) == names.end() && sel.rfind("table:", 0) != 0 &&
      sel.rfind("costmap:", 0) != 0)
    throw UsageError("unknown satisfaction function '" + sel + "'");
  return pb::parse_sat_selector(inst, sel);
}

pb::TieBreak tie_of(const std::string& name) { return name == "reverse" ? pb::TieBreak::reverse() : pb::TieBreak::lex(); }

std::string set_ids(const pb::Instance& inst, const pb::ProjectSet& s) {
  std::string out;
  for (const auto& id : inst.ids(s)) out += (out.empty() ? "" : ",") + id;
  return "{" + out + "}";
}

// ---------------------------------------------------------------------------

struct RunArgs {
  std::string rule, sat = "cost", tie = "lex", instance = "-";
  bool skip_blocked = false, prefilter = false;
  std::size_t max_m = 12, max_n = 12;
};

int cmd_run(const RunArgs& a) {
  const pb::Instance inst = pb::load_instance(a.instance);
  const pb::TieBreak tie = tie_of(a.tie);
  const pb::PhragmenOptions popt{a.skip_blocked, a.prefilter};
  std::optional<pb::SatisfactionFunction> mu;
  pb::RuleResult r;
  if (a.rule == "mes") {
    mu = sat_of(inst, a.sat);
    r = pb::run_mes(inst, *mu, tie);
  } else if (a.rule == "gcr") {
    mu = sat_of(inst, a.sat);
    r = pb::run_gcr(inst, *mu, {a.max_m, a.max_n});
  } else if (a.rule == "phragmen") {
    r = pb::run_seq_phragmen(inst, tie, popt);
  } else {
    r = pb::run_maximin_support(inst, tie, popt);
  }
  emit(pb::run_result_to_json(inst, r, mu ? &*mu : nullptr, tie.name()));
  note(a.rule + ": " + set_ids(inst, r.outcome) + " cost " + pb::to_string(pb::total_cost(inst, r.outcome)) + " of " +
       pb::to_string(inst.budget()) + (pb::is_exhaustive(inst, r.outcome) ? "" : " (not exhaustive)"));
  return ok;
}

struct AuditArgs {
  std::string axiom = "all", sat = "cost", instance, outcome;
  pb::AxiomOptions opt;
};

int cmd_audit(const AuditArgs& a) {
  one_stdin({&a.instance, &a.outcome});
  const pb::Instance inst = pb::load_instance(a.instance);
  const pb::SatisfactionFunction mu = sat_of(inst, a.sat);
  const pb::ProjectSet w = pb::outcome_from_any(inst, json_arg(a.outcome, "outcome"));
  std::vector<pb::Axiom> axioms(std::begin(pb::all_axioms), std::end(pb::all_axioms));
  if (a.axiom != "all") axioms = {*pb::axiom_from_string(a.axiom)};
  const pb::AuditReport rep = pb::audit_all(inst, mu, w, a.opt, axioms);
  emit(pb::audit_report_to_json(inst, mu, w, rep));
  for (const auto& r : rep.results)
    note(std::string(pb::to_string(r.axiom)) + "[" + mu.name() + "]: " +
         (!r.checked ? "guard: " + r.guard_message : r.violation ? "violated by T=" + set_ids(inst, r.violation->witness.T) : "pass"));
  if (rep.any_violation()) return violation;
  if (rep.any_guard()) return guard;
  return ok;
}

struct PriceArgs {
  std::string action, instance, input, system;
  bool c6 = false, strict_b = false;
  std::string fixed_B;
  std::size_t max_vars = 64;
};

int cmd_price(const PriceArgs& a) {
  one_stdin({&a.instance, &a.input, &a.system});
  const pb::Instance inst = pb::load_instance(a.instance);
  const pb::Json input = json_arg(a.input, a.action == "extract" ? "trace" : "outcome");

  if (a.action == "verify") {
    if (a.system.empty()) throw UsageError("price verify needs a price system argument");
    const pb::ProjectSet w = pb::outcome_from_any(inst, input);
    const pb::PriceSystem ps = pb::price_system_from_json(inst, json_arg(a.system, "price system"));
    const pb::PriceReport rep = pb::verify_price_system(inst, w, ps, a.c6);
    emit(pb::price_report_to_json(inst, rep, a.c6, a.strict_b));
    const bool pass = rep.passes(a.c6, a.strict_b);
    note(std::string("price system ") + (pass ? "valid" : "invalid") + " for " + set_ids(inst, w));
    return pass ? ok : violation;
  }

  if (a.action == "extract") {
    const pb::Json& tj = input.is_object() && input.contains("trace") ? input["trace"] : input;
    const pb::RuleTrace trace = pb::trace_from_json(inst, tj);
    const pb::ProjectSet w = trace.selected(inst);
    pb::Json out{{"rule", trace.rule}, {"outcome", pb::outcome_to_json(inst, w)}};
    pb::PriceSystem ps;
    if (trace.rule == "mes") {
      ps = pb::extract_from_mes_trace(inst, trace);
      out["method"] = "equal-shares";
    } else if (trace.rule == "phragmen") {
      ps = pb::extract_from_phragmen_trace(inst, trace);
      out["method"] = "loads";
    } else if (trace.rule == "maximin") {
      auto ex = pb::extract_from_maximin_trace(inst, trace, a.max_vars);
      ps = std::move(ex.system);
      out["method"] = ex.method;
    } else {
      throw pb::PreconditionError("no price extraction for rule '" + trace.rule + "'");
    }
    const pb::PriceReport rep = pb::verify_price_system(inst, w, ps, a.c6);
    out["price_system"] = pb::price_system_to_json(inst, ps);
    out["report"] = pb::price_report_to_json(inst, rep, a.c6, a.strict_b);
    emit(out);
    const bool pass = rep.passes(a.c6, a.strict_b);
    note("extracted B = " + pb::to_string(ps.B) + (pass ? ", verified" : ", verification failed"));
    return pass ? ok : violation;
  }

  // find
  const pb::ProjectSet w = pb::outcome_from_any(inst, input);
  pb::PriceSearchOptions opt;
  opt.require_c6 = a.c6;
  opt.require_b_strict = a.strict_b;
  opt.max_payment_vars = a.max_vars;
  if (!a.fixed_B.empty()) opt.fixed_B = pb::parse_rational(a.fixed_B);
  const auto ps = pb::find_price_system(inst, w, opt);
  pb::Json out{{"found", ps.has_value()}};
  if (ps) out["price_system"] = pb::price_system_to_json(inst, *ps);
  emit(out);
  note(ps ? "price system found, B = " + pb::to_string(ps->B) : "no price system exists for " + set_ids(inst, w));
  return ps ? ok : violation;
}

struct GenArgs {
  std::size_t n = 4, m = 6;
  std::uint64_t seed = 0;
  std::string cost_min = "1", cost_max = "5", budget, budget_lo, budget_hi, budget_fraction = "1/2";
  unsigned long cost_den = 1, budget_den = 1;
  double density = 0.5;
  std::string as = "json";
};

int cmd_gen(const GenArgs& a) {
  pb::GeneratorParams p;
  p.voters = a.n;
  p.projects = a.m;
  p.cost_min = pb::parse_rational(a.cost_min);
  p.cost_max = pb::parse_rational(a.cost_max);
  p.cost_denominator = a.cost_den;
  p.approval_density = a.density;
  if (!a.budget.empty()) {
    p.budget = pb::FixedBudget{pb::parse_rational(a.budget)};
  } else if (!a.budget_lo.empty() || !a.budget_hi.empty()) {
    if (a.budget_lo.empty() || a.budget_hi.empty()) throw UsageError("--budget-lo and --budget-hi go together");
    p.budget = pb::BudgetRange{pb::parse_rational(a.budget_lo), pb::parse_rational(a.budget_hi), a.budget_den};
  } else {
    p.budget = pb::BudgetFraction{pb::parse_rational(a.budget_fraction)};
  }
  const pb::Instance inst = pb::generate_random(p, a.seed);
  if (a.as == "pb")
    std::cout << pb::emit_pabulib(inst);
  else
    emit(pb::instance_to_json(inst));
  return ok;
}

int cmd_repro(const std::string& filter) {
  const auto cases = pb::repro_cases();
  pb::Json out = pb::Json::array();
  bool any_fail = false, matched = false;
  for (const auto& c : cases) {
    if (!filter.empty() && c.id != filter) continue;
    matched = true;
    pb::ReproRecorder rec;
    c.run(rec);
    pb::Json items = pb::Json::array();
    bool pass = true;
    for (const auto& e : rec.items()) {
      pass = pass && e.passed;
      pb::Json it{{"expectation", e.description}, {"provenance", pb::to_string(e.provenance)}, {"pass", e.passed}};
      if (!e.detail.empty()) it["observed"] = e.detail;
      items.push_back(std::move(it));
      if (!e.passed) note("  FAIL [" + std::string(pb::to_string(e.provenance)) + "] " + e.description + " :: " + e.detail);
    }
    any_fail = any_fail || !pass;
    note(std::string(pass ? "PASS " : "FAIL ") + c.id + " (" + std::to_string(rec.items().size()) + " expectations)");
    out.push_back({{"id", c.id}, {"title", c.title}, {"pass", pass}, {"expectations", std::move(items)}});
  }
  if (!matched) throw UsageError("unknown repro case '" + filter + "'");
  emit(out);
  return any_fail ? violation : ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approval-based participatory budgeting: rules, axiom audits and price systems"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "pretty"}));
  app.add_flag("-q,--quiet", g.quiet, "No human summary on stderr");

  const std::vector<std::string> sat_help{"cost|card|sqrt|log|cc|share|table:<file>|costmap:<file>"};

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a voting rule");
  run_cmd->add_option("--rule", run.rule)->required()->check(CLI::IsMember({"mes", "phragmen", "maximin", "gcr"}));
  run_cmd->add_option("--sat", run.sat, sat_help[0]);
  run_cmd->add_option("--tie", run.tie)->check(CLI::IsMember({"lex", "reverse"}));
  run_cmd->add_flag("--skip-blocked", run.skip_blocked, "Phragmen/maximin: drop a blocked candidate and continue");
  run_cmd->add_flag("--prefilter", run.prefilter, "Phragmen/maximin: never consider projects costing more than b");
  run_cmd->add_option("--max-m", run.max_m, "GCR guard on the number of projects");
  run_cmd->add_option("--max-n", run.max_n, "GCR guard on the number of voters");
  run_cmd->add_option("instance", run.instance, "Instance (.pb or .json, - for stdin)");

  AuditArgs audit;
  auto* audit_cmd = app.add_subcommand("audit", "Check proportionality axioms for an outcome");
  audit_cmd->add_option("--axiom", audit.axiom)
      ->check(CLI::IsMember({"all", "ejr", "ejr1", "ejr1plus", "ejrx", "pjr", "pjr1", "pjrx", "localbpjr"}));
  audit_cmd->add_option("--sat", audit.sat, sat_help[0]);
  audit_cmd->add_option("--jobs", audit.opt.jobs, "Worker threads")->check(CLI::PositiveNumber);
  audit_cmd->add_option("--max-m", audit.opt.max_projects, "Guard on the number of projects");
  audit_cmd->add_option("--max-n", audit.opt.max_voters, "Guard on the number of voters");
  audit_cmd->add_option("instance", audit.instance)->required();
  audit_cmd->add_option("outcome", audit.outcome, "JSON array of ids or `pb run` output")->required();

  PriceArgs price;
  auto* price_cmd = app.add_subcommand("price", "Verify, extract or search price systems");
  price_cmd->add_option("action", price.action)->required()->check(CLI::IsMember({"verify", "extract", "find"}));
  price_cmd->add_option("instance", price.instance)->required();
  price_cmd->add_option("input", price.input, "Outcome (verify/find) or `pb run` output (extract)")->required();
  price_cmd->add_option("system", price.system, "Price system JSON (verify)");
  price_cmd->add_flag("--c6", price.c6, "Require condition C6");
  price_cmd->add_flag("--strict-b", price.strict_b, "Require B > b");
  price_cmd->add_option("--B", price.fixed_B, "find: search payments for this B only");
  price_cmd->add_option("--max-vars", price.max_vars, "Guard on n*m payment variables");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a random instance");
  gen_cmd->add_option("--n", gen.n, "Voters")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--m", gen.m, "Projects")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("--cost-min", gen.cost_min);
  gen_cmd->add_option("--cost-max", gen.cost_max);
  gen_cmd->add_option("--cost-den", gen.cost_den, "Cost grid denominator")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--density", gen.density, "Approval probability")->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("--budget", gen.budget, "Fixed budget");
  gen_cmd->add_option("--budget-lo", gen.budget_lo);
  gen_cmd->add_option("--budget-hi", gen.budget_hi);
  gen_cmd->add_option("--budget-den", gen.budget_den)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--budget-fraction", gen.budget_fraction, "Budget as a fraction of the total cost");
  gen_cmd->add_option("--as", gen.as, "Instance format")->check(CLI::IsMember({"json", "pb"}));

  std::string repro_filter;
  auto* repro_cmd = app.add_subcommand("repro", "Re-derive the worked examples and counterexamples");
  repro_cmd->add_option("case", repro_filter, "Case id");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return usage;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*audit_cmd) return cmd_audit(audit);
    if (*price_cmd) return cmd_price(price);
    if (*gen_cmd) return cmd_gen(gen);
    if (*repro_cmd) return cmd_repro(repro_filter);
  } catch (const UsageError& e) {
    std::cerr << "pb: " << e.what() << '\n';
    return usage;
  } catch (const pb::CapabilityError& e) {
    std::cerr << "pb: " << e.what() << '\n';
    return usage;
  } catch (const pb::GuardExceeded& e) {
    std::cerr << "pb: guard exceeded: " << e.what() << '\n';
    return guard;
  } catch (const pb::Error& e) {
    std::cerr << "pb: " << e.what() << '\n';
    return io;
  }
  return usage;
}
