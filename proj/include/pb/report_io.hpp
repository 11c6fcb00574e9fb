#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>

#include "pb/axioms.hpp"
#include "pb/json_io.hpp"
#include "pb/pabulib.hpp"
#include "pb/pricing.hpp"
#include "pb/rules.hpp"
#include "pb/satisfaction.hpp"

// JSON encodings of traces, price systems and audit reports, plus the input
// helpers the CLI shares with the tests.

namespace pb {

// ---------------------------------------------------------------------------
// Input

/// Reads a whole file; "-" means stdin. Throws InputError on IO failure.
inline std::string read_text(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json parse_json_text(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(ParseErrorKind::schema, std::string(what) + ": " + e.what());
  }
}

/// Instance from text; the format follows the file extension (.pb / .json),
/// and content is sniffed when there is none (stdin, other names).
inline Instance parse_instance(std::string_view text, const std::string& path = "-") {
  const std::string ext = std::filesystem::path(path).extension().string();
  if (ext == ".pb") return parse_pabulib(text);
  if (ext == ".json") return parse_json(text);
  const std::string_view t = detail::trim(text);
  return (!t.empty() && t.front() == '{') ? parse_json(text) : parse_pabulib(text);
}

inline Instance load_instance(const std::string& path) { return parse_instance(read_text(path), path); }

/// Outcome from a JSON array of ids or from any object carrying "outcome"
/// (the output of `pb run`).
inline ProjectSet outcome_from_any(const Instance& inst, const Json& j) {
  if (j.is_object() && j.contains("outcome")) return outcome_from_json(inst, j["outcome"]);
  return outcome_from_json(inst, j);
}

// ---------------------------------------------------------------------------
// Satisfaction selector

inline std::map<std::string, SatValue> read_value_table(const std::string& file) {
  const Json j = parse_json_text(read_text(file), file);
  if (!j.is_object()) throw ParseError(ParseErrorKind::schema, file + ": expected an object of project id -> value");
  std::map<std::string, SatValue> out;
  for (const auto& [k, v] : j.items()) out.emplace(k, rational_from_json(v, "value of " + k));
  return out;
}

inline CostValueMap read_cost_map(const std::string& file) {
  CostValueMap out;
  for (const auto& [k, v] : read_value_table(file)) out.emplace(parse_rational(k), v);
  return out;
}

/// cost|card|sqrt|log|cc|share|table:<file>|costmap:<file>
inline SatisfactionFunction parse_sat_selector(const Instance& inst, const std::string& sel) {
  if (sel == "cost") return SatisfactionFunction::cost(inst);
  if (sel == "card" || sel == "cardinality") return SatisfactionFunction::cardinality(inst);
  if (sel == "sqrt") return SatisfactionFunction::sqrt_cost(inst);
  if (sel == "log") return SatisfactionFunction::log_cost(inst);
  if (sel == "cc") return SatisfactionFunction::cc(inst);
  if (sel == "share") return SatisfactionFunction::share(inst);
  if (sel.rfind("table:", 0) == 0) return SatisfactionFunction::table(inst, read_value_table(sel.substr(6)));
  if (sel.rfind("costmap:", 0) == 0) return SatisfactionFunction::cost_map(inst, read_cost_map(sel.substr(8)));
  throw InputError("unknown satisfaction function '" + sel + "'");
}

inline Json sat_to_json(const SatisfactionFunction& mu) {
  Json j{{"name", mu.name()}, {"additive", mu.additive()}};
  if (mu.rationalized())
    j["note"] = "values are rationals rounded to 12 decimal digits; comparisons are exact on those rationals";
  return j;
}

// ---------------------------------------------------------------------------
// Matrices and traces

/// {"<voter 1-based>": {"<project id>": "p/q"}}, nonzero entries only.
inline Json payments_to_json(const Instance& inst, const PaymentMatrix& d) {
  Json j = Json::object();
  for (VoterIndex i = 0; i < d.size(); ++i) {
    Json row = Json::object();
    for (ProjectIndex p = 0; p < d[i].size(); ++p)
      if (d[i][p] != 0) row[inst.id(p)] = rational_to_json(d[i][p]);
    if (!row.empty()) j[std::to_string(i + 1)] = std::move(row);
  }
  return j;
}

inline PaymentMatrix payments_from_json(const Instance& inst, const Json& j) {
  if (!j.is_object()) throw ParseError(ParseErrorKind::schema, "payments must be an object keyed by voter");
  PaymentMatrix d = zero_matrix(inst);
  for (const auto& [vk, row] : j.items()) {
    if (!detail::all_digits(vk)) throw ParseError(ParseErrorKind::schema, "voter key '" + vk + "' is not a number");
    const unsigned long v = std::stoul(vk);
    if (v < 1 || v > inst.voter_count())
      throw ParseError(ParseErrorKind::schema, "voter " + vk + " out of range 1.." + std::to_string(inst.voter_count()));
    if (!row.is_object()) throw ParseError(ParseErrorKind::schema, "payments of voter " + vk + " must be an object");
    for (const auto& [pk, val] : row.items()) {
      auto p = inst.find(pk);
      if (!p) throw ParseError(ParseErrorKind::dangling_project, "payment to unknown project '" + pk + "'");
      d[v - 1][*p] = rational_from_json(val, "payment of voter " + vk + " to " + pk);
      if (d[v - 1][*p] < 0) throw ParseError(ParseErrorKind::schema, "negative payment of voter " + vk + " to " + pk);
    }
  }
  return d;
}

inline Json price_system_to_json(const Instance& inst, const PriceSystem& ps) {
  return {{"B", rational_to_json(ps.B)}, {"payments", payments_to_json(inst, ps.d)}};
}

inline PriceSystem price_system_from_json(const Instance& inst, const Json& j) {
  if (!j.is_object() || !j.contains("B") || !j.contains("payments"))
    throw ParseError(ParseErrorKind::schema, "price system needs 'B' and 'payments'");
  return {rational_from_json(j["B"], "B"), payments_from_json(inst, j["payments"])};
}

inline Json money_vector_to_json(const std::vector<Money>& v) {
  Json j = Json::array();
  for (const auto& x : v) j.push_back(rational_to_json(x));
  return j;
}

inline std::vector<Money> money_vector_from_json(const Json& j, std::string_view what) {
  if (!j.is_array()) throw ParseError(ParseErrorKind::schema, std::string(what) + " must be an array");
  std::vector<Money> out;
  for (const auto& x : j) out.push_back(rational_from_json(x, what));
  return out;
}

inline Json trace_to_json(const Instance& inst, const RuleTrace& t) {
  Json j{{"rule", t.rule}};
  if (!t.sat.empty()) j["sat"] = t.sat;
  Json sel = Json::array();
  for (const auto& s : t.selections)
    sel.push_back({{"round", s.round}, {"project", inst.id(s.project)}, {"value", rational_to_json(s.value)}});
  j["selections"] = std::move(sel);
  auto history = [](const std::vector<std::vector<Money>>& h) {
    Json a = Json::array();
    for (const auto& row : h) a.push_back(money_vector_to_json(row));
    return a;
  };
  if (!t.voter_budgets.empty()) j["voter_budgets"] = history(t.voter_budgets);
  if (!t.voter_loads.empty()) j["voter_loads"] = history(t.voter_loads);
  j["payments"] = payments_to_json(inst, t.payments);
  j["blocking"] = t.blocking ? Json{{"project", inst.id(t.blocking->project)}, {"value", rational_to_json(t.blocking->value)}}
                             : Json(nullptr);
  if (t.blocking_loads)
    j["blocking_loads"] = {{"max_load", rational_to_json(t.blocking_loads->max_load)},
                           {"loads", payments_to_json(inst, t.blocking_loads->loads)}};
  if (t.delta) j["delta"] = rational_to_json(*t.delta);
  j["exhaustive"] = t.exhaustive;
  j["skip_blocked"] = t.skip_blocked;
  return j;
}

inline RuleTrace trace_from_json(const Instance& inst, const Json& j) {
  if (!j.is_object() || !j.contains("rule") || !j["rule"].is_string())
    throw ParseError(ParseErrorKind::schema, "trace needs a 'rule'");
  auto project = [&](const Json& id) {
    if (!id.is_string()) throw ParseError(ParseErrorKind::schema, "project ids must be strings");
    auto p = inst.find(id.get<std::string>());
    if (!p) throw ParseError(ParseErrorKind::dangling_project, "trace references unknown project '" + id.get<std::string>() + "'");
    return *p;
  };
  RuleTrace t;
  t.rule = j["rule"].get<std::string>();
  if (j.contains("sat") && j["sat"].is_string()) t.sat = j["sat"].get<std::string>();
  for (const auto& s : j.value("selections", Json::array())) {
    if (!s.is_object() || !s.contains("project") || !s.contains("value"))
      throw ParseError(ParseErrorKind::schema, "selection entries need 'project' and 'value'");
    t.selections.push_back({s.value("round", std::size_t{0}), project(s["project"]), rational_from_json(s["value"], "selection value")});
  }
  for (const auto& row : j.value("voter_budgets", Json::array())) t.voter_budgets.push_back(money_vector_from_json(row, "voter_budgets"));
  for (const auto& row : j.value("voter_loads", Json::array())) t.voter_loads.push_back(money_vector_from_json(row, "voter_loads"));
  t.payments = j.contains("payments") ? payments_from_json(inst, j["payments"]) : zero_matrix(inst);
  if (j.contains("blocking") && !j["blocking"].is_null()) {
    const Json& b = j["blocking"];
    if (!b.is_object() || !b.contains("project") || !b.contains("value"))
      throw ParseError(ParseErrorKind::schema, "'blocking' needs 'project' and 'value'");
    t.blocking = BlockingProject{project(b["project"]), rational_from_json(b["value"], "blocking value")};
  }
  if (j.contains("blocking_loads")) {
    const Json& b = j["blocking_loads"];
    if (!b.is_object() || !b.contains("max_load") || !b.contains("loads"))
      throw ParseError(ParseErrorKind::schema, "'blocking_loads' needs 'max_load' and 'loads'");
    t.blocking_loads = LoadAssignment{payments_from_json(inst, b["loads"]), rational_from_json(b["max_load"], "max_load")};
  }
  if (j.contains("delta")) t.delta = rational_from_json(j["delta"], "delta");
  t.exhaustive = j.value("exhaustive", false);
  t.skip_blocked = j.value("skip_blocked", false);
  return t;
}

/// Output of `pb run`: outcome, its cost, and the trace.
inline Json run_result_to_json(const Instance& inst, const RuleResult& r, const SatisfactionFunction* mu,
                               const std::string& tie) {
  Json j{{"rule", r.trace.rule}};
  if (mu) j["sat"] = sat_to_json(*mu);
  j["tie"] = tie;
  j["outcome"] = outcome_to_json(inst, r.outcome);
  j["cost"] = rational_to_json(total_cost(inst, r.outcome));
  j["exhaustive"] = is_exhaustive(inst, r.outcome);
  j["trace"] = trace_to_json(inst, r.trace);
  return j;
}

// ---------------------------------------------------------------------------
// Reports

inline Json load_assignment_to_json(const Instance& inst, const LoadAssignment& la) {
  Json totals = Json::array();
  for (VoterIndex i = 0; i < la.loads.size(); ++i) totals.push_back(rational_to_json(la.voter_total(i)));
  return {{"max_load", rational_to_json(la.max_load)}, {"voter_loads", std::move(totals)},
          {"loads", payments_to_json(inst, la.loads)}};
}

inline Json price_report_to_json(const Instance& inst, const PriceReport& rep, bool require_c6, bool require_b_strict) {
  Json conds = Json::object();
  for (int k = 1; k <= 6; ++k) {
    if (k == 6 && !rep.c6_checked) continue;
    const ConditionVerdict& c = rep.condition(k);
    Json v{{"pass", c.pass}};
    if (!c.pass) {
      if (c.voter) v["voter"] = *c.voter + 1;
      if (c.project) v["project"] = inst.id(*c.project);
      if (c.other) v["chosen"] = inst.id(*c.other);
      v["lhs"] = rational_to_json(c.lhs);
      v["rhs"] = rational_to_json(c.rhs);
    }
    conds["C" + std::to_string(k)] = std::move(v);
  }
  return {{"pass", rep.passes(require_c6, require_b_strict)}, {"conditions", std::move(conds)},
          {"B_exceeds_budget", rep.b_strict}};
}

inline Json voters_to_json(const VoterSet& g) {
  Json a = Json::array();
  for_each_member(g, [&](VoterIndex i) { a.push_back(i + 1); });
  return a;
}

inline Json violation_to_json(const Instance& inst, const Violation& v) {
  Json j{{"axiom", to_string(v.axiom)},
         {"T", outcome_to_json(inst, v.witness.T)},
         {"group", voters_to_json(v.witness.group)}};
  if (v.project) j["project"] = inst.id(*v.project);
  if (v.superset) j["superset"] = outcome_to_json(inst, *v.superset);
  j["lhs"] = rational_to_json(v.lhs);
  j["relation"] = v.relation;
  j["rhs"] = rational_to_json(v.rhs);
  return j;
}

inline Json axiom_result_to_json(const Instance& inst, const AxiomResult& r) {
  Json j{{"axiom", to_string(r.axiom)}};
  if (!r.checked) {
    j["status"] = "guard";
    j["message"] = r.guard_message;
  } else if (r.violation) {
    j["status"] = "violation";
    j["witness"] = violation_to_json(inst, *r.violation);
  } else {
    j["status"] = "pass";
  }
  return j;
}

inline Json audit_report_to_json(const Instance& inst, const SatisfactionFunction& mu, const ProjectSet& w,
                                 const AuditReport& rep) {
  Json results = Json::array();
  for (const auto& r : rep.results) results.push_back(axiom_result_to_json(inst, r));
  return {{"sat", sat_to_json(mu)},
          {"outcome", outcome_to_json(inst, w)},
          {"results", std::move(results)},
          {"lattice_failures", rep.lattice_failures}};
}

}  // namespace pb
