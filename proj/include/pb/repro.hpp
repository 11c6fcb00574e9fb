#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pb/axioms.hpp"
#include "pb/pricing.hpp"
#include "pb/rules.hpp"
#include "pb/satisfaction.hpp"

namespace pb {

/// Where an expected value comes from: stated in the literature, derived by
/// hand or by an independent computation, or immediate from the definitions.
enum class Provenance { published, derived, trivial };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::published: return "published";
    case Provenance::derived: return "derived";
    case Provenance::trivial: return "trivial";
  }
  return "?";
}

struct Expectation {
  std::string description;
  Provenance provenance;
  bool passed;
  std::string detail;  // observed value
};

class ReproRecorder {
 public:
  void expect(std::string description, Provenance prov, bool ok, std::string observed = {}) {
    items_.push_back({std::move(description), prov, ok, std::move(observed)});
  }
  const std::vector<Expectation>& items() const { return items_; }

 private:
  std::vector<Expectation> items_;
};

struct ReproCase {
  std::string id;
  std::string title;
  std::function<void(ReproRecorder&)> run;
};

namespace repro_detail {

inline std::string set_str(const Instance& inst, const ProjectSet& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& id : inst.ids(s)) {
    out += (first ? "" : ",") + id;
    first = false;
  }
  return out + "}";
}

inline std::string voters_str(const VoterSet& g) {
  std::string out = "{";
  bool first = true;
  for_each_member(g, [&](VoterIndex i) {
    out += (first ? "" : ",") + std::to_string(i + 1);
    first = false;
  });
  return out + "}";
}

inline std::string verdict(const std::optional<Violation>& v, const Instance& inst) {
  if (!v) return "pass";
  return "violation T=" + set_str(inst, v->witness.T) + " group=" + voters_str(v->witness.group) + " " +
         to_string(v->lhs) + " " + v->relation + " " + to_string(v->rhs);
}

inline std::vector<Project> unit_projects(std::size_t m) {
  std::vector<Project> out;
  for (std::size_t k = 1; k <= m; ++k) out.push_back({"p" + std::to_string(k), Money(1)});
  return out;
}

// Best outcome for the voter approving everything: argmax mu over feasible sets.
inline ProjectSet best_outcome(const Instance& inst, const SatisfactionFunction& mu) {
  const std::size_t m = inst.project_count();
  std::optional<std::uint64_t> best;
  SatValue best_v;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << m); ++s) {
    Money c = 0;
    for (std::uint64_t r = s; r; r &= r - 1) c += inst.cost(static_cast<ProjectIndex>(__builtin_ctzll(r)));
    if (c > inst.budget()) continue;
    SatValue v = mu.evaluate_mask(s);
    if (!best || v > best_v) {
      best = s;
      best_v = v;
    }
  }
  return detail::to_project_set(inst, *best);
}

// B > b is always required here.
inline PriceSearchOptions search_options(bool c6) {
  PriceSearchOptions o;
  o.require_c6 = c6;
  return o;
}

}  // namespace repro_detail

// ---------------------------------------------------------------------------
// Instances

/// One voter approving five projects, b = 5, c(p1) = 5, others cost 1.
inline Instance best_outcome_instance() {
  return Instance::from_ids({{"p1", 5}, {"p2", 1}, {"p3", 1}, {"p4", 1}, {"p5", 1}},
                            {{"p1", "p2", "p3", "p4", "p5"}}, 5);
}

/// One voter, b = 7, costs 2.5 2.5 2.5 3 4.5; separates EJR-x from EJR-1.
inline Instance ejrx_separation_instance() {
  return Instance::from_ids({{"p1", frac(5, 2)}, {"p2", frac(5, 2)}, {"p3", frac(5, 2)}, {"p4", 3}, {"p5", frac(9, 2)}},
                            {{"p1", "p2", "p3", "p4", "p5"}}, 7);
}

/// Satisfaction table 0.1 0.1 0.1 3.1 4 for the instance above.
inline SatisfactionFunction ejrx_separation_table(const Instance& inst) {
  return SatisfactionFunction::table(
      inst, {{"p1", frac(1, 10)}, {"p2", frac(1, 10)}, {"p3", frac(1, 10)}, {"p4", frac(31, 10)}, {"p5", 4}});
}

/// Two voters, p1, p2 cost 5, p3..p12 cost 1, b = 10; voter 1 approves
/// p1..p7, voter 2 approves p1, p2, p8..p12.
inline Instance ejr1_incompatibility_instance() {
  std::vector<Project> projects = repro_detail::unit_projects(12);
  projects[0].cost = projects[1].cost = 5;
  return Instance::from_ids(std::move(projects),
                            {{"p1", "p2", "p3", "p4", "p5", "p6", "p7"}, {"p1", "p2", "p8", "p9", "p10", "p11", "p12"}}, 10);
}

/// Two voters, b = 4, p1 costs 4 (both approve), p2..p5 cost 1;
/// A1 = {p1,p2,p3}, A2 = {p1,p4,p5}.
inline Instance priceability_instance() {
  return Instance::from_ids({{"p1", 4}, {"p2", 1}, {"p3", 1}, {"p4", 1}, {"p5", 1}},
                            {{"p1", "p2", "p3"}, {"p1", "p4", "p5"}}, 4);
}

/// Two voters, b = 3, p1 costs 3 (both approve), p2 / p3 cost 1 approved by voter 1 / 2.
inline Instance mes_c6_instance() {
  return Instance::from_ids({{"p1", 3}, {"p2", 1}, {"p3", 1}}, {{"p1", "p2"}, {"p1", "p3"}}, 3);
}

/// Three voters, unit costs, b = 2; A1 = A2 = {p1,p2,p3}, A3 = {p1,p2}.
inline Instance local_bpjr_pjr_instance() {
  return Instance::from_ids(repro_detail::unit_projects(4), {{"p1", "p2", "p3"}, {"p1", "p2", "p3"}, {"p1", "p2"}}, 2);
}

/// One voter, costs 2 2 3, b = 4.
inline Instance local_bpjr_pjr1_instance() {
  return Instance::from_ids({{"p1", 2}, {"p2", 2}, {"p3", 3}}, {{"p1", "p2", "p3"}}, 4);
}

// ---------------------------------------------------------------------------
// Cases

inline std::vector<ReproCase> repro_cases() {
  using namespace repro_detail;
  using P = Provenance;
  std::vector<ReproCase> cases;

  cases.push_back({"best-outcome", "cost-based vs cardinality-based best outcome", [](ReproRecorder& r) {
                     const Instance inst = best_outcome_instance();
                     const auto cost = SatisfactionFunction::cost(inst);
                     const auto card = SatisfactionFunction::cardinality(inst);
                     const ProjectSet bc = best_outcome(inst, cost), bn = best_outcome(inst, card);
                     r.expect("best outcome under cost is {p1}", P::published, bc == inst.set_of({"p1"}), set_str(inst, bc));
                     r.expect("its cost satisfaction is 5", P::published, cost.evaluate(bc) == 5, to_string(cost.evaluate(bc)));
                     r.expect("best outcome under cardinality is {p2,p3,p4,p5}", P::published,
                              bn == inst.set_of({"p2", "p3", "p4", "p5"}), set_str(inst, bn));
                     r.expect("its cardinality satisfaction is 4", P::published, card.evaluate(bn) == 4,
                              to_string(card.evaluate(bn)));
                     r.expect("mu of the empty set is 0", P::trivial, cost.evaluate(inst.empty_set()) == 0);
                   }});

  cases.push_back({"ejrx-vs-ejr1", "EJR-x is strictly stronger than EJR-1 (b = 7)", [](ReproRecorder& r) {
                     const Instance inst = ejrx_separation_instance();
                     const auto mu = ejrx_separation_table(inst);
                     const ProjectSet w15 = inst.set_of({"p1", "p5"}), w23 = inst.set_of({"p2", "p3"}),
                                      w14 = inst.set_of({"p1", "p4"});
                     r.expect("c({p1,p5}) = 7", P::published, total_cost(inst, w15) == 7, to_string(total_cost(inst, w15)));
                     r.expect("{p1,p5} is exhaustive", P::published, is_exhaustive(inst, w15));
                     r.expect("{p1} is not exhaustive", P::derived, !is_exhaustive(inst, inst.set_of({"p1"})));
                     r.expect("mu({p1,p5}) = 4.1", P::published, mu.evaluate(w15) == frac(41, 10),
                              to_string(mu.evaluate(w15)));
                     auto e15 = check_ejr(inst, mu, w15);
                     r.expect("{p1,p5} satisfies EJR", P::published, !e15, verdict(e15, inst));
                     auto x15 = check_ejrx(inst, mu, w15);
                     r.expect("{p1,p5} satisfies EJR-x", P::published, !x15, verdict(x15, inst));
                     auto o15 = check_ejr1(inst, mu, w15);
                     r.expect("{p1,p5} satisfies EJR-1", P::published, !o15, verdict(o15, inst));

                     const SatValue v231 = mu.evaluate(inst.set_of({"p1", "p2", "p3"}));
                     const SatValue v235 = mu.evaluate(inst.set_of({"p2", "p3", "p5"}));
                     r.expect("mu({p2,p3} + p1) = 0.3", P::published, v231 == frac(3, 10), to_string(v231));
                     r.expect("mu({p2,p3} + p5) = 4.2", P::published, v235 == frac(42, 10), to_string(v235));
                     r.expect("mu_1({p2,p3}) = 0.2", P::published,
                              voter_satisfaction(mu, inst, 0, w23) == frac(2, 10),
                              to_string(voter_satisfaction(mu, inst, 0, w23)));
                     auto x23 = check_ejrx(inst, mu, w23);
                     r.expect("{p2,p3} violates EJR-x", P::published, x23.has_value(), verdict(x23, inst));
                     auto o23 = check_ejr1(inst, mu, w23);
                     r.expect("{p2,p3} satisfies EJR-1", P::published, !o23, verdict(o23, inst));
                     auto e23 = check_ejr(inst, mu, w23);
                     r.expect("{p2,p3} violates EJR", P::derived, e23.has_value(), verdict(e23, inst));
                     auto p23 = check_ejr1_plus(inst, mu, w23);
                     r.expect("{p2,p3} satisfies EJR-1+ (p5 rescues)", P::derived, !p23, verdict(p23, inst));
                     auto x14 = check_ejrx(inst, mu, w14);
                     r.expect("{p1,p4} violates EJR-x", P::published, x14.has_value(), verdict(x14, inst));
                     auto o14 = check_ejr1(inst, mu, w14);
                     r.expect("{p1,p4} satisfies EJR-1", P::published, !o14, verdict(o14, inst));

                     const auto dns = is_dns(mu, inst);
                     r.expect("the table is not DNS; witness (p1, p4), ratio inequality", P::derived,
                              !dns && dns.witness->cheaper == 0 && dns.witness->pricier == 3 &&
                                  dns.witness->failure == DnsFailure::ratio_order,
                              dns ? "dns" : inst.id(dns.witness->cheaper) + "," + inst.id(dns.witness->pricier));
                     const auto mes = run_mes(inst, mu);
                     const bool p4_first = !mes.trace.selections.empty() && mes.trace.selections[0].project == 3;
                     r.expect("MES[table] buys p4 first, then one of p1..p3", P::published,
                              p4_first && mes.outcome.count() == 2 &&
                                  (mes.outcome & inst.set_of({"p1", "p2", "p3"})).count() == 1,
                              set_str(inst, mes.outcome));
                     auto xm = check_ejrx(inst, mu, mes.outcome);
                     r.expect("MES[table] violates EJR-x", P::published, xm.has_value(), verdict(xm, inst));
                   }});

  cases.push_back({"ejr1-incompat", "no outcome satisfies EJR-1 for both cost and cardinality", [](ReproRecorder& r) {
                     const Instance inst = ejr1_incompatibility_instance();
                     const auto cost = SatisfactionFunction::cost(inst);
                     const auto card = SatisfactionFunction::cardinality(inst);
                     r.expect("c({p1,p2}) = 10", P::published, total_cost(inst, inst.set_of({"p1", "p2"})) == 10);
                     VoterSet v1 = inst.no_voters(), both = inst.no_voters();
                     v1.set(0);
                     both.set();
                     r.expect("voter 1 is {p3..p7}-cohesive", P::published,
                              is_cohesive(inst, inst.set_of({"p3", "p4", "p5", "p6", "p7"}), v1));
                     r.expect("both voters are {p1,p2}-cohesive", P::published,
                              is_cohesive(inst, inst.set_of({"p1", "p2"}), both));
                     const ProjectSet w = inst.set_of({"p3", "p4", "p5", "p6", "p7", "p8", "p9", "p10", "p11", "p12"});
                     auto card_w = check_ejr1(inst, card, w);
                     r.expect("{p3..p12} satisfies EJR-1[card]", P::published, !card_w, verdict(card_w, inst));
                     auto cost_w = check_ejr1(inst, cost, w);
                     r.expect("{p3..p12} violates EJR-1[cost] with T = {p1,p2}", P::published,
                              cost_w && cost_w->witness.T == inst.set_of({"p1", "p2"}), verdict(cost_w, inst));
                     auto card_p1 = check_ejr1(inst, card, inst.set_of({"p1", "p3", "p4", "p5", "p8", "p9"}));
                     r.expect("an outcome containing p1 violates EJR-1[card]", P::published, card_p1.has_value(),
                              verdict(card_p1, inst));
                     std::size_t feasible = 0, card_ok = 0, both_ok = 0;
                     for (std::uint64_t s = 0; s < (std::uint64_t{1} << 12); ++s) {
                       const ProjectSet o = detail::to_project_set(inst, s);
                       if (!is_outcome(inst, o)) continue;
                       ++feasible;
                       if (check_ejr1(inst, card, o)) continue;
                       ++card_ok;
                       if (!check_ejr1(inst, cost, o)) ++both_ok;
                     }
                     r.expect("no feasible outcome satisfies EJR-1[cost] and EJR-1[card]", P::published, both_ok == 0,
                              std::to_string(feasible) + " outcomes, " + std::to_string(card_ok) + " pass EJR-1[card], " +
                                  std::to_string(both_ok) + " pass both");
                     r.expect("{p3..p12} is the only outcome satisfying EJR-1[card]", P::published, card_ok == 1);
                     const auto gcr = run_gcr(inst, cost);
                     r.expect("GCR[cost] buys {p1,p2} first", P::derived,
                              gcr.trace.selections.size() >= 2 && gcr.trace.selections[0].round == 1 &&
                                  gcr.trace.selections[1].round == 1 && gcr.trace.selections[0].project == 0 &&
                                  gcr.trace.selections[1].project == 1,
                              set_str(inst, gcr.outcome));
                   }});

  cases.push_back({"priceable-not-pjrx", "priceable with B = 4.5 but not PJR-x[card] and not C6", [](ReproRecorder& r) {
                     const Instance inst = priceability_instance();
                     const auto card = SatisfactionFunction::cardinality(inst);
                     const ProjectSet w = inst.set_of({"p1"});
                     VoterSet both = inst.no_voters(), first = inst.no_voters();
                     both.set();
                     first.set(0);
                     r.expect("N_p1 = {1,2}", P::published, approvers(inst, "p1") == both);
                     r.expect("N_p2 = {1}", P::published, approvers(inst, "p2") == first);
                     PriceSystem ps{frac(9, 2), zero_matrix(inst)};
                     ps.d[0][0] = ps.d[1][0] = 2;
                     const auto rep = verify_price_system(inst, w, ps, true);
                     r.expect("B = 4.5, d1(p1) = d2(p1) = 2 passes C1-C5", P::published, rep.c1_to_c5());
                     r.expect("B > b", P::published, rep.b_strict);
                     r.expect("C6 fails on (p2, p1): voter 1 pays 2 > c(p2) = 1", P::published,
                              !rep.condition(6).pass && rep.condition(6).project == 1 && rep.condition(6).other == 0 &&
                                  rep.condition(6).lhs == 2,
                              rep.condition(6).pass ? "pass" : to_string(rep.condition(6).lhs) + " > " + to_string(rep.condition(6).rhs));
                     auto v = check_pjrx(inst, card, w);
                     r.expect("{p1} violates PJR-x[card]", P::published, v.has_value(), verdict(v, inst));
                     auto found = find_price_system(inst, w, search_options(false));
                     r.expect("a price system with B > 4 exists", P::published,
                              found && verify_price_system(inst, w, *found, false).passes(false, true),
                              found ? "B = " + to_string(found->B) : "none");
                     auto c6 = find_price_system(inst, w, search_options(true));
                     r.expect("no C6 price system exists", P::published, !c6);
                   }});

  cases.push_back({"mes-cost-no-c6", "MES[cost] outcome is not C6-priceable", [](ReproRecorder& r) {
                     const Instance inst = mes_c6_instance();
                     const auto cost = SatisfactionFunction::cost(inst);
                     const auto card = SatisfactionFunction::cardinality(inst);
                     r.expect("{p1,p2} is not an outcome (b = 3)", P::published, !is_outcome(inst, inst.set_of({"p1", "p2"})));
                     const std::vector<Money> half(2, frac(3, 2));
                     auto rho = min_rho(inst, half, cost, 0);
                     r.expect("rho(p1) = 1/2 under cost with budgets 3/2", P::derived, rho && *rho == frac(1, 2),
                              rho ? to_string(*rho) : "none");
                     const auto mc = run_mes(inst, cost);
                     r.expect("MES[cost] selects {p1}", P::published, mc.outcome == inst.set_of({"p1"}), set_str(inst, mc.outcome));
                     r.expect("no C6 price system for {p1}", P::published, !find_price_system(inst, mc.outcome, search_options(true)));
                     const auto ext = extract_from_mes_trace(inst, mc.trace);
                     const auto rep = verify_price_system(inst, mc.outcome, ext, true);
                     r.expect("the MES[cost] prices pass C1-C5 with B > b but fail C6", P::published,
                              rep.c1_to_c5() && rep.b_strict && !rep.condition(6).pass);
                     const auto mn = run_mes(inst, card);
                     r.expect("MES[card] selects {p2,p3}", P::derived, mn.outcome == inst.set_of({"p2", "p3"}),
                              set_str(inst, mn.outcome));
                     const auto en = extract_from_mes_trace(inst, mn.trace);
                     r.expect("MES[card] prices pass C1-C6 with B > 3", P::derived,
                              verify_price_system(inst, mn.outcome, en, true).passes(true, true), "B = " + to_string(en.B));
                     const auto ph = run_seq_phragmen(inst);
                     r.expect("Phragmen selects {p2,p3}, blocked by p1 at t = 5/2", P::derived,
                              ph.outcome == inst.set_of({"p2", "p3"}) && ph.trace.blocking &&
                                  ph.trace.blocking->project == 0 && ph.trace.blocking->value == frac(5, 2),
                              set_str(inst, ph.outcome));
                     const auto pe = extract_from_phragmen_trace(inst, ph.trace);
                     r.expect("Phragmen prices: B = 5, pass C1-C6", P::derived,
                              pe.B == 5 && verify_price_system(inst, ph.outcome, pe, true).passes(true, true),
                              "B = " + to_string(pe.B));
                     const auto mm = run_maximin_support(inst);
                     r.expect("maximin selects {p2,p3}", P::derived, mm.outcome == inst.set_of({"p2", "p3"}),
                              set_str(inst, mm.outcome));
                     const auto la = balance_loads(inst, inst.all_projects());
                     r.expect("balanced max load of {p1,p2,p3} is 5/2", P::derived, la.max_load == frac(5, 2),
                              to_string(la.max_load));
                   }});

  cases.push_back({"local-bpjr-vs-pjr", "Local-BPJR does not imply PJR (unit costs)", [](ReproRecorder& r) {
                     const Instance inst = local_bpjr_pjr_instance();
                     const auto cost = SatisfactionFunction::cost(inst);
                     const ProjectSet w = inst.set_of({"p3", "p4"});
                     r.expect("the instance is unit-cost", P::published, is_unit_cost(inst));
                     auto lb = check_local_bpjr(inst, cost, w);
                     r.expect("{p3,p4} satisfies Local-BPJR[cost]", P::published, !lb, verdict(lb, inst));
                     auto pj = check_pjr(inst, cost, w);
                     VoterSet all = inst.no_voters();
                     all.set();
                     r.expect("{p3,p4} violates PJR[cost] with T = {p1,p2}, N' = {1,2,3}", P::published,
                              pj && pj->witness.T == inst.set_of({"p1", "p2"}) && pj->witness.group == all,
                              verdict(pj, inst));
                   }});

  cases.push_back({"local-bpjr-vs-pjr1", "PJR-1 does not imply Local-BPJR", [](ReproRecorder& r) {
                     const Instance inst = local_bpjr_pjr1_instance();
                     const auto cost = SatisfactionFunction::cost(inst);
                     const ProjectSet w = inst.set_of({"p1"});
                     VoterSet v = inst.no_voters();
                     v.set(0);
                     r.expect("the voter is {p1,p2}-cohesive", P::published, is_cohesive(inst, inst.set_of({"p1", "p2"}), v));
                     auto p1 = check_pjr1(inst, cost, w);
                     r.expect("{p1} satisfies PJR-1[cost] (p3 rescues: 5 > 4)", P::published, !p1, verdict(p1, inst));
                     auto lb = check_local_bpjr(inst, cost, w);
                     r.expect("{p1} violates Local-BPJR[cost] with W* = {p1,p2}", P::published,
                              lb && lb->superset && *lb->superset == inst.set_of({"p1", "p2"}),
                              lb && lb->superset ? "W* = " + set_str(inst, *lb->superset) : "pass");
                   }});

  auto dns_case = [](const char* id, const char* title, CostValueMap s, DnsFailure expected) {
    return ReproCase{id, title, [s, expected](ReproRecorder& r) {
                       const auto viol = find_dns_violation(s);
                       r.expect("the cost map is not DNS", P::derived, viol.has_value() && viol->failure == expected);
                       if (!viol) return;
                       const auto ce = dns_counterexample_instance(s, viol->x, viol->x_prime);
                       const auto card = SatisfactionFunction::cardinality(ce.instance);
                       const auto mes = run_mes(ce.instance, card);
                       AxiomOptions opt;
                       opt.max_projects = opt.max_voters = 24;
                       const auto v = check_pjrx(ce.instance, ce.mu, mes.outcome, opt);
                       r.expect("MES[card] violates PJR-x for the induced function", P::derived, v.has_value(),
                                "n=" + std::to_string(ce.instance.voter_count()) + " m=" +
                                    std::to_string(ce.instance.project_count()) + " b=" + to_string(ce.instance.budget()) +
                                    " " + verdict(v, ce.instance));
                       bool rejected = false;
                       try {
                         dns_counterexample_instance({{1, 1}, {2, 2}}, 1, 2);
                       } catch (const PreconditionError&) {
                         rejected = true;
                       }
                       r.expect("a DNS map is rejected", P::trivial, rejected);
                     }};
  };
  cases.push_back(dns_case("dns-necessity-value", "non-DNS by value order: s(1) = 1, s(2) = 1/2",
                           {{1, 1}, {2, frac(1, 2)}}, DnsFailure::value_order));
  cases.push_back(dns_case("dns-necessity-ratio", "non-DNS by ratio order: s(1) = 1, s(2) = 3", {{1, 1}, {2, 3}},
                           DnsFailure::ratio_order));
  return cases;
}

}  // namespace pb
