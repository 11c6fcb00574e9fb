#include <gtest/gtest.h>

#include "pb/axioms.hpp"
#include "pb/lp.hpp"
#include "pb/pricing.hpp"
#include "pb/repro.hpp"
#include "random_instances.hpp"

using namespace pb;
using testing_support::random_instance;

namespace {

PriceSystem example_system(const Instance& inst) {
  PriceSystem ps{frac(9, 2), zero_matrix(inst)};
  ps.d[0][0] = ps.d[1][0] = 2;
  return ps;
}

int first_failure(const PriceReport& rep) {
  for (int k = 1; k <= 6; ++k)
    if ((k < 6 || rep.c6_checked) && !rep.condition(k).pass) return k;
  return 0;
}

PriceSearchOptions c6_search() {
  PriceSearchOptions o;
  o.require_c6 = true;
  return o;
}

// The maximin outcome {p1,p2} here admits no C6 price system for any B.
Instance maximin_c6_counterexample() {
  return Instance::from_ids({{"p1", 1}, {"p2", frac(9, 4)}, {"p3", frac(3, 2)}, {"p4", frac(7, 2)}},
                            {{"p1", "p2", "p4"}, {"p2", "p3", "p4"}, {"p2", "p3", "p4"}}, 4);
}

}  // namespace

TEST(ExactLp, OptimumInfeasibleUnbounded) {
  using detail::ExactLp;
  using detail::LpSolution;
  using detail::Sense;
  ExactLp lp(2);
  lp.add({{0, 1}, {1, 2}}, Sense::le, 4);
  lp.add({{0, 3}, {1, 1}}, Sense::le, 6);
  lp.maximize({{0, 1}, {1, 1}});
  auto s = lp.solve();
  ASSERT_EQ(s.status, LpSolution::Status::optimal);
  EXPECT_EQ(s.value, frac(14, 5));
  EXPECT_EQ(s.x[0], frac(8, 5));
  EXPECT_EQ(s.x[1], frac(6, 5));

  ExactLp bad(1);
  bad.add({{0, 1}}, Sense::ge, 2);
  bad.add({{0, 1}}, Sense::le, 1);
  EXPECT_EQ(bad.solve().status, LpSolution::Status::infeasible);

  ExactLp open(2);
  open.add({{0, 1}, {1, -1}}, Sense::le, 1);
  open.maximize({{0, 1}});
  EXPECT_EQ(open.solve().status, LpSolution::Status::unbounded);

  ExactLp eq(2);  // x - y = -1, x + y <= 3, maximise x
  eq.add({{0, 1}, {1, -1}}, Sense::eq, -1);
  eq.add({{0, 1}, {1, 1}}, Sense::le, 3);
  eq.maximize({{0, 1}});
  s = eq.solve();
  ASSERT_EQ(s.status, LpSolution::Status::optimal);
  EXPECT_EQ(s.x[0], 1);
  EXPECT_EQ(s.x[1], 2);
}

TEST(Verify, KnownSystemPassesC1ToC5FailsC6) {
  const Instance inst = priceability_instance();
  const ProjectSet w = inst.set_of({"p1"});
  const auto rep = verify_price_system(inst, w, example_system(inst), true);
  EXPECT_TRUE(rep.c1_to_c5());
  EXPECT_TRUE(rep.b_strict);
  EXPECT_FALSE(rep.condition(6).pass);
  EXPECT_EQ(inst.id(*rep.condition(6).project), "p2");
  EXPECT_EQ(inst.id(*rep.condition(6).other), "p1");
  EXPECT_TRUE(rep.passes(false, true));
  EXPECT_FALSE(rep.passes(true, true));
  // C5 boundary: supporters of p2 hold 1/4 (<= 1), B = 4 makes it not strict.
  PriceSystem at_b = example_system(inst);
  at_b.B = 4;
  const auto r4 = verify_price_system(inst, w, at_b, false);
  EXPECT_TRUE(r4.c1_to_c5());
  EXPECT_FALSE(r4.b_strict);
}

TEST(Verify, EachConditionIsDetected) {
  const Instance inst = priceability_instance();
  const ProjectSet w = inst.set_of({"p1"});
  PriceSystem ps = example_system(inst);
  ps.d[0][3] = frac(1, 10);  // voter 1 does not approve p4
  EXPECT_EQ(first_failure(verify_price_system(inst, w, ps, false)), 1);
  ps = example_system(inst);
  ps.d[0][1] = frac(1, 10);  // p2 is not funded
  EXPECT_EQ(first_failure(verify_price_system(inst, w, ps, false)), 2);
  ps = example_system(inst);
  ps.d[0][0] = 3;
  ps.d[1][0] = 1;  // voter 1 pays 3 > 9/4
  EXPECT_EQ(first_failure(verify_price_system(inst, w, ps, false)), 3);
  ps = example_system(inst);
  ps.d[1][0] = frac(3, 2);  // p1 collects 7/2
  EXPECT_EQ(first_failure(verify_price_system(inst, w, ps, false)), 4);
  ps = example_system(inst);
  ps.B = 7;  // leftovers 3/2 each; p2's supporter holds 3/2 > 1
  EXPECT_EQ(first_failure(verify_price_system(inst, w, ps, false)), 5);
  EXPECT_THROW(verify_price_system(inst, w, PriceSystem{5, {}}, false), InputError);
}

TEST(Extract, MesTracesArePriceSystems) {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Instance inst = random_instance(seed);
    for (const auto& mu : {SatisfactionFunction::cost(inst), SatisfactionFunction::cardinality(inst),
                           SatisfactionFunction::sqrt_cost(inst)}) {
      const auto r = run_mes(inst, mu);
      const PriceSystem ps = extract_from_mes_trace(inst, r.trace);
      EXPECT_TRUE(verify_price_system(inst, r.outcome, ps, false).passes(false, true)) << seed << " " << mu.name();
      ++checked;
    }
  }
  EXPECT_EQ(checked, 600u);
}

TEST(Extract, MesCostC6FailureAndCardSuccess) {
  const Instance inst = mes_c6_instance();
  const auto rc = run_mes(inst, SatisfactionFunction::cost(inst));
  const PriceSystem pc = extract_from_mes_trace(inst, rc.trace);
  EXPECT_EQ(pc.B, frac(7, 2));
  EXPECT_FALSE(verify_price_system(inst, rc.outcome, pc, true).condition(6).pass);
  EXPECT_FALSE(find_price_system(inst, rc.outcome, c6_search()));
  const auto rn = run_mes(inst, SatisfactionFunction::cardinality(inst));
  EXPECT_TRUE(verify_price_system(inst, rn.outcome, extract_from_mes_trace(inst, rn.trace), true).passes(true, true));
}

TEST(Extract, WrongRuleAndUnavailable) {
  const Instance inst = priceability_instance();
  const auto ph = run_seq_phragmen(inst);
  EXPECT_THROW(extract_from_mes_trace(inst, ph.trace), PreconditionError);
  const Instance all_fit = Instance::from_ids({{"p1", 1}, {"p2", 1}}, {{"p1"}, {"p2"}}, 5);
  const auto done = run_seq_phragmen(all_fit);
  EXPECT_FALSE(done.trace.blocking);
  EXPECT_THROW(extract_from_phragmen_trace(all_fit, done.trace), ExtractionUnavailable);
  EXPECT_THROW(extract_from_maximin_trace(all_fit, run_maximin_support(all_fit).trace), ExtractionUnavailable);
  // Everything bought under MES: delta is undefined and B = 3b/2.
  const auto mes = run_mes(all_fit, SatisfactionFunction::cost(all_fit));
  EXPECT_FALSE(mes.trace.delta);
  EXPECT_EQ(extract_from_mes_trace(all_fit, mes.trace).B, frac(15, 2));
}

TEST(Extract, PhragmenBlockedRunsPassC1ToC6) {
  std::size_t blocked = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const Instance inst = random_instance(seed);
    const auto r = run_seq_phragmen(inst);
    if (!r.trace.blocking) continue;
    ++blocked;
    const PriceSystem ps = extract_from_phragmen_trace(inst, r.trace);
    const auto rep = verify_price_system(inst, r.outcome, ps, true);
    EXPECT_TRUE(rep.passes(true, true)) << "seed " << seed << " failed C" << first_failure(rep);
  }
  EXPECT_GT(blocked, 100u);
}

TEST(Extract, MaximinStagesAndKnownCounterexample) {
  const Instance inst = maximin_c6_counterexample();
  const auto r = run_maximin_support(inst);
  EXPECT_EQ(r.outcome, inst.set_of({"p1", "p2"}));
  ASSERT_TRUE(r.trace.blocking);
  EXPECT_EQ(inst.id(r.trace.blocking->project), "p3");
  EXPECT_EQ(r.trace.blocking->value, frac(19, 12));
  EXPECT_FALSE(find_price_system(inst, r.outcome, c6_search()));
  PriceSearchOptions loose;
  loose.require_b_strict = false;
  loose.require_c6 = true;
  EXPECT_FALSE(find_price_system(inst, r.outcome, loose));
  EXPECT_EQ(extract_from_maximin_trace(inst, r.trace).method, "none");
  // C1-C5 with B > b is still attainable, and PJR-x holds.
  EXPECT_TRUE(find_price_system(inst, r.outcome));
  for (const auto& mu : {SatisfactionFunction::cost(inst), SatisfactionFunction::cardinality(inst)})
    EXPECT_FALSE(check_pjrx(inst, mu, r.outcome));

  const Instance easy = mes_c6_instance();
  const auto e = extract_from_maximin_trace(easy, run_maximin_support(easy).trace);
  EXPECT_EQ(e.method, "blocking-loads");
  EXPECT_EQ(e.system.B, 5);
}

TEST(Find, FrozenAndVerified) {
  const Instance inst = priceability_instance();
  const ProjectSet w = inst.set_of({"p1"});
  const auto ps = find_price_system(inst, w);
  ASSERT_TRUE(ps);
  EXPECT_GT(ps->B, 4);
  EXPECT_TRUE(verify_price_system(inst, w, *ps, false).passes(false, true));
  EXPECT_FALSE(find_price_system(inst, w, c6_search()));
  PriceSearchOptions fixed;
  fixed.fixed_B = frac(9, 2);
  const auto at = find_price_system(inst, w, fixed);
  ASSERT_TRUE(at);
  EXPECT_EQ(at->B, frac(9, 2));
  fixed.fixed_B = 8;  // leftovers too large for C5
  EXPECT_FALSE(find_price_system(inst, w, fixed));
  EXPECT_FALSE(find_price_system(inst, inst.set_of({"p1", "p2"})));  // infeasible outcome
  PriceSearchOptions tiny;
  tiny.max_payment_vars = 5;
  EXPECT_THROW(find_price_system(inst, w, tiny), GuardExceeded);
}

TEST(Find, ResultsAlwaysVerify) {
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    const Instance inst = random_instance(seed, 4, 6);
    const std::uint32_t full = (1u << inst.project_count()) - 1;
    for (std::uint32_t s = seed % 5; s <= full; s += 5) {
      ProjectSet w = inst.empty_set();
      for (std::size_t k = 0; k < inst.project_count(); ++k)
        if (s & (1u << k)) w.set(k);
      if (!is_outcome(inst, w)) continue;
      for (bool c6 : {false, true}) {
        PriceSearchOptions o;
        o.require_c6 = c6;
        if (auto ps = find_price_system(inst, w, o)) {
          EXPECT_TRUE(verify_price_system(inst, w, *ps, c6).passes(c6, true)) << seed << " " << s;
          // Priceable outcomes satisfy PJR-x for cost (C6 extends this to DNS functions).
          EXPECT_FALSE(check_pjrx(inst, SatisfactionFunction::cost(inst), w)) << seed << " " << s;
        }
      }
    }
  }
}
