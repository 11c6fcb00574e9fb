#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pb/axioms.hpp"
#include "pb/repro.hpp"
#include "pb/rules.hpp"
#include "random_instances.hpp"

using namespace pb;
using testing_support::random_instance;

namespace {

std::vector<SatisfactionFunction> audit_functions(const Instance& inst) {
  return {SatisfactionFunction::cost(inst), SatisfactionFunction::cardinality(inst),
          SatisfactionFunction::sqrt_cost(inst), SatisfactionFunction::cc(inst)};
}

// Every feasible outcome of a small instance, thinned by `step`.
std::vector<ProjectSet> outcomes(const Instance& inst, std::uint32_t step) {
  std::vector<ProjectSet> out;
  for (oracle::Mask s = 0; s < oracle::bit(inst.project_count()); s += step) {
    ProjectSet w = oracle::set_of(inst, s);
    if (is_outcome(inst, w)) out.push_back(w);
  }
  return out;
}

}  // namespace

TEST(Axioms, NamesRoundTrip) {
  for (Axiom a : all_axioms) EXPECT_EQ(*axiom_from_string(to_string(a)), a);
  EXPECT_FALSE(axiom_from_string("ejr2"));
}

TEST(Axioms, FrozenWitnesses) {
  const Instance inst = local_bpjr_pjr_instance();
  const auto cost = SatisfactionFunction::cost(inst);
  const ProjectSet w = inst.set_of({"p3", "p4"});
  const auto pjr = check_pjr(inst, cost, w);
  ASSERT_TRUE(pjr);
  EXPECT_EQ(pjr->witness.T, inst.set_of({"p1", "p2"}));
  EXPECT_EQ(pjr->witness.group.count(), 3u);
  EXPECT_EQ(pjr->lhs, 1);
  EXPECT_EQ(pjr->rhs, 2);
  EXPECT_FALSE(check_local_bpjr(inst, cost, w));

  const Instance one = local_bpjr_pjr1_instance();
  const auto oc = SatisfactionFunction::cost(one);
  EXPECT_FALSE(check_pjr1(one, oc, one.set_of({"p1"})));
  const auto lb = check_local_bpjr(one, oc, one.set_of({"p1"}));
  ASSERT_TRUE(lb);
  ASSERT_TRUE(lb->superset);
  EXPECT_EQ(*lb->superset, one.set_of({"p1", "p2"}));

  const Instance sep = ejrx_separation_instance();
  const auto table = ejrx_separation_table(sep);
  const auto x = check_ejrx(sep, table, sep.set_of({"p2", "p3"}));
  ASSERT_TRUE(x);
  EXPECT_EQ(x->witness.T, sep.set_of({"p1", "p4"}));  // first T in mask order
  EXPECT_EQ(sep.id(*x->project), "p1");
  EXPECT_EQ(x->lhs, frac(3, 10));
  EXPECT_FALSE(check_ejr1(sep, table, sep.set_of({"p2", "p3"})));
}

TEST(Axioms, InputValidation) {
  const Instance inst = mes_c6_instance();
  const auto cost = SatisfactionFunction::cost(inst);
  EXPECT_THROW(check_ejr(inst, cost, inst.set_of({"p1", "p2"})), InputError);
  EXPECT_THROW(check_ejr(inst, cost, ProjectSet(5)), InputError);
  const Instance other = best_outcome_instance();
  EXPECT_THROW(check_pjr(inst, SatisfactionFunction::cost(other), inst.empty_set()), InputError);
  EXPECT_THROW(is_cohesive(inst, inst.set_of({"p1"}), VoterSet(7)), InputError);
  EXPECT_TRUE(is_cohesive(inst, inst.set_of({"p1"}), ~inst.no_voters()));
  VoterSet v1 = inst.no_voters();
  v1.set(0);
  EXPECT_FALSE(is_cohesive(inst, inst.set_of({"p1"}), v1));  // 3 > 3/2
  EXPECT_TRUE(is_cohesive(inst, inst.set_of({"p2"}), v1));
}

// The library's pruned search must agree with literal enumeration on every
// axiom, and every reported witness must itself be a violating cohesive pair.
TEST(Axioms, MatchNaiveOracle) {
  std::size_t checked = 0, violations = 0;
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    const Instance inst = random_instance(seed, 5, 5);
    for (const auto& mu : audit_functions(inst)) {
      const oracle::Ctx ctx(inst, mu);
      for (const ProjectSet& w : outcomes(inst, 1 + seed % 3)) {
        for (Axiom a : all_axioms) {
          const auto got = check_axiom(a, inst, mu, w);
          const auto want = oracle::naive_violation(a, inst, mu, w);
          ASSERT_EQ(got.has_value(), want.has_value())
              << to_string(a) << " " << mu.name() << " seed " << seed << " W=" << oracle::mask_of(w);
          ++checked;
          if (!got) continue;
          ++violations;
          EXPECT_TRUE(is_cohesive(inst, got->witness.T, got->witness.group));
          oracle::Mask g = 0;
          for_each_member(got->witness.group, [&](VoterIndex i) { g |= oracle::bit(i); });
          EXPECT_TRUE(oracle::pair_violates(a, ctx, oracle::mask_of(w), oracle::mask_of(got->witness.T), g))
              << to_string(a) << " seed " << seed;
        }
      }
    }
  }
  EXPECT_GT(checked, 10000u);
  EXPECT_GT(violations, 500u);
}

TEST(Axioms, LatticeHoldsOnRuleOutcomes) {
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    const Instance inst = random_instance(seed);
    const auto card = SatisfactionFunction::cardinality(inst);
    for (const ProjectSet& w : {run_mes(inst, card).outcome, run_seq_phragmen(inst).outcome,
                                run_maximin_support(inst).outcome, inst.empty_set()})
      for (const auto& mu : audit_functions(inst)) {
        const auto rep = audit_all(inst, mu, w);
        EXPECT_TRUE(rep.lattice_failures.empty()) << seed << " " << mu.name() << " " << rep.lattice_failures.front();
        EXPECT_FALSE(rep.any_guard());
      }
  }
}

TEST(Axioms, LatticeHoldsOnArbitraryOutcomes) {
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    const Instance inst = random_instance(seed, 5, 6);
    for (const ProjectSet& w : outcomes(inst, 3))
      for (const auto& mu : audit_functions(inst)) {
        const auto rep = audit_all(inst, mu, w);
        EXPECT_TRUE(rep.lattice_failures.empty()) << seed;
      }
  }
}

TEST(Axioms, EverythingPassesWhenAllProjectsAreFunded) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Instance inst = random_instance(seed);
    inst = Instance(inst.projects(), inst.ballots(), total_cost(inst, inst.all_projects()));
    for (const auto& mu : audit_functions(inst)) EXPECT_FALSE(audit_all(inst, mu, inst.all_projects()).any_violation());
  }
}

// With unit costs and cardinality the EJR variants coincide, and so do the
// PJR variants.
TEST(Axioms, UnitCostCollapse) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Instance inst = random_instance(seed, 5, 6, true);
    const auto card = SatisfactionFunction::cardinality(inst);
    for (const ProjectSet& w : outcomes(inst, 1 + seed % 4)) {
      const bool ejr = !check_ejr(inst, card, w);
      EXPECT_EQ(!check_ejrx(inst, card, w), ejr);
      EXPECT_EQ(!check_ejr1_plus(inst, card, w), ejr);
      EXPECT_EQ(!check_ejr1(inst, card, w), ejr);
      const bool pjr = !check_pjr(inst, card, w);
      EXPECT_EQ(!check_pjrx(inst, card, w), pjr);
      EXPECT_EQ(!check_pjr1(inst, card, w), pjr);
    }
  }
}

TEST(Axioms, GuardsAndJobs) {
  const Instance big = Instance::from_ids(repro_detail::unit_projects(15), {{"p1"}}, 3);
  const auto cost = SatisfactionFunction::cost(big);
  EXPECT_THROW(check_ejr(big, cost, big.empty_set()), GuardExceeded);
  AxiomOptions wide;
  wide.max_projects = 15;
  EXPECT_NO_THROW(check_ejr(big, cost, big.empty_set(), wide));
  const auto rep = audit_all(big, cost, big.empty_set());
  EXPECT_TRUE(rep.any_guard());
  EXPECT_FALSE(rep.any_violation());
  EXPECT_NE(rep.results.front().guard_message.find("m=15"), std::string::npos);

  // The reported witness does not depend on the thread count.
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Instance inst = random_instance(seed, 6, 8);
    const auto mu = SatisfactionFunction::cardinality(inst);
    const ProjectSet w = run_seq_phragmen(inst).outcome;
    AxiomOptions par;
    par.jobs = 4;
    for (Axiom a : all_axioms) {
      const auto one = check_axiom(a, inst, mu, w);
      const auto four = check_axiom(a, inst, mu, w, par);
      ASSERT_EQ(one.has_value(), four.has_value());
      if (one) {
        EXPECT_EQ(one->witness.T, four->witness.T);
        EXPECT_EQ(one->witness.group, four->witness.group);
        EXPECT_EQ(one->lhs, four->lhs);
      }
    }
  }
}
