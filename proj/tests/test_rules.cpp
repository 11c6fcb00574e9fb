#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pb/repro.hpp"
#include "pb/rules.hpp"
#include "random_instances.hpp"

using namespace pb;
using testing_support::random_instance;

namespace {

std::vector<SatisfactionFunction> additive_builtins(const Instance& inst) {
  return {SatisfactionFunction::cost(inst), SatisfactionFunction::cardinality(inst),
          SatisfactionFunction::sqrt_cost(inst), SatisfactionFunction::log_cost(inst),
          SatisfactionFunction::share(inst)};
}

}  // namespace

TEST(MinRho, SegmentsAndUnaffordable) {
  const Instance inst = Instance::from_ids({{"p", 2}, {"q", 4}}, {{"p", "q"}, {"p", "q"}}, 4);
  const auto card = SatisfactionFunction::cardinality(inst);
  const auto cost = SatisfactionFunction::cost(inst);
  EXPECT_EQ(*min_rho(inst, {1, 3}, card, 0), 1);
  EXPECT_EQ(*min_rho(inst, {frac(1, 2), 3}, card, 0), frac(3, 2));
  EXPECT_EQ(*min_rho(inst, {frac(1, 2), 3}, cost, 0), frac(3, 4));
  EXPECT_EQ(*min_rho(inst, {1, 3}, card, 1), 3);  // both pay everything
  EXPECT_FALSE(min_rho(inst, {1, 2}, card, 1));
  EXPECT_THROW(min_rho(inst, {1}, card, 0), InputError);
}

TEST(Mes, FrozenExamples) {
  const Instance inst = best_outcome_instance();
  EXPECT_EQ(run_mes(inst, SatisfactionFunction::cost(inst)).outcome, inst.set_of({"p1"}));
  EXPECT_EQ(run_mes(inst, SatisfactionFunction::cardinality(inst)).outcome, inst.set_of({"p2", "p3", "p4", "p5"}));
  // All five tie at rho = 1 under cost; reverse order buys p5..p2 and p1 no longer fits.
  const auto rev = run_mes(inst, SatisfactionFunction::cost(inst), TieBreak::reverse());
  EXPECT_EQ(rev.outcome, inst.set_of({"p2", "p3", "p4", "p5"}));
  EXPECT_EQ(inst.id(rev.trace.selections.front().project), "p5");

  const Instance c6 = mes_c6_instance();
  const auto r = run_mes(c6, SatisfactionFunction::cost(c6));
  EXPECT_EQ(r.outcome, c6.set_of({"p1"}));
  ASSERT_EQ(r.trace.selections.size(), 1u);
  EXPECT_EQ(r.trace.selections[0].value, frac(1, 2));
  EXPECT_EQ(r.trace.payments[0][0], frac(3, 2));
  ASSERT_TRUE(r.trace.delta);
  EXPECT_EQ(*r.trace.delta, 1);  // p2 costs 1, its supporter has nothing left
}

TEST(Mes, RejectsNonAdditive) {
  const Instance inst = mes_c6_instance();
  EXPECT_THROW(run_mes(inst, SatisfactionFunction::cc(inst)), CapabilityError);
}

TEST(Mes, TraceInvariants) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const Instance inst = random_instance(seed);
    for (const auto& mu : additive_builtins(inst)) {
      const auto r = run_mes(inst, mu);
      ASSERT_TRUE(is_outcome(inst, r.outcome));
      Money share = inst.budget() / Money(inst.voter_count());
      for (VoterIndex i = 0; i < inst.voter_count(); ++i) {
        Money paid = 0;
        for (ProjectIndex p = 0; p < inst.project_count(); ++p) {
          EXPECT_GE(r.trace.payments[i][p], 0);
          if (!r.outcome.test(p) || !inst.approves(i, p)) {
            EXPECT_EQ(r.trace.payments[i][p], 0);
          }
          paid += r.trace.payments[i][p];
        }
        EXPECT_LE(paid, share);
        EXPECT_EQ(r.trace.voter_budgets.back()[i], share - paid);
      }
      for_each_member(r.outcome, [&](ProjectIndex p) {
        Money sum = 0;
        for (VoterIndex i : inst.supporters(p)) sum += r.trace.payments[i][p];
        EXPECT_EQ(sum, inst.cost(p));
      });
      // Stopping rule: nothing left is affordable by its supporters.
      for (ProjectIndex p = 0; p < inst.project_count(); ++p) {
        if (r.outcome.test(p) || inst.supporters(p).empty()) continue;
        Money left = 0;
        for (VoterIndex i : inst.supporters(p)) left += r.trace.voter_budgets.back()[i];
        EXPECT_LT(left, inst.cost(p));
      }
    }
  }
}

TEST(Mes, MatchesReference) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Instance inst = random_instance(seed);
    for (const auto& mu : additive_builtins(inst))
      EXPECT_EQ(run_mes(inst, mu).outcome, oracle::mes(inst, mu)) << "seed " << seed << " " << mu.name();
  }
}

TEST(BalanceLoads, MatchesHallBoundAndIsValid) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Instance inst = random_instance(seed, 5, 6);
    const std::uint32_t full = (1u << inst.project_count()) - 1;
    for (std::uint32_t s = 0; s <= full; s += 1 + (seed % 3)) {
      const ProjectSet w = oracle::set_of(inst, s);
      bool supported = true;
      for_each_member(w, [&](ProjectIndex p) { supported = supported && !inst.supporters(p).empty(); });
      if (!supported) {
        EXPECT_THROW(balance_loads(inst, w), InputError);
        continue;
      }
      const LoadAssignment la = balance_loads(inst, w);
      EXPECT_EQ(la.max_load, *oracle::max_ratio(inst, w)) << "seed " << seed << " mask " << s;
      Money top = 0;
      for (VoterIndex i = 0; i < inst.voter_count(); ++i) top = std::max(top, la.voter_total(i));
      EXPECT_EQ(top, la.max_load);
      for (ProjectIndex p = 0; p < inst.project_count(); ++p) {
        Money sum = 0;
        for (VoterIndex i = 0; i < inst.voter_count(); ++i) {
          EXPECT_GE(la.loads[i][p], 0);
          if (!inst.approves(i, p) || !w.test(p)) {
            EXPECT_EQ(la.loads[i][p], 0);
          }
          sum += la.loads[i][p];
        }
        EXPECT_EQ(sum, w.test(p) ? inst.cost(p) : Money(0));
      }
    }
  }
}

TEST(BalanceLoads, Frozen) {
  const Instance inst = mes_c6_instance();
  EXPECT_EQ(balance_loads(inst, inst.all_projects()).max_load, frac(5, 2));
  EXPECT_EQ(balance_loads(inst, inst.set_of({"p2", "p3"})).max_load, 1);
  EXPECT_EQ(balance_loads(inst, inst.set_of({"p1"})).max_load, frac(3, 2));
  EXPECT_EQ(balance_loads(inst, inst.empty_set()).max_load, 0);
}

TEST(Phragmen, FrozenAndBlocking) {
  const Instance inst = mes_c6_instance();
  const auto r = run_seq_phragmen(inst);
  EXPECT_EQ(r.outcome, inst.set_of({"p2", "p3"}));
  ASSERT_TRUE(r.trace.blocking);
  EXPECT_EQ(inst.id(r.trace.blocking->project), "p1");
  EXPECT_EQ(r.trace.blocking->value, frac(5, 2));
  EXPECT_EQ(r.trace.voter_loads.back(), (std::vector<Money>{1, 1}));
}

TEST(Phragmen, PoolWithAndWithoutPrefilter) {
  const Instance inst = Instance::from_ids({{"p1", 10}, {"p2", 1}}, {{"p1", "p2"}}, 2);
  const auto plain = run_seq_phragmen(inst);
  EXPECT_EQ(plain.outcome, inst.set_of({"p2"}));
  ASSERT_TRUE(plain.trace.blocking);
  EXPECT_EQ(plain.trace.blocking->value, 11);
  const auto filtered = run_seq_phragmen(inst, TieBreak::lex(), {false, true});
  EXPECT_EQ(filtered.outcome, inst.set_of({"p2"}));
  EXPECT_FALSE(filtered.trace.blocking);
}

TEST(Phragmen, SkipBlockedIsExhaustiveOnApprovedProjects) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const Instance inst = random_instance(seed);
    for (bool maximin : {false, true}) {
      const auto r = maximin ? run_maximin_support(inst, TieBreak::lex(), {true, false})
                             : run_seq_phragmen(inst, TieBreak::lex(), {true, false});
      ASSERT_TRUE(is_outcome(inst, r.outcome));
      EXPECT_FALSE(r.trace.blocking);
      const Money left = inst.budget() - total_cost(inst, r.outcome);
      for (ProjectIndex p = 0; p < inst.project_count(); ++p)
        if (!r.outcome.test(p) && !inst.supporters(p).empty()) {
          EXPECT_GT(inst.cost(p), left) << seed;
        }
    }
  }
}

TEST(Phragmen, MatchesReferenceAndLoadsArePayments) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const Instance inst = random_instance(seed);
    const auto r = run_seq_phragmen(inst);
    EXPECT_EQ(r.outcome, oracle::phragmen(inst)) << "seed " << seed;
    for (VoterIndex i = 0; i < inst.voter_count(); ++i) {
      Money paid = 0;
      for (const auto& x : r.trace.payments[i]) paid += x;
      EXPECT_EQ(paid, r.trace.voter_loads.back()[i]);
    }
    for_each_member(r.outcome, [&](ProjectIndex p) {
      Money sum = 0;
      for (VoterIndex i : inst.supporters(p)) sum += r.trace.payments[i][p];
      EXPECT_EQ(sum, inst.cost(p));
    });
    // The run stops only at a blocking project or with nothing left.
    if (!r.trace.blocking) {
      for (ProjectIndex p = 0; p < inst.project_count(); ++p)
        if (!inst.supporters(p).empty()) {
          EXPECT_TRUE(r.outcome.test(p));
        }
    }
  }
}

TEST(Maximin, MatchesReference) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const Instance inst = random_instance(seed, 5, 6);
    const auto r = run_maximin_support(inst);
    EXPECT_EQ(r.outcome, oracle::maximin(inst)) << "seed " << seed;
    if (r.trace.blocking) {
      ASSERT_TRUE(r.trace.blocking_loads);
      ProjectSet next = r.outcome;
      next.set(r.trace.blocking->project);
      EXPECT_EQ(r.trace.blocking_loads->max_load, *oracle::max_ratio(inst, next));
    }
  }
}

TEST(Gcr, FrozenAndGuard) {
  const Instance inst = ejr1_incompatibility_instance();
  const auto r = run_gcr(inst, SatisfactionFunction::cost(inst));
  EXPECT_EQ(r.outcome, inst.set_of({"p1", "p2"}));
  const Instance big = Instance::from_ids(
      {{"a", 1}, {"b", 1}, {"c", 1}, {"d", 1}, {"e", 1}, {"f", 1}, {"g", 1}, {"h", 1}, {"i", 1}, {"j", 1}, {"k", 1},
       {"l", 1}, {"m", 1}},
      {{"a"}}, 3);
  EXPECT_THROW(run_gcr(big, SatisfactionFunction::cost(big)), GuardExceeded);
  EXPECT_NO_THROW(run_gcr(big, SatisfactionFunction::cost(big), {13, 12}));
}

TEST(Gcr, OutcomesAreFeasibleForEveryBuiltin) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Instance inst = random_instance(seed);
    for (const auto& mu : {SatisfactionFunction::cost(inst), SatisfactionFunction::cardinality(inst),
                           SatisfactionFunction::cc(inst)})
      EXPECT_TRUE(is_outcome(inst, run_gcr(inst, mu).outcome)) << seed;
  }
}
