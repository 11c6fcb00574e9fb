#include <gtest/gtest.h>

#include "pb/generator.hpp"
#include "pb/json_io.hpp"
#include "pb/pabulib.hpp"
#include "pb/repro.hpp"

using namespace pb;

namespace {

ParseErrorKind parse_kind(const std::string& text) {
  try {
    parse_pabulib(text);
  } catch (const ParseError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no parse error for:\n" << text;
  return ParseErrorKind::schema;
}

const char* kSmall =
    "META\nkey;value\nnum_projects;3\nnum_votes;2\nbudget;3\nvote_type;approval\n"
    "PROJECTS\nproject_id;cost;name\np1;3;Park\np2;1;Bench\np3;1.0;Tree\n"
    "VOTES\nvoter_id;vote\n1;p1,p2\n2;p1, p3\n";

}  // namespace

TEST(Rational, ParsesFractionsDecimalsAndExponents) {
  EXPECT_EQ(parse_rational("3/6"), frac(1, 2));
  EXPECT_EQ(parse_rational(" 2.5 "), frac(5, 2));
  EXPECT_EQ(parse_rational("-0.125"), frac(-1, 8));
  EXPECT_EQ(parse_rational("1.5e3"), Rational(1500));
  EXPECT_EQ(parse_rational("12"), Rational(12));
  EXPECT_EQ(to_string(parse_rational("4/2")), "2");
  for (const char* bad : {"", "1/0", "abc", "1..2", "1/x", "e5"}) EXPECT_THROW(parse_rational(bad), ParseError) << bad;
}

TEST(Rational, FracIsCanonical) {
  EXPECT_EQ(frac(42, 10), frac(21, 5));
  EXPECT_EQ(to_string(frac(42, 10)), "21/5");
}

TEST(Instance, RejectsInvalidData) {
  EXPECT_THROW(Instance::from_ids({{"p1", 0}}, {{"p1"}}, 1), InputError);
  EXPECT_THROW(Instance::from_ids({{"p1", 1}}, {{"p1"}}, 0), InputError);
  EXPECT_THROW(Instance::from_ids({{"p1", 1}, {"p1", 2}}, {{"p1"}}, 1), InputError);
  EXPECT_THROW(Instance::from_ids({{"p1", 1}}, {{"p9"}}, 1), InputError);
  EXPECT_THROW(Instance::from_ids({{"p1", 1}}, {}, 1), InputError);
  EXPECT_THROW(Instance::from_ids({}, {{}}, 1), InputError);
}

TEST(Instance, OutcomesAndExhaustiveness) {
  const Instance inst = mes_c6_instance();
  EXPECT_EQ(inst.voter_count(), 2u);
  EXPECT_EQ(total_cost(inst, inst.set_of({"p2", "p3"})), 2);
  EXPECT_TRUE(is_outcome(inst, inst.set_of({"p1"})));
  EXPECT_FALSE(is_outcome(inst, inst.set_of({"p1", "p2"})));
  EXPECT_TRUE(is_exhaustive(inst, inst.set_of({"p1"})));
  EXPECT_FALSE(is_exhaustive(inst, inst.set_of({"p2"})));  // p3 still fits
  EXPECT_TRUE(is_exhaustive(inst, inst.set_of({"p2", "p3"})));  // p1 costs 3 > 1 left
  EXPECT_EQ(inst.supporters(0).size(), 2u);
  EXPECT_FALSE(is_unit_cost(inst));
  EXPECT_TRUE(is_unit_cost(local_bpjr_pjr_instance()));
  EXPECT_THROW(inst.index("p9"), InputError);
  EXPECT_THROW(inst.check_set(ProjectSet(7)), InputError);
}

TEST(Pabulib, ParsesApprovalFile) {
  const Instance inst = parse_pabulib(kSmall);
  EXPECT_EQ(inst.project_count(), 3u);
  EXPECT_EQ(inst.voter_count(), 2u);
  EXPECT_EQ(inst.budget(), 3);
  EXPECT_EQ(inst.cost(2), 1);
  EXPECT_TRUE(inst.approves(1, 2));
  EXPECT_FALSE(inst.approves(0, 2));
}

TEST(Pabulib, RoundTripsThroughEmit) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GeneratorParams gp;
    gp.cost_denominator = 3;
    const Instance a = generate_random(gp, seed);
    const Instance b = parse_pabulib(emit_pabulib(a));
    EXPECT_EQ(emit_pabulib(a), emit_pabulib(b));
    EXPECT_EQ(emit_json(a), emit_json(b));
  }
}

TEST(Pabulib, ReportsErrorKinds) {
  EXPECT_EQ(parse_kind("PROJECTS\nproject_id;cost\np1;1\n"), ParseErrorKind::missing_section);
  EXPECT_EQ(parse_kind("p1;1\nMETA\n"), ParseErrorKind::missing_section);
  EXPECT_EQ(parse_kind("META\nkey;value\nnum_projects;1\nnum_votes;1\nvote_type;approval\n"
                       "PROJECTS\nproject_id;cost\np1;1\nVOTES\nvoter_id;vote\n1;p1\n"),
            ParseErrorKind::missing_key);
  EXPECT_EQ(parse_kind("META\nkey;value\nnum_projects;1\nnum_votes;1\nbudget;1\nvote_type;ordinal\n"
                       "PROJECTS\nproject_id;cost\np1;1\nVOTES\nvoter_id;vote\n1;p1\n"),
            ParseErrorKind::unsupported_vote_type);
  EXPECT_EQ(parse_kind("META\nkey;value\nnum_projects;1\nnum_votes;1\nbudget;x\nvote_type;approval\n"
                       "PROJECTS\nproject_id;cost\np1;1\nVOTES\nvoter_id;vote\n1;p1\n"),
            ParseErrorKind::malformed_number);
  EXPECT_EQ(parse_kind("META\nkey;value\nnum_projects;1\nnum_votes;1\nbudget;1\nvote_type;approval\n"
                       "PROJECTS\nproject_id;cost\np1;1\nVOTES\nvoter_id;vote\n1;p7\n"),
            ParseErrorKind::dangling_project);
  EXPECT_EQ(parse_kind("META\nkey;value\nnum_projects;2\nnum_votes;1\nbudget;1\nvote_type;approval\n"
                       "PROJECTS\nproject_id;cost\np1;1\np1;2\nVOTES\nvoter_id;vote\n1;p1\n"),
            ParseErrorKind::duplicate_id);
  EXPECT_EQ(parse_kind("META\nkey;value\nnum_projects;2\nnum_votes;1\nbudget;1\nvote_type;approval\n"
                       "PROJECTS\nproject_id;cost\np1;1\nVOTES\nvoter_id;vote\n1;p1\n"),
            ParseErrorKind::count_mismatch);
}

TEST(Pabulib, AcceptsQuotedFieldsAndCrLf) {
  const Instance inst = parse_pabulib(
      "META\r\nkey;value\r\nnum_projects;2\r\nnum_votes;1\r\nbudget;2\r\nvote_type;approval\r\n"
      "PROJECTS\r\nproject_id;cost;name\r\np1;1;\"Park; north\"\r\np2;1;x\r\nVOTES\r\nvoter_id;vote\r\n1;\"p1,p2\"\r\n");
  EXPECT_EQ(inst.project_count(), 2u);
  EXPECT_TRUE(inst.approves(0, 1));
}

TEST(JsonIo, RoundTripAndSchemaErrors) {
  const Instance inst = ejrx_separation_instance();
  const Instance back = parse_json(emit_json(inst));
  EXPECT_EQ(emit_json(inst), emit_json(back));
  EXPECT_EQ(back.cost(0), frac(5, 2));
  EXPECT_THROW(parse_json("{"), ParseError);
  EXPECT_THROW(parse_json(R"({"n":1,"budget":"1","projects":[{"id":"p1","cost":"1"}]})"), ParseError);
  EXPECT_THROW(parse_json(R"({"n":2,"budget":"1","projects":[{"id":"p1","cost":"1"}],"approvals":[["p1"]]})"),
               ParseError);
  EXPECT_THROW(parse_json(R"({"n":1,"budget":"1","projects":[{"id":"p1","cost":"1"}],"approvals":[["p2"]]})"),
               ParseError);
  const Instance numeric = parse_json(R"({"n":1,"budget":2.5,"projects":[{"id":"a","cost":1}],"approvals":[["a"]]})");
  EXPECT_EQ(numeric.budget(), frac(5, 2));
}

TEST(JsonIo, OutcomeParsing) {
  const Instance inst = mes_c6_instance();
  EXPECT_EQ(outcome_from_json(inst, Json::parse(R"(["p3","p1"])")), inst.set_of({"p1", "p3"}));
  EXPECT_THROW(outcome_from_json(inst, Json::parse(R"(["p9"])")), ParseError);
  EXPECT_THROW(outcome_from_json(inst, Json::parse(R"({"a":1})")), ParseError);
}

TEST(Generator, DeterministicAndWithinRanges) {
  GeneratorParams gp;
  gp.voters = 5;
  gp.projects = 7;
  gp.cost_denominator = 4;
  gp.budget = BudgetRange{Money(3), Money(9), 2};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Instance a = generate_random(gp, seed), b = generate_random(gp, seed);
    EXPECT_EQ(emit_json(a), emit_json(b));
    EXPECT_GE(a.budget(), 3);
    EXPECT_LE(a.budget(), 9);
    EXPECT_EQ(Rational(a.budget() * 2).get_den(), 1);
    for (const auto& p : a.projects()) {
      EXPECT_GE(p.cost, 1);
      EXPECT_LE(p.cost, 5);
      EXPECT_EQ(Rational(p.cost * 4).get_den(), 1);
    }
    for (const auto& ballot : a.ballots()) EXPECT_TRUE(ballot.any());
  }
  EXPECT_NE(emit_json(generate_random(gp, 1)), emit_json(generate_random(gp, 2)));
  gp.approval_density = 0;
  EXPECT_THROW(generate_random(gp, 0), InputError);
}
