#include <gtest/gtest.h>

#include "oracle.hpp"
#include "reqeq/engine.hpp"
#include "reqeq/grounding.hpp"
#include "test_util.hpp"

using namespace reqeq;

namespace {

Formula cmp(const std::string& x, CmpOp op, Operand rhs) { return Formula::atom(Atom::compare(x, op, std::move(rhs))); }

std::vector<std::int64_t> ints(const VariablePlan& vp) {
  std::vector<std::int64_t> out;
  for (const auto& v : vp.values) out.push_back(v.as_int());
  return out;
}

Signature speed_chime() {
  Signature sig;
  sig.add({"speed", Sort::numeric()});
  sig.add({"chime", Sort::boolean()});
  return sig;
}

GroundedPair ground(const std::string& left, const std::string& right, const std::string& map) {
  return apply_grounding(reqeq_test::load_ir(left), reqeq_test::load_ir(right),
                         map.empty() ? GroundingMap{} : parse_grounding_map(reqeq_test::data(map), map));
}

void expect_valid_witness(const EquivalenceReport& r, const Formula& a, const Formula& b, const Signature& sig) {
  ASSERT_TRUE(r.witness.has_value());
  const bool va = evaluate(a, sig, *r.witness);
  const bool vb = evaluate(b, sig, *r.witness);
  EXPECT_NE(va, vb);
  EXPECT_EQ(va, r.left_at_witness);
  EXPECT_EQ(vb, r.right_at_witness);
}

}  // namespace

TEST(DomainPlan, SingleConstantGivesFiveValues) {
  const Formula f = Formula::implies(cmp("speed", CmpOp::Ge, std::int64_t{10}), Formula::var("chime"));
  const DomainPlan plan = build_domain_plan(speed_chime(), f, f);
  ASSERT_NE(plan.find("speed"), nullptr);
  EXPECT_EQ(ints(*plan.find("speed")), (std::vector<std::int64_t>{8, 9, 10, 11, 12}));
  EXPECT_EQ(plan.total_size, 10U);
}

TEST(DomainPlan, VarVsVarWithoutConstants) {
  Signature sig;
  sig.add({"speed", Sort::numeric()});
  sig.add({"cal_speed", Sort::numeric()});
  const Formula f = cmp("speed", CmpOp::Ge, std::string("cal_speed"));
  const DomainPlan plan = build_domain_plan(sig, f, f);
  EXPECT_EQ(ints(*plan.find("speed")), (std::vector<std::int64_t>{0, 1, 2, 3, 4}));
  EXPECT_EQ(ints(*plan.find("cal_speed")), (std::vector<std::int64_t>{0, 1, 2, 3, 4}));
}

TEST(DomainPlan, ProductOfBooleansAndEnum) {
  Signature sig;
  sig.add({"p", Sort::boolean()});
  sig.add({"q", Sort::boolean()});
  sig.add({"mode", Sort::enumeration({"a", "b", "c"})});
  const Formula f = Formula::all_of({Formula::var("p"), Formula::var("q"), Formula::atom(Atom::enum_eq("mode", "a"))});
  EXPECT_EQ(build_domain_plan(sig, f, f).total_size, 12U);
}

TEST(DomainPlan, EveryConstantHasNeighbours) {
  Signature sig;
  sig.add({"x", Sort::numeric()});
  sig.add({"y", Sort::numeric()});
  const Formula a = Formula::all_of({cmp("x", CmpOp::Lt, std::int64_t{-3}), cmp("y", CmpOp::Gt, std::int64_t{7})});
  const Formula b = cmp("x", CmpOp::Le, std::string("y"));
  const DomainPlan plan = build_domain_plan(sig, a, b);
  for (const char* v : {"x", "y"}) {
    const auto values = ints(*plan.find(v));
    for (std::int64_t c : {-3, 7})
      for (std::int64_t d : {-1, 0, 1})
        EXPECT_NE(std::find(values.begin(), values.end(), c + d), values.end()) << v << " misses " << c + d;
  }
}

TEST(DomainPlan, TooLargeIsReported) {
  std::vector<std::string> names;
  for (int i = 0; i < 21; ++i) names.push_back("p" + std::to_string(i));
  const Signature sig = oracle::bool_signature(names);
  std::vector<Formula> vars;
  for (const auto& n : names) vars.push_back(Formula::var(n));
  const Formula f = Formula::all_of(vars);
  EXPECT_THROW_CODE(build_domain_plan(sig, f, f), ErrorCode::PlanTooLarge);
  EXPECT_NO_THROW(build_domain_plan(sig, f, f, std::uint64_t{1} << 21));
}

TEST(Decide, UndeclaredVariableIsSignatureMismatch) {
  const Signature sig = oracle::bool_signature({"p"});
  EXPECT_THROW_CODE(decide(Formula::var("p"), Formula::var("q"), sig), ErrorCode::SignatureMismatch);
}

TEST(Decide, R1R2UnderRepoGroundingIsEquivalent) {
  const auto g = ground("r1.ir", "r2.ir", "r1_r2.map");
  const auto r = decide(g.left, g.right, g.merged);
  EXPECT_EQ(r.verdict, Verdict::Equivalent);
  EXPECT_TRUE(r.forward_holds);
  EXPECT_TRUE(r.reverse_holds);
  EXPECT_FALSE(r.witness.has_value());
  EXPECT_EQ(r.assignments_checked, r.plan_size);
  EXPECT_TRUE(oracle::brute_force(g.left, g.right, g.merged).equivalent);
}

TEST(Decide, R3G3UnderRepoGroundingIsNotEquivalent) {
  const auto g = ground("r3.ir", "g3.ir", "r3_g3.map");
  const auto r = decide(g.left, g.right, g.merged);
  EXPECT_EQ(r.verdict, Verdict::NotEquivalent);
  expect_valid_witness(r, g.left, g.right, g.merged);
  EXPECT_FALSE(oracle::brute_force(g.left, g.right, g.merged).equivalent);

  // the hand-checked witness: belt fastened then unfastened on an occupied seat, reminder on
  const Assignment hand{{"final_seatbelt_status", Value::enumerated("unfastened")},
                        {"front_passenger_seat_belt_reminder_indication_on", Value::boolean(true)},
                        {"front_passenger_seat_belt_status", Value::enumerated("fastened")},
                        {"seat_occupancy", Value::enumerated("occupied")}};
  EXPECT_FALSE(evaluate(g.left, g.merged, hand));
  EXPECT_TRUE(evaluate(g.right, g.merged, hand));
}

TEST(Decide, StrictVersusNonStrictBoundary) {
  const Formula a = Formula::implies(cmp("speed", CmpOp::Ge, std::int64_t{10}), Formula::var("chime"));
  const Formula b = Formula::implies(cmp("speed", CmpOp::Gt, std::int64_t{10}), Formula::var("chime"));
  const auto r = decide(a, b, speed_chime());
  EXPECT_EQ(r.verdict, Verdict::NotEquivalent);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(r.witness->at("speed").as_int(), 10);
  EXPECT_FALSE(r.witness->at("chime").as_bool());
  EXPECT_FALSE(r.left_at_witness);
  EXPECT_TRUE(r.right_at_witness);
  EXPECT_FALSE(r.reverse_holds);
  EXPECT_TRUE(r.forward_holds);
}

TEST(Decide, ReflexiveSymmetricDeterministic) {
  oracle::Generator gen(4242);
  const std::vector<std::string> vars{"a", "b", "c", "d"};
  const Signature sig = oracle::bool_signature(vars);
  for (int i = 0; i < 200; ++i) {
    const auto [f, g] = oracle::random_bool_pair(gen, vars);
    EXPECT_EQ(decide(f, f, sig).verdict, Verdict::Equivalent);
    const auto fg = decide(f, g, sig);
    const auto gf = decide(g, f, sig);
    ASSERT_EQ(fg.verdict, gf.verdict);
    EXPECT_EQ(fg.forward_holds, gf.reverse_holds);
    EXPECT_EQ(fg.reverse_holds, gf.forward_holds);
    const auto again = decide(f, g, sig);
    EXPECT_EQ(again.witness, fg.witness);
    EXPECT_EQ(again.assignments_checked, fg.assignments_checked);
  }
}

TEST(Decide, TransitiveOnRewriteChains) {
  oracle::Generator gen(99);
  const std::vector<std::string> vars{"a", "b", "c"};
  const Signature sig = oracle::bool_signature(vars);
  const auto leaf = [&] { return Formula::var(vars[static_cast<std::size_t>(gen.uniform(0, 2))]); };
  for (int i = 0; i < 100; ++i) {
    const Formula a = gen.formula(4, leaf);
    const Formula b = gen.rewrite(a);
    const Formula c = gen.rewrite(b);
    ASSERT_TRUE(oracle::truth_table_equivalent(a, b, vars)) << to_sexpr(a) << " vs " << to_sexpr(b);
    ASSERT_EQ(decide(a, b, sig).verdict, Verdict::Equivalent) << to_sexpr(a) << " vs " << to_sexpr(b);
    ASSERT_EQ(decide(b, c, sig).verdict, Verdict::Equivalent);
    ASSERT_EQ(decide(a, c, sig).verdict, Verdict::Equivalent);
  }
}

TEST(Decide, WitnessIsLexicographicallyFirst) {
  // differs whenever p or q; the first assignment in sorted order is p=false, q=true
  const Signature sig = oracle::bool_signature({"q", "p"});
  const auto r = decide(Formula::any_of({Formula::var("p"), Formula::var("q")}),
                        Formula::all_of({Formula::var("p"), Formula::negate(Formula::var("p"))}), sig);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_FALSE(r.witness->at("p").as_bool());
  EXPECT_TRUE(r.witness->at("q").as_bool());
}

TEST(Decide, MatchesTruthTableOnRandomPairs) {
  oracle::Generator gen(1);
  const std::vector<std::string> all{"a", "b", "c", "d", "e", "f"};
  int equivalent = 0;
  for (int i = 0; i < 500; ++i) {
    const auto n = static_cast<std::size_t>(gen.uniform(1, 6));
    const std::vector<std::string> vars(all.begin(), all.begin() + static_cast<long>(n));
    const auto [f, g] = oracle::random_bool_pair(gen, vars);
    const auto r = decide(f, g, oracle::bool_signature(vars));
    const bool expected = oracle::truth_table_equivalent(f, g, vars);
    ASSERT_EQ(r.verdict == Verdict::Equivalent, expected) << to_sexpr(f) << " vs " << to_sexpr(g);
    if (expected) ++equivalent;
    else expect_valid_witness(r, f, g, oracle::bool_signature(vars));
  }
  EXPECT_GT(equivalent, 50);
  EXPECT_LT(equivalent, 450);
}

TEST(Decide, MatchesWideWindowOnRandomNumericPairs) {
  oracle::Generator gen(2);
  for (int i = 0; i < 150; ++i) {
    const auto s = oracle::random_numeric_setup(gen);
    const auto [f, g] = oracle::random_numeric_pair(gen, s);
    const auto r = decide(f, g, s.sig);
    ASSERT_EQ(r.verdict == Verdict::Equivalent, oracle::brute_force(f, g, s.sig).equivalent)
        << to_sexpr(f) << " vs " << to_sexpr(g);
  }
}

TEST(Decide, ChainOfThreeVariablesNeedsRoomBetweenConstants) {
  // a < x < y < z < b with b - a large: needs three distinct values strictly between
  Signature sig;
  for (const char* v : {"x", "y", "z"}) sig.add({v, Sort::numeric()});
  const Formula chain = Formula::all_of({cmp("x", CmpOp::Gt, std::int64_t{0}), cmp("x", CmpOp::Lt, std::string("y")),
                                         cmp("y", CmpOp::Lt, std::string("z")), cmp("z", CmpOp::Lt, std::int64_t{10})});
  const Formula never = Formula::all_of({Formula::var("p"), Formula::negate(Formula::var("p"))});
  Signature with_p = sig;
  with_p.add({"p", Sort::boolean()});
  const auto r = decide(chain, never, with_p);
  EXPECT_EQ(r.verdict, Verdict::NotEquivalent);
  EXPECT_EQ(check_satisfiable(chain, sig).status, SatStatus::Sat);
}

TEST(CheckSatisfiable, ContradictionTautologyAndR1) {
  const Signature sig = oracle::bool_signature({"p"});
  const Formula p = Formula::var("p");
  EXPECT_EQ(check_satisfiable(Formula::all_of({p, Formula::negate(p)}), sig).status, SatStatus::Unsat);
  EXPECT_EQ(check_satisfiable(Formula::implies(p, p), sig).status, SatStatus::TriviallyValid);
  const auto r1 = reqeq_test::load_ir("r1.ir");
  const auto res = check_satisfiable(r1.formula, r1.signature);
  ASSERT_EQ(res.status, SatStatus::Sat);
  ASSERT_TRUE(res.witness.has_value());
  EXPECT_TRUE(evaluate(r1.formula, r1.signature, *res.witness));
  EXPECT_FALSE(evaluate(r1.formula, r1.signature, *res.falsifier));
}
