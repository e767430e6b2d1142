#include <gtest/gtest.h>

#include <thread>

#include "oracle.hpp"
#include "reqeq/ir.hpp"
#include "reqeq/ir_text.hpp"
#include "test_util.hpp"

using namespace reqeq;

namespace {

Formula ge(const std::string& x, Operand rhs) { return Formula::atom(Atom::compare(x, CmpOp::Ge, std::move(rhs))); }
Formula eq(const std::string& x, const std::string& v) { return Formula::atom(Atom::enum_eq(x, v)); }

Signature r1_signature() {
  Signature sig;
  sig.add({"speed", Sort::numeric()});
  sig.add({"cal_speed", Sort::numeric()});
  sig.add({"belt_status", Sort::enumeration({"inactive", "active"})});
  sig.add({"chime", Sort::boolean()});
  return sig;
}

Formula r1_formula() {
  return Formula::implies(Formula::any_of({ge("speed", std::string("cal_speed")), eq("belt_status", "inactive")}),
                          Formula::var("chime"));
}

}  // namespace

TEST(Sort, EnumNeedsTwoDistinctValues) {
  EXPECT_THROW(Sort::enumeration({"only"}), Error);
  EXPECT_THROW(Sort::enumeration({"a", "a"}), Error);
  EXPECT_EQ(Sort::enumeration({"on", "off"}).str(), "enum{on,off}");
  EXPECT_EQ(Sort::numeric("km/h").str(), "numeric[km/h]");
  EXPECT_EQ(Sort::numeric("").str(), "numeric");
}

TEST(Signature, RejectsDuplicateAndInvalidNames) {
  Signature sig;
  sig.add({"speed", Sort::numeric()});
  EXPECT_THROW(sig.add({"speed", Sort::boolean()}), Error);
  EXPECT_THROW(sig.add({"Speed", Sort::boolean()}), Error);
  EXPECT_THROW(sig.add({"1speed", Sort::boolean()}), Error);
  EXPECT_THROW(sig.add({"", Sort::boolean()}), Error);
}

TEST(Evaluate, FalseAntecedentMakesImplicationTrue) {
  Signature sig;
  sig.add({"speed", Sort::numeric()});
  sig.add({"chime", Sort::boolean()});
  const Formula f = Formula::implies(ge("speed", std::int64_t{10}), Formula::var("chime"));
  const Assignment a{{"speed", Value::integer(9)}, {"chime", Value::boolean(false)}};
  EXPECT_TRUE(evaluate(f, sig, a));
}

TEST(Evaluate, IffIsReflexive) {
  const Signature sig = oracle::bool_signature({"p"});
  const Formula f = Formula::iff(Formula::var("p"), Formula::var("p"));
  for (bool v : {false, true}) EXPECT_TRUE(evaluate(f, sig, {{"p", Value::boolean(v)}}));
}

TEST(Evaluate, R1FormulaAtHandPickedAssignment) {
  // speed 12 >= cal 10 holds, so the antecedent is true and chime=false falsifies
  const Assignment a{{"speed", Value::integer(12)},
                     {"cal_speed", Value::integer(10)},
                     {"belt_status", Value::enumerated("inactive")},
                     {"chime", Value::boolean(false)}};
  EXPECT_FALSE(evaluate(r1_formula(), r1_signature(), a));
  EXPECT_FALSE(oracle::eval(r1_formula(), oracle::from_assignment(a)));
}

TEST(Evaluate, MissingBindingIsUnbound) {
  const Signature sig = oracle::bool_signature({"p", "q"});
  const Formula f = Formula::all_of({Formula::var("p"), Formula::var("q")});
  try {
    evaluate(f, sig, {{"p", Value::boolean(true)}});
    FAIL() << "expected UNBOUND_VARIABLE";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnboundVariable);
  }
}

TEST(Evaluate, BindingOutsideSortIsSortError) {
  const Signature sig = r1_signature();
  Assignment a{{"speed", Value::integer(1)},
               {"cal_speed", Value::integer(1)},
               {"belt_status", Value::enumerated("unknown")},
               {"chime", Value::boolean(true)}};
  EXPECT_THROW_CODE(evaluate(r1_formula(), sig, a), ErrorCode::SortError);
  a.insert_or_assign("belt_status", Value::enumerated("active"));
  a.insert_or_assign("speed", Value::boolean(true));
  EXPECT_THROW_CODE(evaluate(r1_formula(), sig, a), ErrorCode::SortError);
}

TEST(Evaluate, DeterministicAcrossThreads) {
  const Assignment a{{"speed", Value::integer(3)},
                     {"cal_speed", Value::integer(4)},
                     {"belt_status", Value::enumerated("active")},
                     {"chime", Value::boolean(false)}};
  const bool expected = evaluate(r1_formula(), r1_signature(), a);
  std::vector<std::thread> threads;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < 4; ++t)
    threads.emplace_back([&] {
      for (int i = 0; i < 500; ++i)
        if (evaluate(r1_formula(), r1_signature(), a) != expected) ++mismatches;
    });
  for (auto& t : threads) t.join();
  EXPECT_EQ(mismatches.load(), 0);
}

TEST(FreeVariables, SingleAtomAndVarVsVar) {
  EXPECT_EQ(free_variables(Formula::var("chime")), std::set<std::string>{"chime"});
  EXPECT_EQ(free_variables(r1_formula()), (std::set<std::string>{"belt_status", "cal_speed", "chime", "speed"}));
}

TEST(FreeVariables, R3AndG3Files) {
  const auto r3 = reqeq_test::load_ir("r3.ir");
  EXPECT_EQ(free_variables(r3.formula), (std::set<std::string>{"front_passenger_seat_belt_status",
                                                              "front_passenger_seat_belt_reminder_indication_on"}));
  const auto g3 = reqeq_test::load_ir("g3.ir");
  const auto fv = free_variables(g3.formula);
  EXPECT_TRUE(fv.contains("seat_occupancy"));
  EXPECT_TRUE(fv.contains("final_seatbelt_status"));
}

TEST(Normalize, FlattensAndDeduplicates) {
  const Formula a = Formula::var("a"), b = Formula::var("b"), c = Formula::var("c");
  EXPECT_EQ(normalize(Formula::all_of({a, Formula::all_of({b, a})})), Formula::all_of({a, b}));
  EXPECT_EQ(normalize(Formula::any_of({a, a})), a);
  const Formula canonical = Formula::implies(Formula::all_of({a, b}), c);
  EXPECT_EQ(normalize(canonical), canonical);
}

TEST(Normalize, IdempotentAndSemanticsPreservingOnRandomFormulas) {
  oracle::Generator gen(20240611);
  const std::vector<std::string> vars{"a", "b", "c", "d", "e", "f"};
  for (int i = 0; i < 1000; ++i) {
    const auto n = static_cast<std::size_t>(gen.uniform(1, 6));
    const std::vector<std::string> used(vars.begin(), vars.begin() + static_cast<long>(n));
    const Formula f = gen.formula(5, [&] { return Formula::var(used[static_cast<std::size_t>(gen.uniform(0, static_cast<int>(n) - 1))]); });
    const Formula nf = normalize(f);
    ASSERT_EQ(normalize(nf), nf) << to_sexpr(f);
    ASSERT_EQ(free_variables(nf), free_variables(f));
    ASSERT_TRUE(oracle::truth_table_equivalent(f, nf, used)) << to_sexpr(f);
  }
}

TEST(IrText, RoundTripNormalizes) {
  const Signature sig = r1_signature();
  const Formula f = Formula::all_of({r1_formula(), Formula::all_of({Formula::var("chime"), r1_formula()})});
  const Formalized back = parse_ir(serialize_ir(f, sig));
  EXPECT_EQ(back.formula, normalize(f));
  EXPECT_EQ(back.signature, sig);
}

TEST(IrText, RoundTripRandomNumericFormulas) {
  oracle::Generator gen(77);
  for (int i = 0; i < 200; ++i) {
    const auto setup = oracle::random_numeric_setup(gen);
    const auto [f, g] = oracle::random_numeric_pair(gen, setup);
    const Formalized back = parse_ir(serialize_ir(g, setup.sig));
    ASSERT_EQ(back.formula, normalize(g)) << serialize_ir(g, setup.sig);
    ASSERT_EQ(back.signature, setup.sig);
  }
}

TEST(IrText, EmptyInputIsMalformed) {
  EXPECT_THROW_CODE(parse_ir(""), ErrorCode::MalformedIr);
  EXPECT_THROW_CODE(parse_ir("var p : bool\n"), ErrorCode::MalformedIr);
}

TEST(IrText, UndeclaredVariableIsNamed) {
  const std::string text = serialize_ir(r1_formula(), r1_signature());
  std::string edited = text;
  edited.replace(edited.find("var chime : bool\n"), 17, "");
  try {
    parse_ir(edited, "edited.ir");
    FAIL() << "expected MALFORMED_IR";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedIr);
    EXPECT_NE(std::string(e.what()).find("chime"), std::string::npos) << e.what();
    EXPECT_TRUE(e.where().known());
  }
}

TEST(IrText, SyntaxErrorsCarryPosition) {
  try {
    parse_ir("var p : bool\n\n(and p\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedIr);
    EXPECT_TRUE(e.where().known());
  }
  EXPECT_THROW_CODE(parse_ir("var p : colour\n\np\n"), ErrorCode::MalformedIr);
  EXPECT_THROW_CODE(parse_ir("var p : bool\n\n(>= p 3)\n"), ErrorCode::MalformedIr);
  EXPECT_THROW_CODE(parse_ir("var e : enum{a,b}\n\n(= e c)\n"), ErrorCode::MalformedIr);
  EXPECT_THROW_CODE(parse_ir("var p : bool\n\n(and p)\n"), ErrorCode::MalformedIr);
  EXPECT_THROW_CODE(parse_ir("var p : bool\n\np p\n"), ErrorCode::MalformedIr);
}
