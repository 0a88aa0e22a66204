#include <random>

#include <gtest/gtest.h>

#include "guard/smt/solver.hpp"

using namespace guard;
using namespace guard::smt;

namespace {

Term x_int() { return var("x", Sort::integer()); }

} // namespace

TEST(Term, IllSortedConstructionThrows)
{
  Term x = x_int();
  Term r = var("r", Sort::real());
  EXPECT_THROW(add(x, r), SortError);
  EXPECT_THROW(ite(x, x, x), SortError);
  EXPECT_THROW(ite(gt(x, int_lit(0)), x, r), SortError);
  EXPECT_THROW(bv_add(var("a", Sort::bitvec(32)), var("b", Sort::bitvec(8))), SortError);
  EXPECT_THROW(div_floor(r, r), SortError);
  EXPECT_THROW(str_contains(x, str_lit("a")), SortError);
  EXPECT_THROW(Sort::bitvec(0), SortError);
  EXPECT_NO_THROW(add(to_real(x), r));
}

TEST(Term, FreeVarsRejectsSortClash)
{
  std::vector<Term> ts{gt(x_int(), int_lit(1)), gt(var("x", Sort::real()), real_lit(1))};
  EXPECT_THROW(free_vars(ts), SortError);
}

TEST(Serialize, ContainsAssertAndCheckSat)
{
  Term x = x_int();
  std::vector<Term> decls{x}, asserts{gt(x, int_lit(5))};
  std::string s = serialize(decls, asserts);
  EXPECT_NE(s.find("(assert (> x 5))"), std::string::npos);
  EXPECT_NE(s.find("(check-sat)"), std::string::npos);
  EXPECT_NE(s.find("(get-model)"), std::string::npos);
  EXPECT_NE(s.find("(set-logic QF_LIA)"), std::string::npos);
  EXPECT_EQ(s, serialize(decls, asserts));
}

TEST(Serialize, LogicSelection)
{
  Term x = x_int(), y = var("y", Sort::real()), s = var("s", Sort::string());
  Term a = var("a", Sort::bitvec(32)), m = var("m", Sort::array(32, 32));
  auto logic = [](std::vector<Term> as) { return select_logic(free_vars(as), as); };
  EXPECT_EQ(logic({gt(x, int_lit(0))}), "QF_LIA");
  EXPECT_EQ(logic({gt(y, real_lit(0))}), "QF_LRA");
  EXPECT_EQ(logic({gt(to_real(x), y)}), "QF_LIRA");
  EXPECT_EQ(logic({gt(mul(x, x), int_lit(0))}), "QF_NIA");
  EXPECT_EQ(logic({eq(div_floor(int_lit(1), x), int_lit(0))}), "QF_NIA");
  EXPECT_EQ(logic({gt(mul(y, real_lit(3)), real_lit(0))}), "QF_LRA");
  EXPECT_EQ(logic({str_contains(s, str_lit("a"))}), "ALL");
  EXPECT_EQ(logic({bv_slt(a, bv_lit(0, 32))}), "QF_BV");
  EXPECT_EQ(logic({eq(select(m, a), a)}), "QF_ABV");
  EXPECT_EQ(logic({var("p", Sort::boolean())}), "QF_UF");
}

TEST(Serialize, SharedSubtermsAreLetBound)
{
  // 2^20 tree nodes, 20 DAG nodes.
  Term t = x_int();
  for (int i = 0; i < 20; i++)
    t = add(t, t);
  std::string s = to_smtlib(gt(t, int_lit(0)));
  EXPECT_LT(s.size(), 2000u);
  EXPECT_NE(s.find("(let"), std::string::npos);
}

TEST(Serialize, StringLiteralEscapes)
{
  EXPECT_EQ(string_literal("a\"b"), "\"a\"\"b\"");
  EXPECT_EQ(string_literal("a\\b"), "\"a\\u{5c}b\"");
  EXPECT_EQ(unescape_string("a\\u{5c}b\\u{0}"), std::string("a\\b\0", 4));
}

TEST(ModelParse, ArraysRealsAndAlgebraics)
{
  Term m = var("mem", Sort::array(32, 32));
  Term x = var("x", Sort::real());
  Term a = var("a", Sort::bitvec(32));
  std::vector<Term> decls{m, x, a};
  std::string reply = R"((
  (define-fun a () (_ BitVec 32) #x80000000)
  (define-fun x () Real (- (/ 10.0 3.0)))
  (define-fun mem () (Array (_ BitVec 32) (_ BitVec 32))
    (store ((as const (Array (_ BitVec 32) (_ BitVec 32))) #x00000000) #x00000004 #xb24550b0))
))";
  Model model = parse_model(reply, decls);
  EXPECT_EQ(model.at("a").as_bv().bits, 0x80000000u);
  EXPECT_EQ(value_literal(model.at("a")), "#x80000000");
  EXPECT_EQ(model.at("x").as_real(), Rational(-10, 3));
  EXPECT_EQ(model.at("mem").as_array().select(4), 0xb24550b0u);
  EXPECT_EQ(model.at("mem").as_array().select(8), 0u);

  std::string as_array = R"((
  (define-fun mem () (Array (_ BitVec 32) (_ BitVec 32)) (_ as-array k!0))
  (define-fun k!0 ((x!0 (_ BitVec 32))) (_ BitVec 32)
    (ite (= x!0 #x00000008) #x00000001 (ite (= x!0 #x0000000c) #x00000002 #x00000007)))
))";
  Model m2 = parse_model(as_array, decls);
  EXPECT_EQ(m2.at("mem").as_array().select(8), 1u);
  EXPECT_EQ(m2.at("mem").as_array().select(12), 2u);
  EXPECT_EQ(m2.at("mem").as_array().select(0), 7u);
  EXPECT_EQ(m2.at("x").as_real(), Rational(0)); // omitted -> default

  std::string alg = "((define-fun x () Real (root-obj (+ (^ x 2) (- 2)) 1)))";
  EXPECT_TRUE(parse_model(alg, decls).at("x").is_algebraic());
  EXPECT_THROW(parse_model("((define-fun a () (_ BitVec 32) banana))", decls), ModelParseError);
}

class SolverTest : public ::testing::Test {
protected:
  Solver solver;
};

TEST_F(SolverTest, EmptyAssertionsAreSat)
{
  auto r = solver.check_sat(std::vector<Term>{}, std::vector<Term>{});
  ASSERT_TRUE(r.is_sat());
  EXPECT_TRUE(r.model().empty());
}

TEST_F(SolverTest, Contradiction)
{
  Term x = x_int();
  auto r = solver.check_sat(std::vector<Term>{and_(gt(x, int_lit(5)), lt(x, int_lit(4)))});
  EXPECT_TRUE(r.is_unsat());
  EXPECT_GE(r.elapsed_ms, 0);
}

TEST_F(SolverTest, SatModelSatisfiesAssertion)
{
  Term x = x_int();
  std::vector<Term> as{gt(x, int_lit(5))};
  auto r = solver.check_sat(as);
  ASSERT_TRUE(r.is_sat());
  EXPECT_GE(r.model().at("x").as_int(), 6);
  EXPECT_TRUE(holds(as[0], r.model()));
}

TEST_F(SolverTest, BitvectorModelRoundTripsHex)
{
  Term r = var("r", Sort::bitvec(32));
  std::vector<Term> as{bv_slt(r, bv_lit(0, 32)), eq(bv_neg(r), r)};
  auto res = solver.check_sat(as);
  ASSERT_TRUE(res.is_sat());
  // The only negative fixpoint of negation.
  EXPECT_EQ(res.model().at("r").to_string(), "0x80000000");
  EXPECT_EQ(value_literal(res.model().at("r")), "#x80000000");
}

TEST_F(SolverTest, StringWitnessContainsPattern)
{
  Term s = var("s", Sort::string());
  auto r = solver.check_sat(std::vector<Term>{str_contains(s, str_lit("DROP TABLE"))});
  ASSERT_TRUE(r.is_sat());
  EXPECT_NE(r.model().at("s").as_string().find("DROP TABLE"), std::string::npos);
}

TEST_F(SolverTest, StringWitnessWithQuotesAndBackslashes)
{
  Term s = var("s", Sort::string());
  std::vector<Term> as{str_contains(s, str_lit("a\"\\b")), gt(str_len(s), int_lit(6))};
  auto r = solver.check_sat(as);
  ASSERT_TRUE(r.is_sat());
  EXPECT_NE(r.model().at("s").as_string().find("a\"\\b"), std::string::npos);
  EXPECT_TRUE(holds(as[1], r.model()));
}

TEST_F(SolverTest, ProveReflexivityAndTightening)
{
  Term x = x_int();
  EXPECT_TRUE(solver.prove(std::vector<Term>{}, eq(x, x)).proven());
  EXPECT_TRUE(solver.prove(std::vector<Term>{gt(x, int_lit(0))}, ge(x, int_lit(1))).proven());
}

TEST_F(SolverTest, ProveCounterexampleMatchesEnumeration)
{
  // Oracle: the positive integers violating x > 1, enumerated.
  std::vector<int> violating;
  for (int v = -1000; v <= 1000; v++)
    if (v > 0 && !(v > 1))
      violating.push_back(v);
  ASSERT_EQ(violating, std::vector<int>{1});

  Term x = x_int();
  auto r = solver.prove(std::vector<Term>{gt(x, int_lit(0))}, gt(x, int_lit(1)));
  ASSERT_TRUE(r.refuted());
  EXPECT_EQ(r.model().at("x").as_int(), violating[0]);
}

TEST_F(SolverTest, FloorDivisionAgreesWithEvaluator)
{
  // Two routes: the solver's Euclidean lowering and the evaluator's direct floor.
  std::vector<Term> as;
  std::vector<std::pair<int, int>> pairs;
  for (int a : {-7, -6, -1, 0, 1, 6, 7})
    for (int b : {-3, -2, -1, 1, 2, 3}) {
      pairs.emplace_back(a, b);
      std::string i = std::to_string(pairs.size());
      as.push_back(eq(var("q" + i, Sort::integer()), div_floor(int_lit(a), int_lit(b))));
      as.push_back(eq(var("m" + i, Sort::integer()), mod_floor(int_lit(a), int_lit(b))));
    }
  auto r = solver.check_sat(as);
  ASSERT_TRUE(r.is_sat());
  for (size_t k = 0; k < pairs.size(); k++) {
    auto [a, b] = pairs[k];
    std::string i = std::to_string(k + 1);
    EXPECT_EQ(r.model().at("q" + i).as_int(), floor_div(a, b)) << a << " // " << b;
    EXPECT_EQ(r.model().at("m" + i).as_int(), floor_mod(a, b)) << a << " % " << b;
  }
  // Python: 7 // -2 == -4, 7 % -2 == -1
  EXPECT_EQ(floor_div(7, -2), -4);
  EXPECT_EQ(floor_mod(7, -2), -1);
}

TEST_F(SolverTest, MissingBinaryIsEnvironmentError)
{
  Solver bad{"/nonexistent/solver-binary"};
  EXPECT_THROW(bad.check_sat(std::vector<Term>{bool_lit(true)}), SolverEnvironmentError);
}

TEST_F(SolverTest, IdentityIsReported)
{
  EXPECT_FALSE(solver.identity().empty());
}

TEST_F(SolverTest, UndeclaredVariableRejected)
{
  std::vector<Term> decls{}, as{gt(x_int(), int_lit(0))};
  EXPECT_THROW(solver.check_sat(decls, as), std::invalid_argument);
}

namespace {

// Random linear integer formulas over three variables.
Term random_formula(std::mt19937 &rng, int depth)
{
  static const std::vector<Term> vars{var("a", Sort::integer()), var("b", Sort::integer()),
                                      var("c", Sort::integer())};
  std::uniform_int_distribution<int> pick(0, 5), small(-6, 6), vi(0, 2);
  auto linear = [&] {
    Term t = mul(int_lit(small(rng)), vars[vi(rng)]);
    return add(t, add(vars[vi(rng)], int_lit(small(rng))));
  };
  if (depth == 0) {
    switch (pick(rng) % 3) {
    case 0: return lt(linear(), linear());
    case 1: return eq(linear(), linear());
    default: return ge(linear(), int_lit(small(rng)));
    }
  }
  switch (pick(rng)) {
  case 0: return and_(random_formula(rng, depth - 1), random_formula(rng, depth - 1));
  case 1: return or_(random_formula(rng, depth - 1), random_formula(rng, depth - 1));
  case 2: return not_(random_formula(rng, depth - 1));
  case 3:
    return implies(random_formula(rng, depth - 1), random_formula(rng, depth - 1));
  default: return random_formula(rng, 0);
  }
}

} // namespace

TEST_F(SolverTest, ProveAgreesWithRefutationAndModelsAreSound)
{
  std::mt19937 rng{20260316};
  for (int i = 0; i < 25; i++) {
    Term assumption = random_formula(rng, 2);
    Term property = random_formula(rng, 2);
    std::vector<Term> as{assumption};
    auto decls = free_vars(std::vector<Term>{assumption, property});
    auto proof = solver.prove(decls, as, property, 2000);
    auto sat = solver.check_sat(decls, std::vector<Term>{assumption, not_(property)}, 2000);
    ASSERT_FALSE(proof.unknown());
    EXPECT_EQ(proof.proven(), sat.is_unsat());
    if (proof.refuted()) {
      EXPECT_TRUE(holds(assumption, proof.model()));
      EXPECT_FALSE(holds(property, proof.model()));
    }
    // A larger budget never flips a decided answer.
    auto again = solver.check_sat(decls, std::vector<Term>{assumption, not_(property)}, 20000);
    if (!again.is_unknown() && !sat.is_unknown()) {
      EXPECT_EQ(again.is_sat(), sat.is_sat());
    }
  }
}
