#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "guard/code/verify.hpp"
#include "../support/python_oracle.hpp"

using namespace guard;
using namespace guard::code;

namespace {

FunctionUnit parse_ok(const std::string &src)
{
  auto r = parse_function(src);
  if (auto *u = std::get_if<UnsupportedFeature>(&r))
    ADD_FAILURE() << "unexpected unsupported feature " << u->feature;
  return std::get<FunctionUnit>(r);
}

UnsupportedFeature parse_unsupported(const std::string &src)
{
  auto r = parse_function(src);
  EXPECT_TRUE(std::holds_alternative<UnsupportedFeature>(r)) << src;
  if (auto *u = std::get_if<UnsupportedFeature>(&r))
    return *u;
  return {};
}

smt::Model ints(std::initializer_list<std::pair<const char *, long long>> kv)
{
  smt::Model m;
  for (auto &[k, v] : kv)
    m.set(k, smt::Value::from_int(v));
  return m;
}

long long eval_int(const smt::Term &t, const smt::Model &m)
{
  return smt::evaluate(t, m).as_int().convert_to<long long>();
}

const char *abs_src = "def f(x: int) -> int:\n"
                      "    if x >= 0:\n"
                      "        return x\n"
                      "    else:\n"
                      "        return -x\n";

const char *abs_spec = "requires: True\n"
                       "ensures: result >= 0\n"
                       "ensures: result == x or result == -x\n";

} // namespace

TEST(Lexer, IndentationStructure)
{
  auto toks = tokenize("def f(x):\n    if x:\n        return 1\n    return 2\n");
  int indents = 0, dedents = 0;
  for (auto &t : toks) {
    indents += t.kind == Tok::Indent;
    dedents += t.kind == Tok::Dedent;
  }
  EXPECT_EQ(indents, 2);
  EXPECT_EQ(dedents, 2);
  EXPECT_EQ(toks.back().kind, Tok::End);
}

TEST(Lexer, BracketsJoinLines)
{
  auto toks = tokenize("x = (1 +\n     2)\n");
  int newlines = 0;
  for (auto &t : toks)
    newlines += t.kind == Tok::Newline;
  EXPECT_EQ(newlines, 1);
}

TEST(Lexer, InconsistentDedentIsSyntaxError)
{
  EXPECT_THROW(tokenize("def f(x):\n    if x:\n        return 1\n      return 2\n"), ParseError);
}

TEST(ParseFunction, Identity)
{
  FunctionUnit fn = parse_ok("def f(x: int) -> int: return x");
  EXPECT_EQ(fn.name, "f");
  ASSERT_EQ(fn.params.size(), 1u);
  EXPECT_EQ(fn.params[0].name, "x");
  EXPECT_TRUE(fn.params[0].sort.is_int());
  ASSERT_EQ(fn.body.size(), 1u);
  EXPECT_EQ(fn.body[0].kind, StmtKind::Return);
  EXPECT_EQ(fn.body[0].value.kind, ExprKind::Name);
  EXPECT_EQ(fn.body[0].value.name, "x");
}

TEST(ParseFunction, SortsFromAnnotations)
{
  FunctionUnit fn = parse_ok("def g(a, b: float, c: int):\n    return a + b + c\n");
  EXPECT_TRUE(fn.params[0].sort.is_int());
  EXPECT_TRUE(fn.params[1].sort.is_real());
  EXPECT_TRUE(fn.params[2].sort.is_int());
}

TEST(ParseFunction, LoopIsUnsupported)
{
  auto u = parse_unsupported("def f(x):\n    y = 0\n    while x > 0:\n        x = x - 1\n    return y\n");
  EXPECT_EQ(u.feature, "loop");
  EXPECT_EQ(u.line, 3);
  EXPECT_EQ(parse_unsupported("def f(x):\n    for i in range(x):\n        pass\n    return 0\n").feature,
            "loop");
}

TEST(ParseFunction, CallOutsideWhitelist)
{
  auto u = parse_unsupported("def f(x):\n    return len(x)\n");
  EXPECT_EQ(u.feature, "call:len");
  EXPECT_EQ(u.line, 2);
}

TEST(ParseFunction, NamedUnsupportedConstructs)
{
  struct Case {
    const char *src;
    const char *feature;
  } cases[] = {
    {"def f(x):\n    s = 'abc'\n    return x\n", "string"},
    {"def f(x):\n    \"\"\"doc\"\"\"\n    return x\n", "string"},
    {"def f(x):\n    return [x]\n", "list"},
    {"def f(x):\n    return {x: 1}\n", "dict"},
    {"def f(x):\n    return {x}\n", "set"},
    {"def f(x):\n    return (x, x)\n", "tuple"},
    {"def f(x):\n    return x.real\n", "attribute"},
    {"def f(x):\n    return x[0]\n", "subscript"},
    {"def f(x):\n    return x & 1\n", "bitwise"},
    {"def f(x):\n    return x ** x\n", "power"},
    {"def f(x):\n    return None\n", "none"},
    {"def f(x):\n    return\n", "return-none"},
    {"def f(x):\n    y = lambda: 1\n    return x\n", "lambda"},
    {"import math\ndef f(x):\n    return x\n", "import"},
    {"def f(x):\n    return x\ndef g(x):\n    return x\n", "multiple-functions"},
    {"def f(x):\n    if x > 0:\n        return 1\n", "implicit-return-none"},
    {"def f(x: str):\n    return x\n", "type:str"},
    {"def f(x: float):\n    return x // 2\n", "floor-division:float"},
    {"def f(x):\n    return f(x)\n", "call:f"},
    {"def f(x):\n    return 1 if x in (1, 2) else 0\n", "membership"},
    {"def f(x):\n    return x is 1\n", "identity-comparison"},
    {"def f(x):\n    try:\n        return x\n    except E:\n        return 0\n", "exception-handling"},
    {"def f(x):\n    x += 1j\n    return x\n", "complex"},
    {"def f(x=1):\n    return x\n", "default-argument"},
  };
  for (auto &c : cases)
    EXPECT_EQ(parse_unsupported(c.src).feature, c.feature) << c.src;
}

TEST(ParseFunction, SyntaxErrorsAreDistinct)
{
  for (const char *src : {"def f(x):\n    return x +\n", "def f(x:\n    return x\n",
                          "def f(x):\nreturn x\n", "def f(x):\n    return 'abc\n",
                          "def f(x):\n    if x > 0\n        return 1\n    return 0\n",
                          "x = 1\n", ""}) {
    bool syntax = false;
    try {
      auto r = parse_function(src);
      syntax = std::holds_alternative<UnsupportedFeature>(r)
            && std::get<UnsupportedFeature>(r).feature == "top-level-statement";
    } catch (const ParseError &) {
      syntax = true;
    }
    EXPECT_TRUE(syntax) << src;
  }
}

TEST(ParseFunction, TypeAndBindingErrors)
{
  EXPECT_THROW(parse_function("def f(x):\n    return y\n"), ParseError);
  EXPECT_THROW(parse_function("def f(x):\n    if x > 0:\n        y = 1\n    return y\n"), ParseError);
  EXPECT_THROW(parse_function("def f(x):\n    return (x > 0) + 1\n"), ParseError);
  EXPECT_THROW(parse_function("def f(x):\n    return x if x > 0 else x > 1\n"), ParseError);
  EXPECT_THROW(parse_function("def f(x):\n    return abs(x, x)\n"), ParseError);
  EXPECT_THROW(parse_function("def f(x):\n    return min(x)\n"), ParseError);
}

TEST(ParseFunction, AcceptedSubsetConstructs)
{
  parse_ok("def f(a, b):\n"
           "    c: int = a\n"
           "    c += b; c -= 1\n"
           "    if a < b < c:\n"
           "        pass\n"
           "    elif not a:\n"
           "        c = max(a, b, c)\n"
           "    else:\n"
           "        c = min(a, -b) * 2 ** 3 % 7\n"
           "    # comment\n"
           "    return abs(c) if c != 0 else 0x1F\n");
}

TEST(Ssa, TwoBranchMerge)
{
  auto ssa = ssa_translate(parse_ok(abs_src));
  ASSERT_EQ(ssa.result.op(), smt::Op::Ite);
  EXPECT_EQ(smt::to_smtlib(ssa.result), "(ite (>= x 0) x (- x))");
  EXPECT_TRUE(ssa.obligations.empty());
  auto fv = smt::free_vars(ssa.result);
  ASSERT_EQ(fv.size(), 1u);
  EXPECT_EQ(fv[0].name(), "x");
}

TEST(Ssa, RenamingProducesVersions)
{
  auto ssa = ssa_translate(parse_ok("def f(x):\n    y = x + 1\n    y = y * 2\n    return y\n"));
  ASSERT_EQ(ssa.definitions.size(), 2u);
  EXPECT_EQ(ssa.definitions[0].name, "y#0");
  EXPECT_EQ(ssa.definitions[1].name, "y#1");
  EXPECT_EQ(smt::to_smtlib(ssa.result), "(* (+ x 1) 2)");
  for (long long x = -5; x <= 5; ++x)
    EXPECT_EQ(eval_int(ssa.result, ints({{"x", x}})), (x + 1) * 2);
}

TEST(Ssa, MergeDefinesPhiVersion)
{
  auto ssa = ssa_translate(
    parse_ok("def f(x):\n    y = 0\n    if x > 0:\n        y = 1\n    else:\n        y = 2\n    return y\n"));
  ASSERT_EQ(ssa.definitions.size(), 4u);
  EXPECT_EQ(ssa.definitions[3].name, "y#3");
  EXPECT_EQ(smt::to_smtlib(ssa.result), "(ite (> x 0) 1 2)");
}

TEST(Ssa, EarlyReturnMatchesPython)
{
  const std::string src = "def f(x):\n    if x > 0:\n        return 1\n    return 0\n";
  auto ssa = ssa_translate(parse_ok(src));
  EXPECT_EQ(smt::to_smtlib(ssa.result), "(ite (> x 0) 1 0)");
  std::vector<std::vector<std::string>> inputs;
  for (int x = -3; x <= 3; ++x)
    inputs.push_back({std::to_string(x)});
  auto py = oracle::run_python(src, "f", inputs);
  for (int x = -3; x <= 3; ++x)
    EXPECT_EQ(std::to_string(eval_int(ssa.result, ints({{"x", x}}))), py[x + 3]) << x;
}

TEST(Ssa, DivisionObligationsFollowReachability)
{
  auto ssa = ssa_translate(parse_ok("def f(x, y):\n"
                                    "    if y != 0 and x // y > 1:\n"
                                    "        return 1\n"
                                    "    return 10 % x if x else 0\n"));
  ASSERT_EQ(ssa.obligations.size(), 2u);
  EXPECT_EQ(ssa.obligations[0].label, "division-by-zero@line 2");
  EXPECT_EQ(ssa.obligations[1].label, "division-by-zero@line 4");
  // Both are guarded, so they hold everywhere.
  for (long long x = -3; x <= 3; ++x)
    for (long long y = -3; y <= 3; ++y)
      for (auto &o : ssa.obligations)
        EXPECT_TRUE(smt::holds(o.condition, ints({{"x", x}, {"y", y}})));
}

TEST(Ssa, RealPromotion)
{
  auto ssa = ssa_translate(parse_ok("def f(x: int) -> float:\n    return x / 2\n"));
  EXPECT_TRUE(ssa.result.sort().is_real());
  EXPECT_EQ(smt::evaluate(ssa.result, ints({{"x", 3}})).as_real(), smt::Rational(3, 2));
  auto lit = ssa_translate(parse_ok("def f(x: float):\n    return x * 0.1 + 1e1\n"));
  smt::Model m;
  m.set("x", smt::Value{smt::Rational{10}});
  EXPECT_EQ(smt::evaluate(lit.result, m).as_real(), smt::Rational{11});
}

TEST(Ssa, NumericBoolOpsFollowPython)
{
  const std::string src = "def f(a, b):\n    return (a and b) + (a or b)\n";
  auto ssa = ssa_translate(parse_ok(src));
  std::vector<std::vector<std::string>> inputs;
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b)
      inputs.push_back({std::to_string(a), std::to_string(b)});
  auto py = oracle::run_python(src, "f", inputs);
  size_t i = 0;
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b)
      EXPECT_EQ(std::to_string(eval_int(ssa.result, ints({{"a", a}, {"b", b}}))), py[i++]);
}

TEST(Spec, ParsesClauses)
{
  auto spec = parse_spec("# contract\nrequires: x > 0\n\nensures: result >= x\nensures: result < 100\n");
  ASSERT_EQ(spec.preconditions.size(), 1u);
  ASSERT_EQ(spec.postconditions.size(), 2u);
  EXPECT_EQ(spec.postconditions[1].text, "result < 100");
  EXPECT_EQ(spec.postconditions[1].line, 5);
  EXPECT_THROW(parse_spec("assumes: x\n"), ParseError);
  EXPECT_THROW(parse_spec("ensures: 'x'\n"), ParseError);
}

TEST(Spec, NamesMustBeParameters)
{
  FunctionUnit fn = parse_ok(abs_src);
  auto r = ssa_translate(fn).result;
  EXPECT_THROW(translate_spec(fn, parse_spec("requires: result > 0\n"), r), ParseError);
  EXPECT_THROW(translate_spec(fn, parse_spec("ensures: z > 0\n"), r), ParseError);
  EXPECT_NO_THROW(translate_spec(fn, parse_spec("ensures: result > x - 1\n"), r));
}

TEST(VerifyCode, AbsIsVerified)
{
  auto rep = verify_code(parse_ok(abs_src), parse_spec(abs_spec));
  EXPECT_TRUE(is_verified(rep.verdict));
  ASSERT_EQ(rep.obligations.size(), 2u);
  for (auto &o : rep.obligations)
    EXPECT_EQ(o.status, Status::Verified);
}

TEST(VerifyCode, SwappedAbsIsUnsafe)
{
  const std::string src = "def f(x: int) -> int:\n"
                          "    if x >= 0:\n"
                          "        return -x\n"
                          "    else:\n"
                          "        return x\n";
  auto rep = verify_code(parse_ok(src), parse_spec(abs_spec));
  ASSERT_TRUE(is_unsafe(rep.verdict));
  const auto &u = std::get<Unsafe>(rep.verdict);
  EXPECT_EQ(u.obligation, "ensures: result >= 0");
  long long x = u.model.at("x").as_int().convert_to<long long>();
  long long result = u.model.at("result").as_int().convert_to<long long>();
  // Any positive input violates the clause; replay in Python.
  EXPECT_GT(x, 0);
  EXPECT_EQ(result, -x);
  auto py = oracle::run_python(src, "f", {{std::to_string(x)}});
  EXPECT_EQ(py[0], std::to_string(result));
  EXPECT_FALSE(oracle::python_truth("result >= 0", {{"x", std::to_string(x)}, {"result", py[0]}}));
  EXPECT_NE(u.witness.find("x = " + std::to_string(x)), std::string::npos);
}

TEST(VerifyCode, DivisionByZeroCounterexample)
{
  const std::string src = "def f(x):\n    return 10 // x\n";
  auto rep = verify_code(parse_ok(src), parse_spec(""));
  ASSERT_TRUE(is_unsafe(rep.verdict));
  const auto &u = std::get<Unsafe>(rep.verdict);
  EXPECT_EQ(u.obligation, "division-by-zero@line 2");
  EXPECT_EQ(u.model.at("x").as_int(), 0);
  auto py = oracle::run_python(src, "f", {{"0"}});
  EXPECT_EQ(py[0], oracle::zero_division);
}

TEST(VerifyCode, RequiresDischargesDivision)
{
  auto rep = verify_code(parse_ok("def f(x):\n    return 10 // x\n"),
                         parse_spec("requires: x > 0\nensures: result <= 10\n"));
  EXPECT_TRUE(is_verified(rep.verdict));
}

TEST(VerifyCode, RealArithmetic)
{
  auto rep = verify_code(parse_ok("def avg(a: float, b: float) -> float:\n    return (a + b) / 2\n"),
                         parse_spec("requires: a <= b\nensures: a <= result <= b\n"));
  EXPECT_TRUE(is_verified(rep.verdict));
  auto bad = verify_code(parse_ok("def avg(a: float, b: float) -> float:\n    return (a + b) / 3\n"),
                         parse_spec("requires: a <= b\nensures: a <= result <= b\n"));
  EXPECT_TRUE(is_unsafe(bad.verdict));
}

// ---------------------------------------------------------------------------
// Generated programs

namespace {

class ProgramGen {
public:
  explicit ProgramGen(unsigned seed)
    : rng_{seed}
  {}

  std::string function()
  {
    vars_ = {"a", "b"};
    std::ostringstream out;
    out << "def f(a, b):\n";
    block(out, 1, 2);
    out << "    return " << expr(2) << "\n";
    return out.str();
  }

private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  std::string var() { return vars_[pick(static_cast<int>(vars_.size()))]; }

  std::string expr(int depth)
  {
    if (depth == 0 || pick(4) == 0)
      return pick(3) == 0 ? std::to_string(pick(11) - 5) : var();
    switch (pick(9)) {
    case 0: return "(" + expr(depth - 1) + " + " + expr(depth - 1) + ")";
    case 1: return "(" + expr(depth - 1) + " - " + expr(depth - 1) + ")";
    case 2: return "(" + expr(depth - 1) + " * " + expr(depth - 1) + ")";
    case 3: return "(" + expr(depth - 1) + " // " + expr(depth - 1) + ")";
    case 4: return "(" + expr(depth - 1) + " % " + expr(depth - 1) + ")";
    case 5: return "abs(" + expr(depth - 1) + ")";
    case 6: return (pick(2) ? "min(" : "max(") + expr(depth - 1) + ", " + expr(depth - 1) + ")";
    case 7: return "(" + expr(depth - 1) + " if " + cond(depth - 1) + " else " + expr(depth - 1) + ")";
    default: return "-" + expr(depth - 1);
    }
  }

  std::string cond(int depth)
  {
    static const char *ops[] = {"<", "<=", ">", ">=", "==", "!="};
    switch (pick(4)) {
    case 0: return cond_atom(depth) + " and " + cond_atom(depth);
    case 1: return cond_atom(depth) + " or " + cond_atom(depth);
    case 2: return "not " + cond_atom(depth);
    default: return expr(depth) + " " + ops[pick(6)] + " " + expr(depth);
    }
  }

  std::string cond_atom(int depth)
  {
    static const char *ops[] = {"<", "<=", ">", ">=", "==", "!="};
    return "(" + expr(depth) + " " + ops[pick(6)] + " " + expr(depth) + ")";
  }

  void block(std::ostringstream &out, int indent, int depth)
  {
    std::string pad(4 * indent, ' ');
    int n = 1 + pick(3);
    for (int i = 0; i < n; ++i) {
      if (depth > 0 && pick(3) == 0) {
        out << pad << "if " << cond(1) << ":\n";
        auto saved = vars_;
        if (pick(2)) {
          out << pad << "    return " << expr(2) << "\n";
        } else {
          block(out, indent + 1, depth - 1);
        }
        vars_ = saved;
        out << pad << "else:\n";
        block(out, indent + 1, depth - 1);
        vars_ = saved;
      } else {
        std::string name = pick(2) ? var() : "t" + std::to_string(pick(3));
        out << pad << name << " = " << expr(2) << "\n";
        if (std::find(vars_.begin(), vars_.end(), name) == vars_.end())
          vars_.push_back(name);
      }
    }
  }

  std::mt19937 rng_;
  std::vector<std::string> vars_;
};

} // namespace

TEST(Ssa, GeneratedProgramsAgreeWithPython)
{
  std::vector<std::vector<std::string>> inputs;
  std::vector<smt::Model> models;
  for (int a = -6; a <= 6; ++a)
    for (int b = -6; b <= 6; ++b) {
      inputs.push_back({std::to_string(a), std::to_string(b)});
      models.push_back(ints({{"a", a}, {"b", b}}));
    }
  for (unsigned seed = 1; seed <= 40; ++seed) {
    std::string src = ProgramGen{seed}.function();
    auto ssa = ssa_translate(parse_ok(src));
    auto py = oracle::run_python(src, "f", inputs);
    for (size_t i = 0; i < inputs.size(); ++i) {
      bool safe = true;
      for (auto &o : ssa.obligations)
        safe = safe && smt::holds(o.condition, models[i]);
      if (py[i] == oracle::zero_division) {
        EXPECT_FALSE(safe) << src << " at " << inputs[i][0] << "," << inputs[i][1];
        continue;
      }
      ASSERT_TRUE(safe) << src << " at " << inputs[i][0] << "," << inputs[i][1];
      EXPECT_EQ(smt::evaluate(ssa.result, models[i]).to_string(), py[i])
        << src << " at " << inputs[i][0] << "," << inputs[i][1];
    }
  }
}

TEST(ParseFunction, MutatedProgramsNeverParseWithForbiddenConstructs)
{
  const char *inserts[] = {
    "while a > 0:\n    a = a - 1",
    "for i in range(3):\n    b = b + i",
    "s = 'text'",
    "s = \"text\"",
    "l = [a, b]",
    "a = len([a])",
    "a = [x for x in b]",
    "b = a if 'x' else b",
  };
  std::mt19937 rng{7};
  int checked = 0;
  for (unsigned seed = 100; seed < 400; ++seed) {
    std::string src = ProgramGen{seed}.function();
    std::vector<std::string> lines;
    std::istringstream in{src};
    for (std::string l; std::getline(in, l);)
      lines.push_back(l);
    size_t at = 1 + rng() % (lines.size() - 1);
    std::string indent = lines[at].substr(0, lines[at].find_first_not_of(' '));
    std::string snippet = inserts[rng() % std::size(inserts)];
    std::string block;
    std::istringstream sn{snippet};
    for (std::string l; std::getline(sn, l);)
      block += indent + l + "\n";
    std::string mutated;
    for (size_t i = 0; i < lines.size(); ++i) {
      if (i == at)
        mutated += block;
      mutated += lines[i] + "\n";
    }
    bool accepted = false;
    try {
      accepted = std::holds_alternative<FunctionUnit>(parse_function(mutated));
    } catch (const ParseError &) {
    }
    EXPECT_FALSE(accepted) << mutated;
    checked++;
  }
  EXPECT_EQ(checked, 300);
}
