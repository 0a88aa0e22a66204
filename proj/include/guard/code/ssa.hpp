#ifndef GUARD_CODE_SSA_HPP
#define GUARD_CODE_SSA_HPP

#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "guard/code/parser.hpp"
#include "guard/smt/term.hpp"

namespace guard::code {

struct SideObligation {
  std::string label;
  smt::Term condition;
  int line = 0;
};

// One SSA version: `name` is "y#k", `value` its defining term over the parameters.
struct SsaDefinition {
  std::string name;
  smt::Term value;
};

struct SsaResult {
  smt::Term result;
  std::vector<smt::Term> params; // parameter variables, in signature order
  std::vector<SideObligation> obligations;
  std::vector<SsaDefinition> definitions;
};

// Name-to-term environment used when translating standalone expressions.
using Bindings = std::map<std::string, smt::Term>;

namespace detail {

[[noreturn]] inline void type_error(const std::string &msg, int line)
{
  throw ParseError("type error: " + msg, line);
}

inline bool numeric(const smt::Term &t) { return t.sort().is_int() || t.sort().is_real(); }

inline smt::Term promote(const smt::Term &t) { return t.sort().is_int() ? smt::to_real(t) : t; }

// Brings two values to a common sort, following int -> float promotion.
inline void unify(smt::Term &a, smt::Term &b, const std::string &what, int line)
{
  if (a.sort() == b.sort())
    return;
  if (numeric(a) && numeric(b)) {
    a = promote(a);
    b = promote(b);
    return;
  }
  type_error(what + " mixes " + a.sort().name() + " and " + b.sort().name(), line);
}

inline smt::Term zero_of(const smt::Sort &s)
{
  return s.is_real() ? smt::real_lit(smt::Rational{0}) : smt::int_lit(0);
}

inline smt::Term one_of(const smt::Sort &s)
{
  return s.is_real() ? smt::real_lit(smt::Rational{1}) : smt::int_lit(1);
}

inline smt::Term truthy(const smt::Term &t)
{
  if (t.sort().is_bool())
    return t;
  return smt::ne(t, zero_of(t.sort()));
}

class Translator {
public:
  struct State {
    std::map<std::string, smt::Term> env;
    std::set<std::string> maybe_unbound;
    smt::Term pc = smt::bool_lit(true);
    bool live = true;
  };

  struct Return {
    smt::Term condition;
    smt::Term value;
    int line;
  };

  std::vector<SideObligation> obligations;
  std::vector<SsaDefinition> definitions;
  std::vector<Return> returns;

  // Translates `e` reached under `pc ∧ guard`.
  smt::Term expr(const Expr &e, const State &st, const smt::Term &guard)
  {
    using namespace smt;
    switch (e.kind) {
    case ExprKind::Name: {
      if (auto it = st.env.find(e.name); it != st.env.end())
        return it->second;
      if (st.maybe_unbound.count(e.name))
        throw ParseError("variable '" + e.name + "' may be used before assignment", e.line);
      throw ParseError("name '" + e.name + "' is not defined", e.line);
    }
    case ExprKind::IntLit: return int_lit(e.int_value);
    case ExprKind::RealLit: return real_lit(e.real_value);
    case ExprKind::BoolLit: return bool_lit(e.bool_value);
    case ExprKind::Unary: {
      Term a = expr(e.children[0], st, guard);
      if (e.unary_op == UnaryOp::Not)
        return not_(truthy(a));
      if (!numeric(a))
        type_error("unary minus/plus on " + a.sort().name(), e.line);
      return e.unary_op == UnaryOp::Neg ? neg(a) : a;
    }
    case ExprKind::Binary: return binary(e, st, guard);
    case ExprKind::BoolOp: return bool_op(e, st, guard);
    case ExprKind::Compare: {
      std::vector<Term> operands{expr(e.children[0], st, guard)};
      std::vector<Term> parts;
      for (size_t i = 0; i < e.cmp_ops.size(); ++i) {
        // Later operands are only evaluated while the chain is still true.
        Term reach = and_(guard, and_(parts));
        operands.push_back(expr(e.children[i + 1], st, reach));
        parts.push_back(compare(e.cmp_ops[i], operands[i], operands[i + 1], e.line));
      }
      return and_(parts);
    }
    case ExprKind::Ternary: {
      Term c = truthy(expr(e.children[0], st, guard));
      Term a = expr(e.children[1], st, and_(guard, c));
      Term b = expr(e.children[2], st, and_(guard, not_(c)));
      unify(a, b, "conditional expression", e.line);
      return ite(c, a, b);
    }
    case ExprKind::Call: {
      std::vector<Term> args;
      for (auto &c : e.children) {
        args.push_back(expr(c, st, guard));
        if (!numeric(args.back()))
          type_error(e.name + "() argument is " + args.back().sort().name(), e.line);
      }
      if (e.name == "abs")
        return abs(args[0]);
      Term acc = args[0];
      for (size_t i = 1; i < args.size(); ++i) {
        Term b = args[i];
        unify(acc, b, e.name + "()", e.line);
        acc = e.name == "min" ? min(acc, b) : max(acc, b);
      }
      return acc;
    }
    }
    throw ParseError("unhandled expression", e.line);
  }

  void block(const std::vector<Stmt> &stmts, State &st)
  {
    for (auto &s : stmts) {
      if (!st.live)
        return; // unreachable tail after a return
      statement(s, st);
    }
  }

  std::map<std::string, int> versions;

private:
  smt::Term compare(CmpOp op, smt::Term a, smt::Term b, int line)
  {
    using namespace smt;
    if (op == CmpOp::Eq || op == CmpOp::Ne) {
      unify(a, b, "comparison", line);
      return op == CmpOp::Eq ? eq(a, b) : ne(a, b);
    }
    if (!numeric(a) || !numeric(b))
      type_error(std::string("ordering comparison '") + cmp_symbol(op) + "' on Bool", line);
    unify(a, b, "comparison", line);
    switch (op) {
    case CmpOp::Lt: return lt(a, b);
    case CmpOp::Le: return le(a, b);
    case CmpOp::Gt: return gt(a, b);
    case CmpOp::Ge: return ge(a, b);
    default: break;
    }
    throw ParseError("unhandled comparison", line);
  }

  void division_obligation(const smt::Term &divisor, const smt::Term &reach, int line)
  {
    using namespace smt;
    if (divisor.is_lit() && !(divisor.value().as_rational() == 0))
      return;
    std::string label = "division-by-zero@line " + std::to_string(line);
    int same = 0;
    for (auto &o : obligations)
      if (o.line == line)
        same++;
    if (same)
      label += " #" + std::to_string(same + 1);
    obligations.push_back({label, implies(reach, ne(divisor, zero_of(divisor.sort()))), line});
  }

  smt::Term binary(const Expr &e, const State &st, const smt::Term &guard)
  {
    using namespace smt;
    Term a = expr(e.children[0], st, guard);
    if (!numeric(a))
      type_error(std::string("arithmetic '") + binary_symbol(e.binary_op) + "' on Bool", e.line);
    if (e.binary_op == BinaryOp::Pow) {
      unsigned n = e.children[1].int_value.convert_to<unsigned>();
      Term acc = one_of(a.sort());
      for (unsigned i = 0; i < n; ++i)
        acc = i == 0 ? a : mul(acc, a);
      return acc;
    }
    Term b = expr(e.children[1], st, guard);
    if (!numeric(b))
      type_error(std::string("arithmetic '") + binary_symbol(e.binary_op) + "' on Bool", e.line);
    Term reach = and_(st.pc, guard);
    switch (e.binary_op) {
    case BinaryOp::Add: unify(a, b, "+", e.line); return add(a, b);
    case BinaryOp::Sub: unify(a, b, "-", e.line); return sub(a, b);
    case BinaryOp::Mul: unify(a, b, "*", e.line); return mul(a, b);
    case BinaryOp::Div:
      a = promote(a);
      b = promote(b);
      division_obligation(b, reach, e.line);
      return div_real(a, b);
    case BinaryOp::FloorDiv:
    case BinaryOp::Mod:
      if (a.sort().is_real() || b.sort().is_real())
        throw UnsupportedConstruct(UnsupportedFeature{
          e.binary_op == BinaryOp::FloorDiv ? "floor-division:float" : "modulo:float", e.line});
      division_obligation(b, reach, e.line);
      return e.binary_op == BinaryOp::FloorDiv ? div_floor(a, b) : mod_floor(a, b);
    default: break;
    }
    throw ParseError("unhandled operator", e.line);
  }

  // `a and b` yields a when a is falsy, else b (and dually for `or`). With
  // Bool operands this is plain conjunction/disjunction.
  smt::Term bool_op(const Expr &e, const State &st, const smt::Term &guard)
  {
    using namespace smt;
    bool is_and = e.bool_op == BoolOpKind::And;
    std::vector<Term> vals;
    std::vector<Term> truths;
    for (auto &c : e.children) {
      std::vector<Term> prior;
      for (auto &t : truths)
        prior.push_back(is_and ? t : not_(t));
      vals.push_back(expr(c, st, and_(guard, and_(prior))));
      truths.push_back(truthy(vals.back()));
    }
    bool all_bool = true;
    for (auto &v : vals)
      all_bool = all_bool && v.sort().is_bool();
    if (all_bool)
      return is_and ? and_(vals) : or_(vals);
    Term acc = vals.back();
    for (size_t i = vals.size() - 1; i-- > 0;) {
      Term v = vals[i];
      unify(v, acc, is_and ? "'and'" : "'or'", e.line);
      acc = is_and ? ite(truthy(v), acc, v) : ite(truthy(v), v, acc);
    }
    return acc;
  }

  void assign(const std::string &name, const smt::Term &value, State &st)
  {
    int k = versions[name]++;
    definitions.push_back({name + "#" + std::to_string(k), value});
    st.env[name] = value;
    st.maybe_unbound.erase(name);
  }

  void statement(const Stmt &s, State &st)
  {
    using namespace smt;
    switch (s.kind) {
    case StmtKind::Pass: return;
    case StmtKind::Assign: {
      Term v = expr(s.value, st, bool_lit(true));
      for (auto &t : s.targets)
        assign(t, v, st);
      return;
    }
    case StmtKind::Return: {
      Term v = expr(s.value, st, bool_lit(true));
      returns.push_back({st.pc, v, s.line});
      st.live = false;
      return;
    }
    case StmtKind::If: {
      Term c = truthy(expr(s.value, st, bool_lit(true)));
      State then_st = st;
      then_st.pc = and_(st.pc, c);
      block(s.body, then_st);
      State else_st = st;
      else_st.pc = and_(st.pc, not_(c));
      block(s.orelse, else_st);
      merge(c, std::move(then_st), std::move(else_st), st, s.line);
      return;
    }
    }
  }

  void merge(const smt::Term &c, State then_st, State else_st, State &out, int line)
  {
    if (!then_st.live && !else_st.live) {
      out.live = false;
      return;
    }
    if (!then_st.live || !else_st.live) {
      out = then_st.live ? std::move(then_st) : std::move(else_st);
      return;
    }
    State merged;
    merged.pc = out.pc;
    merged.maybe_unbound = then_st.maybe_unbound;
    merged.maybe_unbound.insert(else_st.maybe_unbound.begin(), else_st.maybe_unbound.end());
    std::set<std::string> names;
    for (auto &[k, _] : then_st.env)
      names.insert(k);
    for (auto &[k, _] : else_st.env)
      names.insert(k);
    for (auto &n : names) {
      auto a = then_st.env.find(n);
      auto b = else_st.env.find(n);
      if (a == then_st.env.end() || b == else_st.env.end()) {
        merged.maybe_unbound.insert(n);
        continue;
      }
      if (a->second.id() == b->second.id()) {
        merged.env[n] = a->second;
        continue;
      }
      smt::Term x = a->second, y = b->second;
      unify(x, y, "merge of '" + n + "'", line);
      merged.env[n] = smt::ite(c, x, y);
      int k = versions[n]++;
      definitions.push_back({n + "#" + std::to_string(k), merged.env[n]});
    }
    out = std::move(merged);
  }
};

inline void check_params(const FunctionUnit &fn)
{
  for (auto &p : fn.params)
    if (!p.sort.is_int() && !p.sort.is_real())
      throw UnsupportedConstruct(UnsupportedFeature{"type:" + p.sort.name(), fn.line});
}

inline int last_line(const std::vector<Stmt> &body)
{
  if (body.empty())
    return 0;
  const Stmt &s = body.back();
  if (s.kind == StmtKind::If)
    return std::max({s.line, last_line(s.body), last_line(s.orelse)});
  return s.line;
}

} // namespace detail

// Translates a validated function into a single result term over its
// parameters plus reachability-conditioned division obligations.
inline SsaResult ssa_translate(const FunctionUnit &fn)
{
  detail::check_params(fn);
  detail::Translator tr;
  detail::Translator::State st;
  SsaResult out;
  for (auto &p : fn.params) {
    auto v = smt::var(p.name, p.sort);
    out.params.push_back(v);
    st.env[p.name] = v;
  }
  tr.block(fn.body, st);
  if (st.live)
    throw UnsupportedConstruct(
      UnsupportedFeature{"implicit-return-none", std::max(fn.line, detail::last_line(fn.body))});

  std::vector<smt::Term> values;
  for (auto &r : tr.returns)
    values.push_back(r.value);
  bool any_real = fn.return_sort && fn.return_sort->is_real();
  bool any_bool = false, any_num = false;
  for (auto &v : values) {
    any_real = any_real || v.sort().is_real();
    any_bool = any_bool || v.sort().is_bool();
    any_num = any_num || detail::numeric(v);
  }
  if (any_bool && any_num)
    detail::type_error("function returns both Bool and numeric values", tr.returns.front().line);
  if (any_real)
    for (auto &v : values)
      v = detail::promote(v);

  // Early returns become a conditional chain; the last return is the default.
  smt::Term result = values.back();
  for (size_t i = values.size() - 1; i-- > 0;)
    result = smt::ite(tr.returns[i].condition, values[i], result);

  out.result = result;
  out.obligations = std::move(tr.obligations);
  out.definitions = std::move(tr.definitions);
  return out;
}

// Translates an expression against fixed bindings (contract clauses).
// Division inside the expression is modeled with the solver's total semantics.
inline smt::Term translate_expression(const Expr &e, const Bindings &names)
{
  detail::Translator tr;
  detail::Translator::State st;
  st.env = names;
  return tr.expr(e, st, smt::bool_lit(true));
}

using ParseOutcome = std::variant<FunctionUnit, UnsupportedFeature>;

// Parses and validates one function. Syntax and type errors throw ParseError;
// constructs outside the subset come back as UnsupportedFeature.
inline ParseOutcome parse_function(std::string_view source)
{
  try {
    FunctionUnit fn = Parser{tokenize(source)}.parse_unit();
    ssa_translate(fn); // validation: types, definite assignment, all paths return
    return fn;
  } catch (const UnsupportedConstruct &u) {
    return u.feature();
  }
}

} // namespace guard::code

#endif // GUARD_CODE_SSA_HPP
