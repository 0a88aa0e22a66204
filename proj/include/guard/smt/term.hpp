#ifndef GUARD_SMT_TERM_HPP
#define GUARD_SMT_TERM_HPP

#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "guard/smt/sort.hpp"
#include "guard/smt/value.hpp"

namespace guard::smt {

enum class Op {
  Var,
  Lit,
  // Int/Real arithmetic
  Add,
  Sub,
  Mul,
  DivReal,
  DivFloor,
  ModFloor,
  Neg,
  Abs,
  Min,
  Max,
  ToReal,
  Lt,
  Le,
  Gt,
  Ge,
  // Core
  Eq,
  Ne,
  And,
  Or,
  Not,
  Implies,
  Ite,
  // Bitvectors
  BvAdd,
  BvSub,
  BvNeg,
  BvAnd,
  BvOr,
  BvXor,
  BvShl,
  BvLshr,
  BvAshr,
  BvSlt,
  BvSle,
  BvUlt,
  BvUle,
  // Strings
  StrContains,
  StrConcat,
  StrLen,
  StrPrefixOf,
  StrInCharset,
  // Arrays
  Select,
  Store,
};

inline const char *op_name(Op op)
{
  switch (op) {
  case Op::Var: return "var";
  case Op::Lit: return "lit";
  case Op::Add: return "add";
  case Op::Sub: return "sub";
  case Op::Mul: return "mul";
  case Op::DivReal: return "div-real";
  case Op::DivFloor: return "div-floor";
  case Op::ModFloor: return "mod-floor";
  case Op::Neg: return "neg";
  case Op::Abs: return "abs-op";
  case Op::Min: return "min-op";
  case Op::Max: return "max-op";
  case Op::ToReal: return "to-real";
  case Op::Lt: return "lt";
  case Op::Le: return "le";
  case Op::Gt: return "gt";
  case Op::Ge: return "ge";
  case Op::Eq: return "eq";
  case Op::Ne: return "ne";
  case Op::And: return "and";
  case Op::Or: return "or";
  case Op::Not: return "not";
  case Op::Implies: return "implies";
  case Op::Ite: return "ite";
  case Op::BvAdd: return "bv-add";
  case Op::BvSub: return "bv-sub";
  case Op::BvNeg: return "bv-neg";
  case Op::BvAnd: return "bv-and";
  case Op::BvOr: return "bv-or";
  case Op::BvXor: return "bv-xor";
  case Op::BvShl: return "bv-shl";
  case Op::BvLshr: return "bv-lshr";
  case Op::BvAshr: return "bv-ashr";
  case Op::BvSlt: return "bv-slt";
  case Op::BvSle: return "bv-sle";
  case Op::BvUlt: return "bv-ult";
  case Op::BvUle: return "bv-ule";
  case Op::StrContains: return "str-contains";
  case Op::StrConcat: return "str-concat";
  case Op::StrLen: return "str-len";
  case Op::StrPrefixOf: return "str-prefixof";
  case Op::StrInCharset: return "str-in-charset";
  case Op::Select: return "array-select";
  case Op::Store: return "array-store";
  }
  return "?";
}

// Inclusive range of Unicode code points.
struct CharRange {
  char32_t lo;
  char32_t hi;
  bool operator==(const CharRange &) const = default;
};
using CharSet = std::vector<CharRange>;

inline bool charset_contains(const CharSet &set, char32_t c)
{
  for (auto &r : set)
    if (r.lo <= c && c <= r.hi)
      return true;
  return false;
}

class Term;

namespace detail {
struct Node;
}

// Immutable, reference-counted formula node. Copies share structure.
class Term {
public:
  Term() = default;

  Op op() const;
  const Sort &sort() const;
  std::span<const Term> args() const;
  const Term &arg(size_t i) const;
  size_t arity() const;
  const std::string &name() const;
  const Value &value() const;
  const CharSet &charset() const;

  bool is_var() const { return op() == Op::Var; }
  bool is_lit() const { return op() == Op::Lit; }
  bool is_true() const { return is_lit() && sort().is_bool() && value().as_bool(); }
  bool is_false() const { return is_lit() && sort().is_bool() && !value().as_bool(); }

  const void *id() const { return node_.get(); }
  explicit operator bool() const { return node_ != nullptr; }

private:
  friend Term make_node(Op, Sort, std::string, Value, CharSet, std::vector<Term>);
  explicit Term(std::shared_ptr<const detail::Node> n)
    : node_{std::move(n)}
  {}
  std::shared_ptr<const detail::Node> node_;
};

namespace detail {
struct Node {
  Op op;
  Sort sort;
  std::string name;
  Value value;
  CharSet charset;
  std::vector<Term> args;
};
} // namespace detail

inline Term make_node(Op op, Sort sort, std::string name, Value value, CharSet cs,
                      std::vector<Term> args)
{
  return Term{std::make_shared<const detail::Node>(detail::Node{
    op, sort, std::move(name), std::move(value), std::move(cs), std::move(args)})};
}

inline Op Term::op() const { return node_->op; }
inline const Sort &Term::sort() const { return node_->sort; }
inline std::span<const Term> Term::args() const { return node_->args; }
inline const Term &Term::arg(size_t i) const { return node_->args.at(i); }
inline size_t Term::arity() const { return node_->args.size(); }
inline const std::string &Term::name() const { return node_->name; }
inline const Value &Term::value() const { return node_->value; }
inline const CharSet &Term::charset() const { return node_->charset; }

// ---------------------------------------------------------------------------
// Leaves

inline Term var(std::string name, Sort sort)
{
  if (name.empty())
    throw SortError("variable name must be nonempty");
  // '?'-prefixed names are reserved for let-bindings in emitted scripts.
  if (name[0] == '?')
    throw SortError("variable name '" + name + "' is reserved");
  return make_node(Op::Var, sort, std::move(name), Value{}, {}, {});
}

inline Term bool_lit(bool b) { return make_node(Op::Lit, Sort::boolean(), {}, Value{b}, {}, {}); }
inline Term int_lit(Integer i)
{
  return make_node(Op::Lit, Sort::integer(), {}, Value{std::move(i)}, {}, {});
}
inline Term int_lit(long long i) { return int_lit(Integer{i}); }
inline Term real_lit(Rational r)
{
  return make_node(Op::Lit, Sort::real(), {}, Value{std::move(r)}, {}, {});
}
inline Term bv_lit(uint64_t bits, unsigned width)
{
  return make_node(Op::Lit, Sort::bitvec(width), {}, Value{BitVecValue{bits, width}}, {}, {});
}
inline Term str_lit(std::string s)
{
  return make_node(Op::Lit, Sort::string(), {}, Value{std::move(s)}, {}, {});
}

inline Term lit(const Value &v)
{
  if (v.is_bool())
    return bool_lit(v.as_bool());
  if (v.is_int())
    return int_lit(v.as_int());
  if (v.is_real())
    return real_lit(v.as_real());
  if (v.is_bv())
    return bv_lit(v.as_bv().bits, v.as_bv().width);
  if (v.is_string())
    return str_lit(v.as_string());
  throw SortError("value of sort " + v.sort_name() + " has no literal form");
}

// ---------------------------------------------------------------------------
// Sort-checked construction

namespace detail {

[[noreturn]] inline void ill_sorted(Op op, std::span<const Term> args, const std::string &why)
{
  std::string msg = std::string("ill-sorted ") + op_name(op) + "(";
  for (size_t i = 0; i < args.size(); i++)
    msg += (i ? ", " : "") + (args[i] ? args[i].sort().name() : std::string("null"));
  throw SortError(msg + "): " + why);
}

inline void expect_arity(Op op, std::span<const Term> args, size_t n)
{
  if (args.size() != n)
    ill_sorted(op, args, "expected " + std::to_string(n) + " arguments");
  for (auto &a : args)
    if (!a)
      ill_sorted(op, args, "null argument");
}

inline void expect_same(Op op, std::span<const Term> args)
{
  for (auto &a : args)
    if (a.sort() != args[0].sort())
      ill_sorted(op, args, "argument sorts differ");
}

inline Sort result_sort(Op op, std::span<const Term> args)
{
  switch (op) {
  case Op::Add:
  case Op::Sub:
  case Op::Mul:
  case Op::Min:
  case Op::Max:
    expect_arity(op, args, 2);
    expect_same(op, args);
    if (!args[0].sort().is_arith())
      ill_sorted(op, args, "expected Int or Real");
    return args[0].sort();
  case Op::DivReal:
    expect_arity(op, args, 2);
    if (!args[0].sort().is_real() || !args[1].sort().is_real())
      ill_sorted(op, args, "expected Real operands");
    return Sort::real();
  case Op::DivFloor:
  case Op::ModFloor:
    expect_arity(op, args, 2);
    if (!args[0].sort().is_int() || !args[1].sort().is_int())
      ill_sorted(op, args, "expected Int operands");
    return Sort::integer();
  case Op::Neg:
  case Op::Abs:
    expect_arity(op, args, 1);
    if (!args[0].sort().is_arith())
      ill_sorted(op, args, "expected Int or Real");
    return args[0].sort();
  case Op::ToReal:
    expect_arity(op, args, 1);
    if (!args[0].sort().is_int())
      ill_sorted(op, args, "expected Int");
    return Sort::real();
  case Op::Lt:
  case Op::Le:
  case Op::Gt:
  case Op::Ge:
    expect_arity(op, args, 2);
    expect_same(op, args);
    if (!args[0].sort().is_arith())
      ill_sorted(op, args, "expected Int or Real");
    return Sort::boolean();
  case Op::Eq:
  case Op::Ne:
    expect_arity(op, args, 2);
    expect_same(op, args);
    return Sort::boolean();
  case Op::And:
  case Op::Or:
    for (auto &a : args)
      if (!a || !a.sort().is_bool())
        ill_sorted(op, args, "expected Bool operands");
    return Sort::boolean();
  case Op::Not:
    expect_arity(op, args, 1);
    if (!args[0].sort().is_bool())
      ill_sorted(op, args, "expected Bool");
    return Sort::boolean();
  case Op::Implies:
    expect_arity(op, args, 2);
    if (!args[0].sort().is_bool() || !args[1].sort().is_bool())
      ill_sorted(op, args, "expected Bool operands");
    return Sort::boolean();
  case Op::Ite:
    expect_arity(op, args, 3);
    if (!args[0].sort().is_bool())
      ill_sorted(op, args, "condition must be Bool");
    if (args[1].sort() != args[2].sort())
      ill_sorted(op, args, "branch sorts differ");
    return args[1].sort();
  case Op::BvAdd:
  case Op::BvSub:
  case Op::BvAnd:
  case Op::BvOr:
  case Op::BvXor:
  case Op::BvShl:
  case Op::BvLshr:
  case Op::BvAshr:
    expect_arity(op, args, 2);
    expect_same(op, args);
    if (!args[0].sort().is_bv())
      ill_sorted(op, args, "expected bitvectors");
    return args[0].sort();
  case Op::BvNeg:
    expect_arity(op, args, 1);
    if (!args[0].sort().is_bv())
      ill_sorted(op, args, "expected bitvector");
    return args[0].sort();
  case Op::BvSlt:
  case Op::BvSle:
  case Op::BvUlt:
  case Op::BvUle:
    expect_arity(op, args, 2);
    expect_same(op, args);
    if (!args[0].sort().is_bv())
      ill_sorted(op, args, "expected bitvectors");
    return Sort::boolean();
  case Op::StrContains:
  case Op::StrPrefixOf:
    expect_arity(op, args, 2);
    if (!args[0].sort().is_string() || !args[1].sort().is_string())
      ill_sorted(op, args, "expected String operands");
    return Sort::boolean();
  case Op::StrConcat:
    if (args.empty())
      ill_sorted(op, args, "expected at least one operand");
    for (auto &a : args)
      if (!a || !a.sort().is_string())
        ill_sorted(op, args, "expected String operands");
    return Sort::string();
  case Op::StrLen:
    expect_arity(op, args, 1);
    if (!args[0].sort().is_string())
      ill_sorted(op, args, "expected String");
    return Sort::integer();
  case Op::StrInCharset:
    expect_arity(op, args, 1);
    if (!args[0].sort().is_string())
      ill_sorted(op, args, "expected String");
    return Sort::boolean();
  case Op::Select:
    expect_arity(op, args, 2);
    if (!args[0].sort().is_array() || args[1].sort() != Sort::bitvec(args[0].sort().index_width()))
      ill_sorted(op, args, "expected (array, index)");
    return Sort::bitvec(args[0].sort().elem_width());
  case Op::Store:
    expect_arity(op, args, 3);
    if (!args[0].sort().is_array() || args[1].sort() != Sort::bitvec(args[0].sort().index_width())
        || args[2].sort() != Sort::bitvec(args[0].sort().elem_width()))
      ill_sorted(op, args, "expected (array, index, element)");
    return args[0].sort();
  case Op::Var:
  case Op::Lit:
    break;
  }
  throw SortError(std::string("operator ") + op_name(op) + " is not an application");
}

} // namespace detail

// Builds an application node. Throws SortError on ill-sorted input; never coerces.
inline Term app(Op op, std::vector<Term> args)
{
  Sort s = detail::result_sort(op, args);
  return make_node(op, s, {}, Value{}, {}, std::move(args));
}

inline Term add(Term a, Term b) { return app(Op::Add, {std::move(a), std::move(b)}); }
inline Term sub(Term a, Term b) { return app(Op::Sub, {std::move(a), std::move(b)}); }
inline Term mul(Term a, Term b) { return app(Op::Mul, {std::move(a), std::move(b)}); }
inline Term div_real(Term a, Term b) { return app(Op::DivReal, {std::move(a), std::move(b)}); }
inline Term div_floor(Term a, Term b) { return app(Op::DivFloor, {std::move(a), std::move(b)}); }
inline Term mod_floor(Term a, Term b) { return app(Op::ModFloor, {std::move(a), std::move(b)}); }
inline Term neg(Term a) { return app(Op::Neg, {std::move(a)}); }
inline Term abs(Term a) { return app(Op::Abs, {std::move(a)}); }
inline Term min(Term a, Term b) { return app(Op::Min, {std::move(a), std::move(b)}); }
inline Term max(Term a, Term b) { return app(Op::Max, {std::move(a), std::move(b)}); }
inline Term to_real(Term a) { return app(Op::ToReal, {std::move(a)}); }
inline Term lt(Term a, Term b) { return app(Op::Lt, {std::move(a), std::move(b)}); }
inline Term le(Term a, Term b) { return app(Op::Le, {std::move(a), std::move(b)}); }
inline Term gt(Term a, Term b) { return app(Op::Gt, {std::move(a), std::move(b)}); }
inline Term ge(Term a, Term b) { return app(Op::Ge, {std::move(a), std::move(b)}); }
inline Term eq(Term a, Term b) { return app(Op::Eq, {std::move(a), std::move(b)}); }
inline Term ne(Term a, Term b) { return app(Op::Ne, {std::move(a), std::move(b)}); }

// The Boolean connectives fold literal operands; everything else is built verbatim.
inline Term not_(Term a)
{
  if (a && a.is_lit() && a.sort().is_bool())
    return bool_lit(!a.value().as_bool());
  return app(Op::Not, {std::move(a)});
}

inline Term and_(std::vector<Term> args)
{
  std::vector<Term> kept;
  for (auto &a : args) {
    if (a && a.is_true())
      continue;
    if (a && a.is_false())
      return bool_lit(false);
    kept.push_back(a);
  }
  if (kept.empty())
    return bool_lit(true);
  if (kept.size() == 1) {
    detail::result_sort(Op::And, kept);
    return kept[0];
  }
  return app(Op::And, std::move(kept));
}
inline Term and_(Term a, Term b) { return and_(std::vector<Term>{std::move(a), std::move(b)}); }

inline Term or_(std::vector<Term> args)
{
  std::vector<Term> kept;
  for (auto &a : args) {
    if (a && a.is_false())
      continue;
    if (a && a.is_true())
      return bool_lit(true);
    kept.push_back(a);
  }
  if (kept.empty())
    return bool_lit(false);
  if (kept.size() == 1) {
    detail::result_sort(Op::Or, kept);
    return kept[0];
  }
  return app(Op::Or, std::move(kept));
}
inline Term or_(Term a, Term b) { return or_(std::vector<Term>{std::move(a), std::move(b)}); }

inline Term implies(Term a, Term b)
{
  if (a && a.is_true())
    return b;
  return app(Op::Implies, {std::move(a), std::move(b)});
}

inline Term ite(Term c, Term a, Term b)
{
  if (c && c.is_lit() && c.sort().is_bool() && a && b && a.sort() == b.sort())
    return c.value().as_bool() ? a : b;
  return app(Op::Ite, {std::move(c), std::move(a), std::move(b)});
}

inline Term bv_add(Term a, Term b) { return app(Op::BvAdd, {std::move(a), std::move(b)}); }
inline Term bv_sub(Term a, Term b) { return app(Op::BvSub, {std::move(a), std::move(b)}); }
inline Term bv_neg(Term a) { return app(Op::BvNeg, {std::move(a)}); }
inline Term bv_and(Term a, Term b) { return app(Op::BvAnd, {std::move(a), std::move(b)}); }
inline Term bv_or(Term a, Term b) { return app(Op::BvOr, {std::move(a), std::move(b)}); }
inline Term bv_xor(Term a, Term b) { return app(Op::BvXor, {std::move(a), std::move(b)}); }
inline Term bv_shl(Term a, Term b) { return app(Op::BvShl, {std::move(a), std::move(b)}); }
inline Term bv_lshr(Term a, Term b) { return app(Op::BvLshr, {std::move(a), std::move(b)}); }
inline Term bv_ashr(Term a, Term b) { return app(Op::BvAshr, {std::move(a), std::move(b)}); }
inline Term bv_slt(Term a, Term b) { return app(Op::BvSlt, {std::move(a), std::move(b)}); }
inline Term bv_sle(Term a, Term b) { return app(Op::BvSle, {std::move(a), std::move(b)}); }
inline Term bv_ult(Term a, Term b) { return app(Op::BvUlt, {std::move(a), std::move(b)}); }
inline Term bv_ule(Term a, Term b) { return app(Op::BvUle, {std::move(a), std::move(b)}); }

// lo <=s x <=s hi
inline Term bv_sign_bound(Term x, Term lo, Term hi)
{
  return and_(bv_sle(std::move(lo), x), bv_sle(x, std::move(hi)));
}

inline Term str_contains(Term haystack, Term needle)
{
  return app(Op::StrContains, {std::move(haystack), std::move(needle)});
}
inline Term str_prefixof(Term prefix, Term s)
{
  return app(Op::StrPrefixOf, {std::move(prefix), std::move(s)});
}
inline Term str_concat(std::vector<Term> parts)
{
  if (parts.size() == 1) {
    detail::result_sort(Op::StrConcat, parts);
    return parts[0];
  }
  return app(Op::StrConcat, std::move(parts));
}
inline Term str_len(Term s) { return app(Op::StrLen, {std::move(s)}); }

// s is a (possibly empty) word over the given character set.
inline Term str_in_charset(Term s, CharSet cs)
{
  std::vector<Term> args{std::move(s)};
  Sort sort = detail::result_sort(Op::StrInCharset, args);
  if (cs.empty())
    throw SortError("character set must be nonempty");
  for (auto &r : cs)
    if (r.lo > r.hi)
      throw SortError("character range is inverted");
  return make_node(Op::StrInCharset, sort, {}, Value{}, std::move(cs), std::move(args));
}

inline Term select(Term arr, Term idx) { return app(Op::Select, {std::move(arr), std::move(idx)}); }
inline Term store(Term arr, Term idx, Term val)
{
  return app(Op::Store, {std::move(arr), std::move(idx), std::move(val)});
}

// ---------------------------------------------------------------------------

// Free variables in first-occurrence order. A name used at two sorts is an error.
inline std::vector<Term> free_vars(std::span<const Term> terms)
{
  std::vector<Term> out;
  std::map<std::string, Sort> seen;
  std::unordered_set<const void *> visited;
  std::vector<Term> stack;
  for (auto it = terms.rbegin(); it != terms.rend(); ++it)
    stack.push_back(*it);
  while (!stack.empty()) {
    Term t = stack.back();
    stack.pop_back();
    if (!visited.insert(t.id()).second)
      continue;
    if (t.is_var()) {
      auto [pos, fresh] = seen.emplace(t.name(), t.sort());
      if (fresh)
        out.push_back(t);
      else if (pos->second != t.sort())
        throw SortError("variable '" + t.name() + "' used at sorts " + pos->second.name()
                        + " and " + t.sort().name());
      continue;
    }
    auto args = t.args();
    for (auto it = args.rbegin(); it != args.rend(); ++it)
      stack.push_back(*it);
  }
  return out;
}

inline std::vector<Term> free_vars(const Term &t) { return free_vars(std::span<const Term>(&t, 1)); }

} // namespace guard::smt

#endif // GUARD_SMT_TERM_HPP
