#ifndef GUARD_SMT_EVAL_HPP
#define GUARD_SMT_EVAL_HPP

#include <unordered_map>

#include "guard/smt/term.hpp"

namespace guard::smt {

class EvalError : public Error {
public:
  using Error::Error;
};

// Division whose result the SMT semantics leaves unconstrained.
class DivisionByZero : public EvalError {
public:
  DivisionByZero()
    : EvalError("division by zero")
  {}
};

inline Integer floor_div(const Integer &a, const Integer &b)
{
  if (b == 0)
    throw DivisionByZero{};
  Integer q = a / b;
  if (a % b != 0 && ((a < 0) != (b < 0)))
    q -= 1;
  return q;
}

inline Integer floor_mod(const Integer &a, const Integer &b) { return a - b * floor_div(a, b); }

// Decodes UTF-8, treating stray bytes as Latin-1 code points.
inline std::u32string decode_utf8(const std::string &s)
{
  std::u32string out;
  for (size_t i = 0; i < s.size();) {
    unsigned char c = s[i];
    int extra = c >= 0xf0 ? 3 : c >= 0xe0 ? 2 : c >= 0xc0 ? 1 : 0;
    if (extra == 0 || i + extra >= s.size()) {
      out.push_back(c);
      i++;
      continue;
    }
    char32_t cp = c & (0x3f >> extra);
    bool ok = true;
    for (int k = 1; k <= extra; k++) {
      unsigned char d = s[i + k];
      if ((d & 0xc0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (d & 0x3f);
    }
    if (!ok) {
      out.push_back(c);
      i++;
      continue;
    }
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

inline std::string encode_utf8(char32_t cp)
{
  std::string out;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xc0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xe0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  } else {
    out += static_cast<char>(0xf0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3f));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  }
  return out;
}

// Concrete evaluator for terms under a model. Shared subterms are evaluated once.
class Evaluator {
public:
  explicit Evaluator(const Model &model)
    : model_{model}
  {}

  Value operator()(const Term &t)
  {
    auto it = memo_.find(t.id());
    if (it != memo_.end())
      return it->second;
    Value v = compute(t);
    if (t.arity() > 0)
      memo_.emplace(t.id(), v);
    return v;
  }

private:
  Value compute(const Term &t);

  static Value arith(Op op, const Value &a, const Value &b)
  {
    if (a.is_int()) {
      const Integer &x = a.as_int(), &y = b.as_int();
      switch (op) {
      case Op::Add: return Value{Integer{x + y}};
      case Op::Sub: return Value{Integer{x - y}};
      case Op::Mul: return Value{Integer{x * y}};
      case Op::Min: return Value{x < y ? x : y};
      case Op::Max: return Value{x < y ? y : x};
      default: break;
      }
    } else {
      const Rational &x = a.as_real(), &y = b.as_real();
      switch (op) {
      case Op::Add: return Value{Rational{x + y}};
      case Op::Sub: return Value{Rational{x - y}};
      case Op::Mul: return Value{Rational{x * y}};
      case Op::Min: return Value{x < y ? x : y};
      case Op::Max: return Value{x < y ? y : x};
      default: break;
      }
    }
    throw EvalError("bad arithmetic operator");
  }

  static bool compare(Op op, const Value &a, const Value &b)
  {
    Rational x = a.as_rational(), y = b.as_rational();
    switch (op) {
    case Op::Lt: return x < y;
    case Op::Le: return x <= y;
    case Op::Gt: return x > y;
    case Op::Ge: return x >= y;
    default: break;
    }
    throw EvalError("bad comparison operator");
  }

  static uint64_t shift_left(uint64_t a, uint64_t s, unsigned w)
  {
    return s >= w ? 0 : (a << s) & width_mask(w);
  }
  static uint64_t shift_right(uint64_t a, uint64_t s, unsigned w)
  {
    return s >= w ? 0 : a >> s;
  }
  static uint64_t shift_right_arith(uint64_t a, uint64_t s, unsigned w)
  {
    bool negative = (a >> (w - 1)) & 1;
    if (s >= w)
      return negative ? width_mask(w) : 0;
    uint64_t r = a >> s;
    if (negative)
      r |= width_mask(w) & ~(width_mask(w) >> s);
    return r;
  }

  const Model &model_;
  std::unordered_map<const void *, Value> memo_;
};

inline Value Evaluator::compute(const Term &t)
{
  auto &self = *this;
  switch (t.op()) {
  case Op::Var: {
    const Value *v = model_.find(t.name());
    if (!v)
      throw EvalError("no value for variable '" + t.name() + "'");
    return *v;
  }
  case Op::Lit: return t.value();
  case Op::Add:
  case Op::Sub:
  case Op::Mul:
  case Op::Min:
  case Op::Max: return arith(t.op(), self(t.arg(0)), self(t.arg(1)));
  case Op::DivReal: {
    Rational d = self(t.arg(1)).as_real();
    if (d == 0)
      throw DivisionByZero{};
    return Value{Rational{self(t.arg(0)).as_real() / d}};
  }
  case Op::DivFloor: return Value{floor_div(self(t.arg(0)).as_int(), self(t.arg(1)).as_int())};
  case Op::ModFloor: return Value{floor_mod(self(t.arg(0)).as_int(), self(t.arg(1)).as_int())};
  case Op::Neg: {
    Value a = self(t.arg(0));
    if (a.is_int())
      return Value{Integer{-a.as_int()}};
    return Value{Rational{-a.as_real()}};
  }
  case Op::Abs: {
    Value a = self(t.arg(0));
    if (a.is_int())
      return Value{a.as_int() < 0 ? Integer{-a.as_int()} : a.as_int()};
    return Value{a.as_real() < 0 ? Rational{-a.as_real()} : a.as_real()};
  }
  case Op::ToReal: return Value{Rational{self(t.arg(0)).as_int()}};
  case Op::Lt:
  case Op::Le:
  case Op::Gt:
  case Op::Ge: return Value{compare(t.op(), self(t.arg(0)), self(t.arg(1)))};
  case Op::Eq: return Value{self(t.arg(0)) == self(t.arg(1))};
  case Op::Ne: return Value{!(self(t.arg(0)) == self(t.arg(1)))};
  case Op::And:
    for (auto &a : t.args())
      if (!self(a).as_bool())
        return Value{false};
    return Value{true};
  case Op::Or:
    for (auto &a : t.args())
      if (self(a).as_bool())
        return Value{true};
    return Value{false};
  case Op::Not: return Value{!self(t.arg(0)).as_bool()};
  case Op::Implies: return Value{!self(t.arg(0)).as_bool() || self(t.arg(1)).as_bool()};
  case Op::Ite: return self(t.arg(0)).as_bool() ? self(t.arg(1)) : self(t.arg(2));
  case Op::BvAdd:
  case Op::BvSub:
  case Op::BvAnd:
  case Op::BvOr:
  case Op::BvXor:
  case Op::BvShl:
  case Op::BvLshr:
  case Op::BvAshr: {
    unsigned w = t.sort().width();
    uint64_t a = self(t.arg(0)).as_bv().bits, b = self(t.arg(1)).as_bv().bits;
    uint64_t r = 0;
    switch (t.op()) {
    case Op::BvAdd: r = a + b; break;
    case Op::BvSub: r = a - b; break;
    case Op::BvAnd: r = a & b; break;
    case Op::BvOr: r = a | b; break;
    case Op::BvXor: r = a ^ b; break;
    case Op::BvShl: r = shift_left(a, b, w); break;
    case Op::BvLshr: r = shift_right(a, b, w); break;
    default: r = shift_right_arith(a, b, w); break;
    }
    return Value{BitVecValue{r, w}};
  }
  case Op::BvNeg: {
    auto a = self(t.arg(0)).as_bv();
    return Value{BitVecValue{~a.bits + 1, a.width}};
  }
  case Op::BvSlt:
  case Op::BvSle:
  case Op::BvUlt:
  case Op::BvUle: {
    auto a = self(t.arg(0)).as_bv(), b = self(t.arg(1)).as_bv();
    switch (t.op()) {
    case Op::BvSlt: return Value{a.as_signed() < b.as_signed()};
    case Op::BvSle: return Value{a.as_signed() <= b.as_signed()};
    case Op::BvUlt: return Value{a.bits < b.bits};
    default: return Value{a.bits <= b.bits};
    }
  }
  case Op::StrContains: {
    auto h = self(t.arg(0)), n = self(t.arg(1));
    return Value{h.as_string().find(n.as_string()) != std::string::npos};
  }
  case Op::StrPrefixOf: {
    auto p = self(t.arg(0)), s = self(t.arg(1));
    return Value{s.as_string().rfind(p.as_string(), 0) == 0};
  }
  case Op::StrConcat: {
    std::string out;
    for (auto &a : t.args())
      out += self(a).as_string();
    return Value{std::move(out)};
  }
  case Op::StrLen:
    return Value{Integer{static_cast<long long>(decode_utf8(self(t.arg(0)).as_string()).size())}};
  case Op::StrInCharset: {
    for (char32_t c : decode_utf8(self(t.arg(0)).as_string()))
      if (!charset_contains(t.charset(), c))
        return Value{false};
    return Value{true};
  }
  case Op::Select: {
    auto arr = self(t.arg(0)).as_array();
    auto idx = self(t.arg(1)).as_bv();
    return Value{BitVecValue{arr.select(idx.bits), arr.fallback.width}};
  }
  case Op::Store: {
    auto arr = self(t.arg(0)).as_array();
    auto idx = self(t.arg(1)).as_bv();
    auto val = self(t.arg(2)).as_bv();
    arr.entries[idx.bits] = val.bits;
    return Value{std::move(arr)};
  }
  }
  throw EvalError("unhandled operator");
}

inline Value evaluate(const Term &t, const Model &m) { return Evaluator{m}(t); }

inline bool holds(const Term &t, const Model &m) { return evaluate(t, m).as_bool(); }

} // namespace guard::smt

#endif // GUARD_SMT_EVAL_HPP
