#ifndef GUARD_SMT_SMTLIB_HPP
#define GUARD_SMT_SMTLIB_HPP

#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "guard/smt/eval.hpp"
#include "guard/smt/sexpr.hpp"
#include "guard/smt/term.hpp"

namespace guard::smt {

// ---------------------------------------------------------------------------
// Literals and symbols

inline bool is_simple_symbol(const std::string &s)
{
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0])))
    return false;
  static const std::string extra = "~!@$%^&*_-+=<>.?/";
  for (unsigned char c : s)
    if (!std::isalnum(c) && extra.find(static_cast<char>(c)) == std::string::npos)
      return false;
  return true;
}

inline std::string symbol(const std::string &s)
{
  if (s.find('|') != std::string::npos || s.find('\\') != std::string::npos)
    throw SortError("symbol '" + s + "' cannot be quoted in SMT-LIB");
  return is_simple_symbol(s) ? s : "|" + s + "|";
}

// SMT-LIB 2.6 string literal: printable ASCII verbatim, "" for quote,
// \u{..} for everything else (including backslash).
inline std::string string_literal(const std::string &s)
{
  std::string out = "\"";
  for (char32_t c : decode_utf8(s)) {
    if (c == '"') {
      out += "\"\"";
    } else if (c >= 0x20 && c < 0x7f && c != '\\') {
      out += static_cast<char>(c);
    } else {
      std::ostringstream os;
      os << "\\u{" << std::hex << static_cast<uint32_t>(c) << "}";
      out += os.str();
    }
  }
  return out + "\"";
}

// Inverse of the solver's string escapes (\u{X}, \uXXXX).
inline std::string unescape_string(const std::string &s)
{
  std::string out;
  for (size_t i = 0; i < s.size(); i++) {
    if (s[i] == '\\' && i + 1 < s.size() && s[i + 1] == 'u') {
      size_t j = i + 2;
      std::string hex;
      if (j < s.size() && s[j] == '{') {
        size_t close = s.find('}', j);
        if (close != std::string::npos && close - j - 1 >= 1 && close - j - 1 <= 5) {
          hex = s.substr(j + 1, close - j - 1);
          j = close + 1;
        }
      } else if (j + 4 <= s.size()) {
        hex = s.substr(j, 4);
        j += 4;
      }
      bool ok = !hex.empty();
      for (char h : hex)
        ok = ok && std::isxdigit(static_cast<unsigned char>(h));
      if (ok) {
        out += encode_utf8(static_cast<char32_t>(std::stoul(hex, nullptr, 16)));
        i = j - 1;
        continue;
      }
    }
    out += s[i];
  }
  return out;
}

inline std::string int_literal(const Integer &i)
{
  if (i < 0)
    return "(- " + Integer{-i}.str() + ")";
  return i.str();
}

inline std::string real_literal(const Rational &r)
{
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  Rational a = r < 0 ? Rational{-r} : r;
  std::string body = denominator(a) == 1
    ? numerator(a).str() + ".0"
    : "(/ " + numerator(a).str() + ".0 " + denominator(a).str() + ".0)";
  return r < 0 ? "(- " + body + ")" : body;
}

inline std::string bv_literal(const BitVecValue &bv)
{
  if (bv.width % 4 == 0)
    return "#x" + hex_string(bv.bits, bv.width).substr(2);
  std::string out = "#b";
  for (unsigned i = bv.width; i-- > 0;)
    out += ((bv.bits >> i) & 1) ? '1' : '0';
  return out;
}

inline std::string value_literal(const Value &v)
{
  if (v.is_bool())
    return v.as_bool() ? "true" : "false";
  if (v.is_int())
    return int_literal(v.as_int());
  if (v.is_real())
    return real_literal(v.as_real());
  if (v.is_bv())
    return bv_literal(v.as_bv());
  if (v.is_string())
    return string_literal(v.as_string());
  if (v.is_array()) {
    auto &a = v.as_array();
    std::string out = "((as const " + Sort::array(a.index_width, a.fallback.width).smtlib() + ") "
      + bv_literal(a.fallback) + ")";
    for (auto &[k, e] : a.entries)
      out = "(store " + out + " " + bv_literal(BitVecValue{k, a.index_width}) + " "
        + bv_literal(BitVecValue{e, a.fallback.width}) + ")";
    return out;
  }
  return v.to_string();
}

// ---------------------------------------------------------------------------
// Term printing. Nodes referenced more than once inside an assertion are
// let-bound so the text stays linear in the DAG size.

class TermPrinter {
public:
  std::string print(const Term &root)
  {
    names_.clear();
    counter_ = 0;
    std::unordered_map<const void *, int> refs;
    std::vector<Term> order;
    count_refs(root, refs, order);
    std::vector<std::pair<std::string, std::string>> bindings;
    for (auto &t : order) {
      if (t.arity() == 0 || refs[t.id()] < 2)
        continue;
      std::string name = "?s" + std::to_string(bindings.size());
      bindings.emplace_back(name, emit(t));
      names_[t.id()] = name;
    }
    std::string body = emit(root);
    for (auto it = bindings.rbegin(); it != bindings.rend(); ++it)
      body = "(let ((" + it->first + " " + it->second + ")) " + body + ")";
    return body;
  }

private:
  // Post-order over the DAG; `order` lists each node once, children first.
  static void count_refs(const Term &root, std::unordered_map<const void *, int> &refs,
                         std::vector<Term> &order)
  {
    std::unordered_set<const void *> done;
    std::vector<std::pair<Term, bool>> stack{{root, false}};
    refs[root.id()]++;
    while (!stack.empty()) {
      auto [t, expanded] = stack.back();
      stack.pop_back();
      if (expanded) {
        order.push_back(t);
        continue;
      }
      if (!done.insert(t.id()).second)
        continue;
      stack.emplace_back(t, true);
      auto args = t.args();
      for (auto it = args.rbegin(); it != args.rend(); ++it) {
        refs[it->id()]++;
        stack.emplace_back(*it, false);
      }
    }
  }

  std::string fresh() { return "?l" + std::to_string(counter_++); }

  std::string emit(const Term &t)
  {
    if (auto it = names_.find(t.id()); it != names_.end())
      return it->second;
    switch (t.op()) {
    case Op::Var: return symbol(t.name());
    case Op::Lit: return value_literal(t.value());
    default: break;
    }
    auto sub = [&](size_t i) { return emit(t.arg(i)); };
    auto nary = [&](const char *f) {
      std::string out = std::string("(") + f;
      for (size_t i = 0; i < t.arity(); i++)
        out += " " + sub(i);
      return out + ")";
    };
    // Binds operands locally when a lowering mentions them more than once.
    auto with_operands = [&](size_t n, const std::function<std::string(std::vector<std::string>)> &f) {
      std::vector<std::string> names, binds;
      for (size_t i = 0; i < n; i++) {
        std::string text = sub(i);
        if (t.arg(i).arity() == 0 || names_.count(t.arg(i).id())) {
          names.push_back(text);
        } else {
          std::string v = fresh();
          binds.push_back("(" + v + " " + text + ")");
          names.push_back(v);
        }
      }
      std::string body = f(names);
      if (binds.empty())
        return body;
      std::string b;
      for (auto &x : binds)
        b += (b.empty() ? "" : " ") + x;
      return "(let (" + b + ") " + body + ")";
    };
    switch (t.op()) {
    case Op::Add: return nary("+");
    case Op::Sub: return nary("-");
    case Op::Mul: return nary("*");
    case Op::DivReal: return nary("/");
    case Op::Neg: return nary("-");
    case Op::ToReal: return nary("to_real");
    case Op::DivFloor:
      // Euclidean div rounds toward -inf only for positive divisors.
      return with_operands(2, [](std::vector<std::string> o) {
        std::string q = "(div " + o[0] + " " + o[1] + ")";
        std::string r = "(mod " + o[0] + " " + o[1] + ")";
        return "(ite (and (< " + o[1] + " 0) (distinct " + r + " 0)) (- " + q + " 1) " + q + ")";
      });
    case Op::ModFloor:
      return with_operands(2, [](std::vector<std::string> o) {
        std::string r = "(mod " + o[0] + " " + o[1] + ")";
        return "(ite (and (< " + o[1] + " 0) (distinct " + r + " 0)) (+ " + r + " " + o[1] + ") "
          + r + ")";
      });
    case Op::Abs:
      return with_operands(1, [&](std::vector<std::string> o) {
        std::string zero = t.sort().is_int() ? "0" : "0.0";
        return "(ite (>= " + o[0] + " " + zero + ") " + o[0] + " (- " + o[0] + "))";
      });
    case Op::Min:
      return with_operands(2, [](std::vector<std::string> o) {
        return "(ite (<= " + o[0] + " " + o[1] + ") " + o[0] + " " + o[1] + ")";
      });
    case Op::Max:
      return with_operands(2, [](std::vector<std::string> o) {
        return "(ite (>= " + o[0] + " " + o[1] + ") " + o[0] + " " + o[1] + ")";
      });
    case Op::Lt: return nary("<");
    case Op::Le: return nary("<=");
    case Op::Gt: return nary(">");
    case Op::Ge: return nary(">=");
    case Op::Eq: return nary("=");
    case Op::Ne: return nary("distinct");
    case Op::And:
      if (t.arity() == 0)
        return "true";
      return t.arity() == 1 ? sub(0) : nary("and");
    case Op::Or:
      if (t.arity() == 0)
        return "false";
      return t.arity() == 1 ? sub(0) : nary("or");
    case Op::Not: return nary("not");
    case Op::Implies: return nary("=>");
    case Op::Ite: return nary("ite");
    case Op::BvAdd: return nary("bvadd");
    case Op::BvSub: return nary("bvsub");
    case Op::BvNeg: return nary("bvneg");
    case Op::BvAnd: return nary("bvand");
    case Op::BvOr: return nary("bvor");
    case Op::BvXor: return nary("bvxor");
    case Op::BvShl: return nary("bvshl");
    case Op::BvLshr: return nary("bvlshr");
    case Op::BvAshr: return nary("bvashr");
    case Op::BvSlt: return nary("bvslt");
    case Op::BvSle: return nary("bvsle");
    case Op::BvUlt: return nary("bvult");
    case Op::BvUle: return nary("bvule");
    case Op::StrContains: return nary("str.contains");
    case Op::StrConcat: return nary("str.++");
    case Op::StrLen: return nary("str.len");
    case Op::StrPrefixOf: return nary("str.prefixof");
    case Op::StrInCharset: {
      std::string ranges;
      for (auto &r : t.charset())
        ranges += (ranges.empty() ? "" : " ") + std::string("(re.range ")
          + string_literal(encode_utf8(r.lo)) + " " + string_literal(encode_utf8(r.hi)) + ")";
      if (t.charset().size() > 1)
        ranges = "(re.union " + ranges + ")";
      return "(str.in_re " + sub(0) + " (re.* " + ranges + "))";
    }
    case Op::Select: return nary("select");
    case Op::Store: return nary("store");
    case Op::Var:
    case Op::Lit: break;
    }
    throw SortError(std::string("cannot print operator ") + op_name(t.op()));
  }

  std::unordered_map<const void *, std::string> names_;
  int counter_ = 0;
};

inline std::string to_smtlib(const Term &t) { return TermPrinter{}.print(t); }

// ---------------------------------------------------------------------------
// Logic selection

struct TheoryUse {
  bool strings = false, bitvecs = false, arrays = false, ints = false, reals = false;
  bool nonlinear = false;
};

inline TheoryUse scan_theories(std::span<const Term> decls, std::span<const Term> assertions)
{
  TheoryUse use;
  auto note_sort = [&](const Sort &s) {
    switch (s.kind()) {
    case SortKind::String: use.strings = true; break;
    case SortKind::BitVec: use.bitvecs = true; break;
    case SortKind::Array:
      use.arrays = true;
      use.bitvecs = true;
      break;
    case SortKind::Int: use.ints = true; break;
    case SortKind::Real: use.reals = true; break;
    case SortKind::Bool: break;
    }
  };
  for (auto &d : decls)
    note_sort(d.sort());
  std::unordered_map<const void *, bool> ground; // node -> contains no variables
  std::function<bool(const Term &)> is_ground = [&](const Term &t) {
    if (auto it = ground.find(t.id()); it != ground.end())
      return it->second;
    bool g = !t.is_var();
    for (auto &a : t.args())
      g = is_ground(a) && g;
    ground[t.id()] = g;
    return g;
  };
  std::unordered_set<const void *> seen;
  std::vector<Term> stack(assertions.begin(), assertions.end());
  while (!stack.empty()) {
    Term t = stack.back();
    stack.pop_back();
    if (!seen.insert(t.id()).second)
      continue;
    note_sort(t.sort());
    switch (t.op()) {
    case Op::Mul:
      if (!is_ground(t.arg(0)) && !is_ground(t.arg(1)))
        use.nonlinear = true;
      break;
    case Op::DivReal:
    case Op::DivFloor:
    case Op::ModFloor:
      if (!is_ground(t.arg(1)))
        use.nonlinear = true;
      break;
    case Op::StrLen:
      use.ints = true;
      break;
    default: break;
    }
    for (auto &a : t.args())
      stack.push_back(a);
  }
  return use;
}

// Narrowest logic covering the query.
inline std::string select_logic(std::span<const Term> decls, std::span<const Term> assertions)
{
  TheoryUse u = scan_theories(decls, assertions);
  bool arith = u.ints || u.reals;
  if (u.strings || (u.bitvecs && arith))
    return "ALL";
  if (u.bitvecs)
    return u.arrays ? "QF_ABV" : "QF_BV";
  if (arith) {
    std::string l = u.nonlinear ? "QF_N" : "QF_L";
    if (u.ints && u.reals)
      return l + "IRA";
    return l + (u.ints ? "IA" : "RA");
  }
  return "QF_UF";
}

// Complete script: options, logic, declarations, assertions, check-sat, get-model.
// Deterministic in its arguments.
inline std::string serialize(std::span<const Term> declarations, std::span<const Term> assertions)
{
  for (auto &a : assertions)
    if (!a.sort().is_bool())
      throw SortError("assertion is not Bool-sorted: " + a.sort().name());
  std::ostringstream os;
  os << "(set-option :produce-models true)\n";
  os << "(set-logic " << select_logic(declarations, assertions) << ")\n";
  for (auto &d : declarations) {
    if (!d.is_var())
      throw SortError("declaration is not a variable");
    os << "(declare-const " << symbol(d.name()) << " " << d.sort().smtlib() << ")\n";
  }
  for (auto &a : assertions)
    os << "(assert " << to_smtlib(a) << ")\n";
  os << "(check-sat)\n(get-model)\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Model parsing

namespace detail {

inline Integer parse_numeral(const SExpr &e, const std::string &raw)
{
  if (e.kind == SExpr::Kind::Numeral)
    return Integer{e.text};
  if (e.is_list() && e.size() == 2 && e[0].is_symbol("-"))
    return -parse_numeral(e[1], raw);
  throw ModelParseError("expected integer, got " + e.str(), raw);
}

inline Rational parse_decimal(const std::string &text)
{
  auto dot = text.find('.');
  if (dot == std::string::npos)
    return Rational{Integer{text}};
  std::string frac = text.substr(dot + 1);
  Integer scale = 1;
  for (size_t i = 0; i < frac.size(); i++)
    scale *= 10;
  return Rational{Integer{text.substr(0, dot) + frac}} / Rational{scale};
}

inline std::optional<Rational> parse_real(const SExpr &e, const std::string &raw)
{
  if (e.kind == SExpr::Kind::Numeral || e.kind == SExpr::Kind::Decimal)
    return parse_decimal(e.text);
  if (e.is_list() && e.size() == 2 && e[0].is_symbol("-")) {
    auto r = parse_real(e[1], raw);
    if (r)
      return Rational{-*r};
    return std::nullopt;
  }
  if (e.is_list() && e.size() == 3 && e[0].is_symbol("/")) {
    auto n = parse_real(e[1], raw), d = parse_real(e[2], raw);
    if (n && d && *d != 0)
      return Rational{*n / *d};
  }
  if (e.is_list() && e.size() == 2 && e[0].is_symbol("to_real"))
    return Rational{parse_numeral(e[1], raw)};
  return std::nullopt;
}

inline BitVecValue parse_bv(const SExpr &e, unsigned width, const std::string &raw)
{
  if (e.kind == SExpr::Kind::Hex)
    return BitVecValue{std::stoull(e.text.substr(2), nullptr, 16), width};
  if (e.kind == SExpr::Kind::Binary)
    return BitVecValue{std::stoull(e.text.substr(2), nullptr, 2), width};
  if (e.is_list() && e.size() == 3 && e[0].is_symbol("_") && e[1].text.rfind("bv", 0) == 0)
    return BitVecValue{std::stoull(e[1].text.substr(2)), width};
  throw ModelParseError("expected bitvector literal, got " + e.str(), raw);
}

struct FunctionDef {
  std::vector<std::string> params;
  SExpr body;
};

inline void parse_array_function(const SExpr &body, const std::string &param, ArrayValue &out,
                                 const std::string &raw)
{
  // (ite (= x c) v rest) chains, as emitted for finite array interpretations.
  const SExpr *cur = &body;
  std::map<uint64_t, uint64_t> entries;
  while (cur->is_list() && cur->size() == 4 && (*cur)[0].is_symbol("ite")) {
    const SExpr &cond = (*cur)[1];
    if (!(cond.is_list() && cond.size() == 3 && cond[0].is_symbol("=")))
      throw ModelParseError("unsupported array interpretation: " + body.str(), raw);
    const SExpr &key = cond[1].is_symbol(param) ? cond[2] : cond[1];
    uint64_t k = parse_bv(key, out.index_width, raw).bits;
    entries.emplace(k, parse_bv((*cur)[2], out.fallback.width, raw).bits);
    cur = &(*cur)[3];
  }
  out.fallback = parse_bv(*cur, out.fallback.width, raw);
  for (auto &[k, v] : entries)
    out.entries.emplace(k, v);
}

inline Value parse_value(const SExpr &e, const Sort &sort,
                         const std::map<std::string, FunctionDef> &functions,
                         const std::string &raw)
{
  switch (sort.kind()) {
  case SortKind::Bool:
    if (e.is_symbol("true"))
      return Value{true};
    if (e.is_symbol("false"))
      return Value{false};
    break;
  case SortKind::Int: return Value{parse_numeral(e, raw)};
  case SortKind::Real: {
    if (auto r = parse_real(e, raw))
      return Value{*r};
    return Value{AlgebraicValue{e.str()}};
  }
  case SortKind::BitVec: return Value{parse_bv(e, sort.width(), raw)};
  case SortKind::String:
    if (e.kind == SExpr::Kind::String)
      return Value{unescape_string(e.text)};
    break;
  case SortKind::Array: {
    ArrayValue arr;
    arr.index_width = sort.index_width();
    arr.fallback = BitVecValue{0, sort.elem_width()};
    if (e.is_list() && e.size() == 2 && e[0].is_list() && e[0].size() == 3
        && e[0][0].is_symbol("as") && e[0][1].is_symbol("const")) {
      arr.fallback = parse_bv(e[1], sort.elem_width(), raw);
      return Value{arr};
    }
    if (e.is_list() && e.size() == 4 && e[0].is_symbol("store")) {
      ArrayValue base = parse_value(e[1], sort, functions, raw).as_array();
      base.entries[parse_bv(e[2], sort.index_width(), raw).bits] =
        parse_bv(e[3], sort.elem_width(), raw).bits;
      return Value{base};
    }
    if (e.is_list() && e.size() == 3 && e[0].is_symbol("_") && e[1].is_symbol("as-array")) {
      auto it = functions.find(e[2].text);
      if (it == functions.end() || it->second.params.size() != 1)
        throw ModelParseError("unknown array function " + e[2].text, raw);
      parse_array_function(it->second.body, it->second.params[0], arr, raw);
      return Value{arr};
    }
    if (e.is_list() && e.size() == 3 && e[0].is_symbol("lambda") && e[1].is_list()
        && e[1].size() == 1 && e[1][0].is_list() && e[1][0].size() == 2) {
      parse_array_function(e[2], e[1][0][0].text, arr, raw);
      return Value{arr};
    }
    break;
  }
  }
  throw ModelParseError("cannot read " + sort.name() + " value from " + e.str(), raw);
}

inline Value default_value(const Sort &s)
{
  switch (s.kind()) {
  case SortKind::Bool: return Value{false};
  case SortKind::Int: return Value{Integer{0}};
  case SortKind::Real: return Value{Rational{0}};
  case SortKind::BitVec: return Value{BitVecValue{0, s.width()}};
  case SortKind::String: return Value{std::string{}};
  case SortKind::Array: {
    ArrayValue a;
    a.index_width = s.index_width();
    a.fallback = BitVecValue{0, s.elem_width()};
    return Value{a};
  }
  }
  return Value{};
}

} // namespace detail

// Reads a get-model reply. Declared variables the solver omitted are left
// unconstrained by the query, so they receive a default value.
inline Model parse_model(const SExpr &reply, std::span<const Term> declarations,
                         const std::string &raw)
{
  if (!reply.is_list())
    throw ModelParseError("model reply is not a list", raw);
  std::map<std::string, Sort> sorts;
  for (auto &d : declarations)
    sorts.emplace(d.name(), d.sort());

  std::map<std::string, detail::FunctionDef> functions;
  std::vector<std::pair<std::string, const SExpr *>> constants;
  for (auto &item : reply.items) {
    if (item.is_symbol("model"))
      continue;
    if (!item.is_list() || item.size() != 5 || !item[0].is_symbol("define-fun"))
      continue;
    const SExpr &params = item[2];
    if (!params.is_list())
      throw ModelParseError("malformed define-fun", raw);
    if (params.size() == 0) {
      constants.emplace_back(item[1].text, &item[4]);
    } else {
      detail::FunctionDef f;
      for (auto &p : params.items)
        f.params.push_back(p.is_list() && p.size() > 0 ? p[0].text : p.text);
      f.body = item[4];
      functions.emplace(item[1].text, std::move(f));
    }
  }

  Model model;
  for (auto &[name, expr] : constants) {
    auto it = sorts.find(name);
    if (it == sorts.end())
      continue;
    model.set(name, detail::parse_value(*expr, it->second, functions, raw));
  }
  for (auto &d : declarations)
    if (!model.contains(d.name()))
      model.set(d.name(), detail::default_value(d.sort()));
  return model;
}

inline Model parse_model(const std::string &text, std::span<const Term> declarations)
{
  return parse_model(parse_sexpr(text), declarations, text);
}

} // namespace guard::smt

#endif // GUARD_SMT_SMTLIB_HPP
