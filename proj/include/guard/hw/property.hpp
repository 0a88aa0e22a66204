#ifndef GUARD_HW_PROPERTY_HPP
#define GUARD_HW_PROPERTY_HPP

#include <cctype>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "guard/hw/symexec.hpp"

namespace guard::hw {

struct RegisterBound {
  unsigned reg;
  int64_t lo, hi; // signed 32-bit
};

struct NoPrivilege {};

struct MemoryWithin {
  MemoryRegion region;
};

// Boolean condition over initial (`a0`) and final (`a0'`) register values,
// kept as text and instantiated against a concrete execution.
struct Custom {
  std::string expr;
};

struct HwProperty {
  std::variant<RegisterBound, NoPrivilege, MemoryWithin, Custom> kind;
  std::string text;
  int line = 0;
};

struct PropertySet {
  std::vector<HwProperty> properties;
  std::vector<std::string> assumptions; // expressions over initial values only
};

namespace detail {

// Infix conditions:
//   || && !   == != (values or conditions)   < <= > >= (signed)   <u <=u >u >=u (unsigned)
//   | ^ &   << >> (arithmetic) >>u (logical)   + -   unary - ~
//   numbers (decimal / 0x / 0b), registers (initial) and reg' (final).
class ExprParser {
public:
  ExprParser(const std::string &text, const MachineState *final_state, int line)
    : s_(text), final_(final_state), line_(line)
  {}

  smt::Term parse_condition()
  {
    smt::Term t = disj();
    skip_ws();
    if (pos_ != s_.size())
      fail("unexpected '" + s_.substr(pos_, 8) + "'");
    if (!t.sort().is_bool())
      fail("condition is a value, not a comparison");
    return t;
  }

private:
  [[noreturn]] void fail(const std::string &msg) const
  {
    throw ParseError("in '" + s_ + "': " + msg, line_);
  }

  void skip_ws()
  {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      pos_++;
  }

  bool eat(const std::string &tok)
  {
    skip_ws();
    if (s_.compare(pos_, tok.size(), tok) != 0)
      return false;
    pos_ += tok.size();
    return true;
  }

  // Operator tokens that must not be a prefix of a longer one.
  bool eat_op(const std::string &tok, const std::string &not_followed_by)
  {
    skip_ws();
    if (s_.compare(pos_, tok.size(), tok) != 0)
      return false;
    size_t after = pos_ + tok.size();
    if (after < s_.size() && not_followed_by.find(s_[after]) != std::string::npos)
      return false;
    pos_ = after;
    return true;
  }

  smt::Term want_bool(smt::Term t)
  {
    if (!t.sort().is_bool())
      fail("expected a condition");
    return t;
  }

  smt::Term want_word(smt::Term t)
  {
    if (t.sort().is_bool())
      fail("expected a value, got a condition");
    return t;
  }

  smt::Term disj()
  {
    smt::Term t = conj();
    while (eat("||"))
      t = smt::or_({want_bool(t), want_bool(conj())});
    return t;
  }

  smt::Term conj()
  {
    smt::Term t = neg();
    while (eat("&&"))
      t = smt::and_({want_bool(t), want_bool(neg())});
    return t;
  }

  smt::Term neg()
  {
    if (eat_op("!", "="))
      return smt::not_(want_bool(neg()));
    return cmp();
  }

  smt::Term cmp()
  {
    smt::Term a = bitor_();
    using F = smt::Term (*)(smt::Term, smt::Term);
    struct Rel {
      const char *tok;
      const char *guard;
      F fn;
      bool swap;
      bool negate;
    };
    static const Rel rels[] = {
      {"==", "", smt::eq, false, false},
      {"!=", "", smt::eq, false, true},
      {"<=u", "", smt::bv_ule, false, false},
      {">=u", "", smt::bv_ule, true, false},
      {"<u", "", smt::bv_ult, false, false},
      {">u", "", smt::bv_ult, true, false},
      {"<=", "", smt::bv_sle, false, false},
      {">=", "", smt::bv_sle, true, false},
      {"<", "<", smt::bv_slt, false, false},
      {">", ">", smt::bv_slt, true, false},
    };
    for (auto &r : rels) {
      if (!eat_op(r.tok, r.guard))
        continue;
      smt::Term b = bitor_();
      if (r.fn == smt::eq && a.sort().is_bool() && b.sort().is_bool())
        return r.negate ? smt::not_(smt::eq(a, b)) : smt::eq(a, b);
      smt::Term x = want_word(a), y = want_word(b);
      smt::Term t = r.swap ? r.fn(y, x) : r.fn(x, y);
      return r.negate ? smt::not_(t) : t;
    }
    return a;
  }

  smt::Term bitor_()
  {
    smt::Term t = bitxor_();
    while (eat_op("|", "|"))
      t = smt::bv_or(want_word(t), want_word(bitxor_()));
    return t;
  }

  smt::Term bitxor_()
  {
    smt::Term t = bitand_();
    while (eat("^"))
      t = smt::bv_xor(want_word(t), want_word(bitand_()));
    return t;
  }

  smt::Term bitand_()
  {
    smt::Term t = shift();
    while (eat_op("&", "&"))
      t = smt::bv_and(want_word(t), want_word(shift()));
    return t;
  }

  smt::Term shift()
  {
    smt::Term t = sum();
    for (;;) {
      if (eat("<<"))
        t = smt::bv_shl(want_word(t), want_word(sum()));
      else if (eat(">>u"))
        t = smt::bv_lshr(want_word(t), want_word(sum()));
      else if (eat(">>"))
        t = smt::bv_ashr(want_word(t), want_word(sum()));
      else
        return t;
    }
  }

  smt::Term sum()
  {
    smt::Term t = unary();
    for (;;) {
      if (eat("+"))
        t = smt::bv_add(want_word(t), want_word(unary()));
      else if (eat("-"))
        t = smt::bv_sub(want_word(t), want_word(unary()));
      else
        return t;
    }
  }

  smt::Term unary()
  {
    if (eat("-"))
      return smt::bv_neg(want_word(unary()));
    if (eat("~"))
      return smt::bv_xor(want_word(unary()), word(0xffffffffu));
    return atom();
  }

  smt::Term atom()
  {
    skip_ws();
    if (pos_ >= s_.size())
      fail("unexpected end of expression");
    if (eat("(")) {
      smt::Term t = disj();
      if (!eat(")"))
        fail("missing ')'");
      return t;
    }
    size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      pos_++;
    std::string tok = s_.substr(start, pos_ - start);
    if (tok.empty())
      fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    if (std::isdigit(static_cast<unsigned char>(tok[0]))) {
      auto v = parse_number(tok);
      if (!v || *v > 0xffffffffLL)
        fail("'" + tok + "' is not a 32-bit number");
      return word(static_cast<uint32_t>(*v));
    }
    auto r = parse_register(tok);
    if (!r)
      fail("'" + tok + "' is not a register");
    if (pos_ < s_.size() && s_[pos_] == '\'') {
      pos_++;
      if (!final_)
        fail("assumptions may only mention initial values");
      return final_->regs[*r];
    }
    return initial_reg(*r);
  }

  std::string s_;
  const MachineState *final_;
  int line_;
  size_t pos_ = 0;
};

inline int64_t signed_bound(const std::string &tok, int line)
{
  auto v = parse_number(tok);
  if (!v || *v < -(int64_t{1} << 31) || *v > (int64_t{1} << 31) - 1)
    throw ParseError("bound '" + tok + "' is not a signed 32-bit value", line);
  return *v;
}

} // namespace detail

// `final_state` is null for assumptions, which see only initial values.
inline smt::Term condition_term(const std::string &expr, const MachineState *final_state,
                                int line = 0)
{
  return detail::ExprParser(expr, final_state, line).parse_condition();
}

// One property per line:
//   bound <reg> <lo> <hi> | nopriv | memwithin <base> <size> | assume <expr> | ensure <expr>
inline PropertySet parse_properties(const std::string &text)
{
  PropertySet out;
  std::istringstream lines(text);
  std::string raw;
  int line = 0;
  MachineState probe = initial_state();
  while (std::getline(lines, raw)) {
    line++;
    std::string body = raw;
    if (auto hash = body.find('#'); hash != std::string::npos)
      body = body.substr(0, hash);
    body = detail::trim(body);
    if (body.empty())
      continue;
    std::istringstream words(body);
    std::string kw;
    words >> kw;
    std::string rest;
    std::getline(words, rest);
    rest = detail::trim(rest);
    std::vector<std::string> args;
    {
      std::istringstream a(rest);
      std::string w;
      while (a >> w)
        args.push_back(w);
    }
    HwProperty p;
    p.text = body;
    p.line = line;
    if (kw == "bound") {
      if (args.size() != 3)
        throw ParseError("bound takes a register and two signed bounds", line);
      auto r = parse_register(args[0]);
      if (!r)
        throw ParseError("'" + args[0] + "' is not a register", line);
      RegisterBound b{*r, detail::signed_bound(args[1], line), detail::signed_bound(args[2], line)};
      if (b.lo > b.hi)
        throw ParseError("empty bound: lo > hi", line);
      p.kind = b;
    } else if (kw == "nopriv") {
      if (!args.empty())
        throw ParseError("nopriv takes no arguments", line);
      p.kind = NoPrivilege{};
    } else if (kw == "memwithin") {
      if (args.size() != 2)
        throw ParseError("memwithin takes a base address and a size in bytes", line);
      auto base = detail::parse_number(args[0]);
      auto size = detail::parse_number(args[1]);
      if (!base || *base < 0 || *base > 0xffffffffLL)
        throw ParseError("base '" + args[0] + "' is not a 32-bit address", line);
      if (!size || *size <= 0 || *size % 4 != 0)
        throw ParseError("size must be a positive multiple of 4", line);
      if (*base + *size > (int64_t{1} << 32))
        throw ParseError("region wraps past the end of the address space", line);
      p.kind = MemoryWithin{{static_cast<uint32_t>(*base), static_cast<uint32_t>(*size)}};
    } else if (kw == "assume") {
      if (rest.empty())
        throw ParseError("assume needs a condition", line);
      condition_term(rest, nullptr, line);
      out.assumptions.push_back(rest);
      continue;
    } else if (kw == "ensure") {
      if (rest.empty())
        throw ParseError("ensure needs a condition", line);
      condition_term(rest, &probe, line);
      p.kind = Custom{rest};
    } else {
      throw ParseError("unknown property '" + kw + "'", line);
    }
    out.properties.push_back(std::move(p));
  }
  if (out.properties.empty())
    throw ParseError("no properties given");
  return out;
}

} // namespace guard::hw

#endif // GUARD_HW_PROPERTY_HPP
