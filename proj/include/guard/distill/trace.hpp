#ifndef GUARD_DISTILL_TRACE_HPP
#define GUARD_DISTILL_TRACE_HPP

#include <algorithm>
#include <cctype>
#include <cstring>
#include <string>
#include <vector>

#include "guard/code/parser.hpp"
#include "guard/distill/polynomial.hpp"
#include "guard/error.hpp"

namespace guard::distill {

inline constexpr int max_degree = 3;
inline constexpr const char *unknown_name = "x";

struct Equation {
  Polynomial lhs, rhs;
  std::string text;          // the equation as written, justification stripped
  std::string justification; // text after '#', if any
  int line = 0;

  std::string to_string() const { return lhs.to_string() + " = " + rhs.to_string(); }
};

struct ReasoningTrace {
  std::vector<Equation> steps;
};

namespace detail {

// Maps the few non-ASCII operator spellings onto ASCII.
inline std::string normalize_operators(const std::string &s)
{
  static const std::pair<const char *, const char *> subs[] = {
    {"\xe2\x88\x92", "-"}, // minus sign
    {"\xc3\x97", "*"},     // multiplication sign
    {"\xc2\xb7", "*"},     // middle dot
    {"\xe2\x8b\x85", "*"}, // dot operator
  };
  std::string out = s;
  for (auto &[from, to] : subs) {
    size_t pos = 0;
    while ((pos = out.find(from, pos)) != std::string::npos) {
      out.replace(pos, std::strlen(from), to);
      pos += std::strlen(to);
    }
  }
  return out;
}

class EquationParser {
public:
  EquationParser(std::string text, int line) : s_(std::move(text)), line_(line) {}

  Equation parse()
  {
    Equation eq;
    eq.line = line_;
    eq.lhs = sum();
    skip_ws();
    if (!eat('='))
      fail(pos_ < s_.size() ? "unexpected '" + std::string(1, s_[pos_]) + "'" : "missing '='");
    eq.rhs = sum();
    skip_ws();
    if (pos_ < s_.size())
      fail(s_[pos_] == '=' ? std::string("more than one '='")
                           : "unexpected '" + std::string(1, s_[pos_]) + "'");
    return eq;
  }

private:
  [[noreturn]] void fail(const std::string &msg) const { throw ParseError(msg, line_); }

  void skip_ws()
  {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      pos_++;
  }

  bool eat(char c)
  {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      pos_++;
      return true;
    }
    return false;
  }

  char peek()
  {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  Polynomial checked(Polynomial p) const
  {
    if (p.degree() > max_degree)
      fail("degree " + std::to_string(p.degree()) + " exceeds the maximum of "
           + std::to_string(max_degree));
    return p;
  }

  Polynomial sum()
  {
    Polynomial acc = product();
    for (;;) {
      if (eat('+'))
        acc = acc + product();
      else if (eat('-'))
        acc = acc - product();
      else
        return acc;
    }
  }

  bool starts_factor()
  {
    char c = peek();
    return std::isalpha(static_cast<unsigned char>(c)) || c == '(';
  }

  Polynomial product()
  {
    Polynomial acc = unary();
    for (;;) {
      if (eat('*')) {
        acc = checked(acc * unary());
      } else if (eat('/')) {
        Polynomial d = unary();
        if (!d.is_constant())
          fail("division by an expression containing x");
        if (d.is_zero())
          fail("division by zero");
        acc = acc * Polynomial::constant(Rational{1} / d.coeff(0));
      } else if (starts_factor()) {
        acc = checked(acc * power()); // implicit: 3x, 2(x + 1), (x + 1)(x - 1)
      } else {
        return acc;
      }
    }
  }

  Polynomial unary()
  {
    if (eat('-'))
      return -unary();
    if (eat('+'))
      return unary();
    return power();
  }

  Polynomial power()
  {
    Polynomial base = atom();
    if (!eat('^'))
      return base;
    skip_ws();
    size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
      pos_++;
    if (start == pos_)
      fail("exponent must be a nonnegative integer literal");
    std::string digits = s_.substr(start, pos_ - start);
    if (digits.size() > 2 || std::stoi(digits) > max_degree) {
      if (base.is_constant())
        fail("exponent " + digits + " is too large");
      fail("degree " + digits + " exceeds the maximum of " + std::to_string(max_degree));
    }
    Polynomial out = Polynomial::constant(Rational{1});
    for (int i = 0; i < std::stoi(digits); ++i)
      out = checked(out * base);
    return out;
  }

  Polynomial atom()
  {
    skip_ws();
    if (pos_ >= s_.size())
      fail("unexpected end of equation");
    char c = s_[pos_];
    if (c == '(') {
      pos_++;
      Polynomial p = sum();
      if (!eat(')'))
        fail("missing ')'");
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t start = pos_;
      while (pos_ < s_.size()
             && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
        pos_++;
      std::string lit = s_.substr(start, pos_ - start);
      if (std::count(lit.begin(), lit.end(), '.') > 1 || lit == ".")
        fail("malformed number '" + lit + "'");
      if (lit.find('.') == std::string::npos)
        return Polynomial::constant(Rational{code::detail::parse_int_literal(lit, line_)});
      return Polynomial::constant(code::detail::parse_float_literal(lit));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < s_.size()
             && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        pos_++;
      std::string name = s_.substr(start, pos_ - start);
      if (name != unknown_name)
        fail("multiple unknowns: only x is allowed, found '" + name + "'");
      return Polynomial::unknown();
    }
    if (c == ')')
      fail("unbalanced ')'");
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string s_;
  int line_;
  size_t pos_ = 0;
};

inline std::string trim(const std::string &s)
{
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos)
    return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

} // namespace detail

inline Equation parse_equation(const std::string &text, int line = 1)
{
  std::string body = text, note;
  if (auto hash = body.find('#'); hash != std::string::npos) {
    note = detail::trim(body.substr(hash + 1));
    body = body.substr(0, hash);
  }
  body = detail::trim(body);
  if (body.empty())
    throw ParseError("empty equation", line);
  Equation eq = detail::EquationParser(detail::normalize_operators(body), line).parse();
  eq.text = body;
  eq.justification = note;
  return eq;
}

// One equation per line. Blank lines and lines starting with '#' are skipped;
// text after '#' on an equation line is a justification.
inline ReasoningTrace parse_trace(const std::string &text)
{
  ReasoningTrace trace;
  size_t start = 0;
  int line = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string::npos)
      end = text.size();
    std::string raw = text.substr(start, end - start);
    line++;
    start = end + 1;
    std::string t = detail::trim(raw);
    if (t.empty() || t[0] == '#')
      continue;
    trace.steps.push_back(parse_equation(raw, line));
  }
  if (trace.steps.empty())
    throw ParseError("trace contains no equations");
  return trace;
}

} // namespace guard::distill

#endif // GUARD_DISTILL_TRACE_HPP
