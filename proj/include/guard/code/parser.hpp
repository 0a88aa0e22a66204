#ifndef GUARD_CODE_PARSER_HPP
#define GUARD_CODE_PARSER_HPP

#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "guard/code/ast.hpp"
#include "guard/code/lexer.hpp"

namespace guard::code {

namespace detail {

inline smt::Integer parse_int_literal(std::string text, int line)
{
  std::erase(text, '_');
  unsigned base = 10;
  if (text.size() > 2 && text[0] == '0') {
    char p = static_cast<char>(std::tolower(static_cast<unsigned char>(text[1])));
    base = p == 'x' ? 16 : p == 'o' ? 8 : p == 'b' ? 2 : 10;
    if (base != 10)
      text = text.substr(2);
  }
  smt::Integer v = 0;
  if (text.empty())
    throw ParseError("invalid integer literal", line);
  for (char c : text) {
    int d = std::isdigit(static_cast<unsigned char>(c)) ? c - '0'
          : std::isxdigit(static_cast<unsigned char>(c))
            ? std::tolower(static_cast<unsigned char>(c)) - 'a' + 10
            : 99;
    if (d >= static_cast<int>(base))
      throw ParseError("invalid digit in integer literal", line);
    v = v * base + d;
  }
  return v;
}

// Decimal float text to its exact rational value (idealized reals).
inline smt::Rational parse_float_literal(std::string text)
{
  std::erase(text, '_');
  long exp10 = 0;
  if (auto e = text.find_first_of("eE"); e != std::string::npos) {
    exp10 = std::stol(text.substr(e + 1));
    text = text.substr(0, e);
  }
  std::string digits;
  for (char c : text)
    if (c != '.')
      digits += c;
  if (auto dot = text.find('.'); dot != std::string::npos)
    exp10 -= static_cast<long>(text.size() - dot - 1);
  smt::Integer mant = digits.empty() ? smt::Integer{0} : smt::Integer{digits};
  smt::Integer scale = boost::multiprecision::pow(smt::Integer{10}, static_cast<unsigned>(std::labs(exp10)));
  return exp10 >= 0 ? smt::Rational{mant * scale} : smt::Rational{mant, scale};
}

} // namespace detail

// Recursive-descent parser for the function subset. Constructs outside the
// subset raise UnsupportedConstruct at the first point they are recognized.
class Parser {
public:
  explicit Parser(std::vector<Token> toks)
    : toks_{std::move(toks)}
  {}

  FunctionUnit parse_unit()
  {
    std::optional<FunctionUnit> fn;
    for (;;) {
      skip_newlines();
      if (at(Tok::End))
        break;
      const Token &t = peek();
      if (is_kw("def")) {
        if (fn)
          unsupported("multiple-functions", t.line);
        fn = parse_def();
        continue;
      }
      if (is_kw("import") || is_kw("from"))
        unsupported("import", t.line);
      if (is_op("@"))
        unsupported("decorator", t.line);
      if (is_kw("class"))
        unsupported("class", t.line);
      if (is_kw("async"))
        unsupported("async", t.line);
      if (t.kind == Tok::String)
        unsupported("string", t.line);
      if (t.kind == Tok::Indent)
        throw ParseError("unexpected indent", t.line);
      unsupported("top-level-statement", t.line);
    }
    if (!fn)
      throw ParseError("no function definition found", 1);
    return *fn;
  }

  // A lone expression (contract clauses).
  Expr parse_standalone_expression()
  {
    skip_newlines();
    Expr e = expression();
    skip_newlines();
    if (!at(Tok::End))
      throw ParseError("unexpected '" + describe(peek()) + "' after expression", peek().line);
    return e;
  }

private:
  static constexpr std::string_view keywords[] = {
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class",
    "continue", "def", "del", "elif", "else", "except", "finally", "for", "from", "global",
    "if", "import", "in", "is", "lambda", "nonlocal", "not", "or", "pass", "raise",
    "return", "try", "while", "with", "yield"};

  static bool is_keyword(const std::string &s)
  {
    for (auto k : keywords)
      if (s == k)
        return true;
    return false;
  }

  [[noreturn]] static void unsupported(std::string feature, int line)
  {
    throw UnsupportedConstruct(UnsupportedFeature{std::move(feature), line});
  }

  static std::string describe(const Token &t)
  {
    switch (t.kind) {
    case Tok::Newline: return "end of line";
    case Tok::Indent: return "indent";
    case Tok::Dedent: return "dedent";
    case Tok::End: return "end of input";
    case Tok::String: return "string";
    default: return t.text;
    }
  }

  const Token &peek(size_t ahead = 0) const
  {
    size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  const Token &advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool is_op(std::string_view s, size_t ahead = 0) const
  {
    return peek(ahead).kind == Tok::Op && peek(ahead).text == s;
  }
  bool is_kw(std::string_view s, size_t ahead = 0) const
  {
    return peek(ahead).kind == Tok::Name && peek(ahead).text == s;
  }

  void expect_op(std::string_view s)
  {
    if (!is_op(s))
      throw ParseError("expected '" + std::string(s) + "', found '" + describe(peek()) + "'",
                       peek().line);
    advance();
  }

  void expect(Tok k, const char *what)
  {
    if (!at(k))
      throw ParseError(std::string("expected ") + what + ", found '" + describe(peek()) + "'",
                       peek().line);
    advance();
  }

  std::string expect_name()
  {
    if (!at(Tok::Name) || is_keyword(peek().text))
      throw ParseError("expected identifier, found '" + describe(peek()) + "'", peek().line);
    return advance().text;
  }

  void skip_newlines()
  {
    while (at(Tok::Newline))
      advance();
  }

  smt::Sort annotation(bool allow_bool)
  {
    int line = peek().line;
    if (at(Tok::String))
      unsupported("string", line);
    std::string name = expect_name();
    if (is_op("[") || is_op("."))
      unsupported("type:" + name, line);
    if (name == "int")
      return smt::Sort::integer();
    if (name == "float")
      return smt::Sort::real();
    if (name == "bool" && allow_bool)
      return smt::Sort::boolean();
    unsupported("type:" + name, line);
  }

  FunctionUnit parse_def()
  {
    FunctionUnit fn;
    fn.line = advance().line;
    fn.name = expect_name();
    expect_op("(");
    std::set<std::string> seen;
    while (!is_op(")")) {
      int line = peek().line;
      if (is_op("*") || is_op("**"))
        unsupported("varargs", line);
      if (is_op("/"))
        unsupported("positional-only-marker", line);
      Param p{expect_name(), smt::Sort::integer()};
      if (!seen.insert(p.name).second)
        throw ParseError("duplicate parameter '" + p.name + "'", line);
      if (is_op(":")) {
        advance();
        p.sort = annotation(false);
      }
      if (is_op("="))
        unsupported("default-argument", line);
      fn.params.push_back(std::move(p));
      if (!is_op(","))
        break;
      advance();
    }
    expect_op(")");
    if (is_op("->")) {
      advance();
      if (is_kw("None"))
        unsupported("type:None", peek().line);
      fn.return_sort = annotation(true);
    }
    expect_op(":");
    fn.body = suite();
    return fn;
  }

  std::vector<Stmt> suite()
  {
    std::vector<Stmt> out;
    if (!at(Tok::Newline)) {
      simple_statements(out);
      return out;
    }
    skip_newlines();
    if (!at(Tok::Indent))
      throw ParseError("expected an indented block", peek().line);
    advance();
    while (!at(Tok::Dedent) && !at(Tok::End)) {
      statement(out);
      skip_newlines();
    }
    if (at(Tok::Dedent))
      advance();
    return out;
  }

  void statement(std::vector<Stmt> &out)
  {
    const Token &t = peek();
    if (t.kind == Tok::Indent)
      throw ParseError("unexpected indent", t.line);
    if (is_kw("if")) {
      out.push_back(if_statement());
      return;
    }
    if (t.kind == Tok::Name) {
      const std::string &w = t.text;
      if (w == "while" || w == "for")
        unsupported("loop", t.line);
      if (w == "def")
        unsupported("nested-function", t.line);
      if (w == "class")
        unsupported("class", t.line);
      if (w == "try")
        unsupported("exception-handling", t.line);
      if (w == "with")
        unsupported("with", t.line);
      if (w == "async")
        unsupported("async", t.line);
      if (w == "elif" || w == "else")
        throw ParseError("'" + w + "' without matching 'if'", t.line);
    }
    if (is_op("@"))
      unsupported("decorator", t.line);
    simple_statements(out);
  }

  Stmt if_statement()
  {
    Stmt s;
    s.kind = StmtKind::If;
    s.line = advance().line;
    s.value = expression();
    expect_op(":");
    s.body = suite();
    skip_newlines();
    if (is_kw("elif")) {
      s.orelse.push_back(if_statement());
    } else if (is_kw("else")) {
      advance();
      expect_op(":");
      s.orelse = suite();
    }
    return s;
  }

  void simple_statements(std::vector<Stmt> &out)
  {
    for (;;) {
      out.push_back(small_statement());
      if (!is_op(";"))
        break;
      advance();
      if (at(Tok::Newline) || at(Tok::End))
        break;
    }
    if (!at(Tok::End))
      expect(Tok::Newline, "end of line");
  }

  Stmt small_statement()
  {
    const Token &t = peek();
    Stmt s;
    s.line = t.line;
    if (t.kind == Tok::String)
      unsupported("string", t.line);
    if (t.kind == Tok::Name) {
      const std::string &w = t.text;
      if (w == "return") {
        advance();
        if (at(Tok::Newline) || at(Tok::End) || is_op(";"))
          unsupported("return-none", t.line);
        s.kind = StmtKind::Return;
        s.value = expression();
        if (is_op(","))
          unsupported("tuple", t.line);
        return s;
      }
      if (w == "pass") {
        advance();
        s.kind = StmtKind::Pass;
        return s;
      }
      if (w == "break" || w == "continue")
        unsupported("loop", t.line);
      if (w == "import" || w == "from")
        unsupported("import", t.line);
      if (w == "raise")
        unsupported("raise", t.line);
      if (w == "assert")
        unsupported("assert", t.line);
      if (w == "global" || w == "nonlocal")
        unsupported("global", t.line);
      if (w == "del")
        unsupported("del", t.line);
      if (w == "yield")
        unsupported("generator", t.line);
      if (!is_keyword(w)) {
        if (is_op("=", 1))
          return assignment();
        if (is_op(":", 1)) {
          // Annotated assignment; the annotation does not change the value.
          std::string target = advance().text;
          advance();
          annotation(true);
          if (!is_op("="))
            unsupported("bare-annotation", t.line);
          advance();
          s.kind = StmtKind::Assign;
          s.targets = {target};
          s.value = expression();
          return s;
        }
        static const std::pair<const char *, BinaryOp> aug[] = {
          {"+=", BinaryOp::Add}, {"-=", BinaryOp::Sub},      {"*=", BinaryOp::Mul},
          {"/=", BinaryOp::Div}, {"//=", BinaryOp::FloorDiv}, {"%=", BinaryOp::Mod}};
        for (auto &[sym, op] : aug) {
          if (is_op(sym, 1)) {
            std::string target = advance().text;
            advance();
            Expr lhs;
            lhs.kind = ExprKind::Name;
            lhs.name = target;
            lhs.line = t.line;
            Expr rhs = expression();
            s.kind = StmtKind::Assign;
            s.targets = {target};
            s.value = binary(op, std::move(lhs), std::move(rhs), t.line);
            return s;
          }
        }
        for (auto sym : {"**=", "&=", "|=", "^=", "<<=", ">>=", "@="})
          if (is_op(sym, 1))
            unsupported(std::string(sym) == "**=" ? "power" : "bitwise", t.line);
      }
    }
    // Anything else is an expression used as a statement; parse it first so
    // unsupported constructs inside are reported by name.
    Expr e = expression();
    if (is_op(","))
      unsupported("tuple", t.line);
    if (is_op("="))
      throw ParseError("cannot assign to expression", t.line);
    unsupported("expression-statement", t.line);
  }

  Stmt assignment()
  {
    Stmt s;
    s.kind = StmtKind::Assign;
    s.line = peek().line;
    // a = b = expr
    while (at(Tok::Name) && !is_keyword(peek().text) && is_op("=", 1)) {
      s.targets.push_back(advance().text);
      advance();
    }
    s.value = expression();
    if (is_op(","))
      unsupported("tuple", s.line);
    if (is_op("="))
      throw ParseError("cannot assign to expression", s.line);
    return s;
  }

  static Expr binary(BinaryOp op, Expr lhs, Expr rhs, int line)
  {
    Expr e;
    e.kind = ExprKind::Binary;
    e.binary_op = op;
    e.line = line;
    e.children.push_back(std::move(lhs));
    e.children.push_back(std::move(rhs));
    return e;
  }

  // ---- expressions, lowest precedence first

  Expr expression()
  {
    int line = peek().line;
    if (is_kw("lambda"))
      unsupported("lambda", line);
    if (is_kw("yield"))
      unsupported("generator", line);
    Expr cond_then = or_test();
    if (is_op(":="))
      unsupported("walrus", line);
    if (!is_kw("if"))
      return cond_then;
    advance();
    Expr cond = or_test();
    if (!is_kw("else"))
      throw ParseError("expected 'else' in conditional expression", peek().line);
    advance();
    Expr otherwise = expression();
    Expr e;
    e.kind = ExprKind::Ternary;
    e.line = line;
    e.children.push_back(std::move(cond));
    e.children.push_back(std::move(cond_then));
    e.children.push_back(std::move(otherwise));
    return e;
  }

  Expr bool_chain(BoolOpKind kind, const char *kw, Expr (Parser::*next)())
  {
    int line = peek().line;
    Expr first = (this->*next)();
    if (!is_kw(kw))
      return first;
    Expr e;
    e.kind = ExprKind::BoolOp;
    e.bool_op = kind;
    e.line = line;
    e.children.push_back(std::move(first));
    while (is_kw(kw)) {
      advance();
      e.children.push_back((this->*next)());
    }
    return e;
  }

  Expr or_test() { return bool_chain(BoolOpKind::Or, "or", &Parser::and_test); }
  Expr and_test() { return bool_chain(BoolOpKind::And, "and", &Parser::not_test); }

  Expr not_test()
  {
    if (!is_kw("not"))
      return comparison();
    int line = advance().line;
    Expr e;
    e.kind = ExprKind::Unary;
    e.unary_op = UnaryOp::Not;
    e.line = line;
    e.children.push_back(not_test());
    return e;
  }

  std::optional<CmpOp> comparison_operator()
  {
    int line = peek().line;
    if (is_kw("in") || (is_kw("not") && is_kw("in", 1)))
      unsupported("membership", line);
    if (is_kw("is"))
      unsupported("identity-comparison", line);
    if (peek().kind != Tok::Op)
      return std::nullopt;
    const std::string &s = peek().text;
    if (s == "<")
      return CmpOp::Lt;
    if (s == "<=")
      return CmpOp::Le;
    if (s == ">")
      return CmpOp::Gt;
    if (s == ">=")
      return CmpOp::Ge;
    if (s == "==")
      return CmpOp::Eq;
    if (s == "!=")
      return CmpOp::Ne;
    return std::nullopt;
  }

  Expr comparison()
  {
    int line = peek().line;
    Expr first = bitwise();
    auto op = comparison_operator();
    if (!op)
      return first;
    Expr e;
    e.kind = ExprKind::Compare;
    e.line = line;
    e.children.push_back(std::move(first));
    while (op) {
      advance();
      e.cmp_ops.push_back(*op);
      e.children.push_back(bitwise());
      op = comparison_operator();
    }
    return e;
  }

  Expr bitwise()
  {
    Expr e = arith();
    for (auto sym : {"|", "^", "&", "<<", ">>"})
      if (is_op(sym))
        unsupported("bitwise", peek().line);
    return e;
  }

  Expr arith()
  {
    Expr e = term();
    while (is_op("+") || is_op("-")) {
      const Token &t = advance();
      e = binary(t.text == "+" ? BinaryOp::Add : BinaryOp::Sub, std::move(e), term(), t.line);
    }
    return e;
  }

  Expr term()
  {
    Expr e = factor();
    for (;;) {
      BinaryOp op;
      if (is_op("*"))
        op = BinaryOp::Mul;
      else if (is_op("/"))
        op = BinaryOp::Div;
      else if (is_op("//"))
        op = BinaryOp::FloorDiv;
      else if (is_op("%"))
        op = BinaryOp::Mod;
      else if (is_op("@"))
        unsupported("matrix-multiplication", peek().line);
      else
        return e;
      int line = advance().line;
      e = binary(op, std::move(e), factor(), line);
    }
  }

  Expr factor()
  {
    if (is_op("-") || is_op("+")) {
      const Token &t = advance();
      Expr e;
      e.kind = ExprKind::Unary;
      e.unary_op = t.text == "-" ? UnaryOp::Neg : UnaryOp::Pos;
      e.line = t.line;
      e.children.push_back(factor());
      return e;
    }
    if (is_op("~"))
      unsupported("bitwise", peek().line);
    return power();
  }

  Expr power()
  {
    if (is_kw("await"))
      unsupported("async", peek().line);
    Expr base = atom_with_trailers();
    if (!is_op("**"))
      return base;
    int line = advance().line;
    Expr exponent = factor();
    if (exponent.kind != ExprKind::IntLit || exponent.int_value > 16)
      unsupported("power", line);
    return binary(BinaryOp::Pow, std::move(base), std::move(exponent), line);
  }

  Expr atom_with_trailers()
  {
    Expr e = atom();
    for (;;) {
      int line = peek().line;
      if (is_op("."))
        unsupported("attribute", line);
      if (is_op("["))
        unsupported("subscript", line);
      if (!is_op("("))
        return e;
      if (e.kind != ExprKind::Name)
        unsupported("indirect-call", line);
      e = call(std::move(e));
    }
  }

  Expr call(Expr callee)
  {
    int line = advance().line;
    const std::string &fname = callee.name;
    if (fname != "abs" && fname != "min" && fname != "max")
      unsupported("call:" + fname, line);
    Expr e;
    e.kind = ExprKind::Call;
    e.name = fname;
    e.line = callee.line;
    while (!is_op(")")) {
      if (is_op("*") || is_op("**"))
        unsupported("varargs", peek().line);
      if (at(Tok::Name) && is_op("=", 1))
        unsupported("keyword-argument", peek().line);
      e.children.push_back(expression());
      if (is_kw("for"))
        unsupported("comprehension", peek().line);
      if (!is_op(","))
        break;
      advance();
    }
    expect_op(")");
    if (fname == "abs" && e.children.size() != 1)
      throw ParseError("abs() takes exactly one argument", line);
    if (fname != "abs" && e.children.size() < 2)
      throw ParseError(fname + "() needs at least two arguments in this subset", line);
    return e;
  }

  Expr atom()
  {
    const Token &t = peek();
    Expr e;
    e.line = t.line;
    switch (t.kind) {
    case Tok::Int:
      advance();
      e.kind = ExprKind::IntLit;
      e.int_value = detail::parse_int_literal(t.text, t.line);
      return e;
    case Tok::Float:
      advance();
      e.kind = ExprKind::RealLit;
      e.real_value = detail::parse_float_literal(t.text);
      return e;
    case Tok::Imaginary: unsupported("complex", t.line);
    case Tok::String: unsupported("string", t.line);
    case Tok::Name:
      if (t.text == "True" || t.text == "False") {
        advance();
        e.kind = ExprKind::BoolLit;
        e.bool_value = t.text == "True";
        return e;
      }
      if (t.text == "None")
        unsupported("none", t.line);
      if (t.text == "lambda")
        unsupported("lambda", t.line);
      if (is_keyword(t.text))
        throw ParseError("unexpected keyword '" + t.text + "'", t.line);
      advance();
      e.kind = ExprKind::Name;
      e.name = t.text;
      return e;
    case Tok::Op:
      if (t.text == "(") {
        advance();
        if (is_op(")"))
          unsupported("tuple", t.line);
        Expr inner = expression();
        if (is_op(","))
          unsupported("tuple", t.line);
        if (is_kw("for"))
          unsupported("generator", t.line);
        expect_op(")");
        return inner;
      }
      if (t.text == "[")
        unsupported("list", t.line);
      if (t.text == "{")
        unsupported(brace_kind(), t.line);
      if (t.text == "...")
        unsupported("ellipsis", t.line);
      break;
    default: break;
    }
    throw ParseError("unexpected '" + describe(t) + "'", t.line);
  }

  // Distinguishes {} / {k: v} (dict) from {a, b} (set) without parsing the contents.
  std::string brace_kind() const
  {
    if (is_op("}", 1))
      return "dict";
    int depth = 0;
    for (size_t i = pos_; i < toks_.size(); ++i) {
      const Token &t = toks_[i];
      if (t.kind != Tok::Op)
        continue;
      if (t.text == "(" || t.text == "[" || t.text == "{")
        depth++;
      else if (t.text == ")" || t.text == "]" || t.text == "}") {
        if (--depth == 0)
          break;
      } else if (t.text == ":" && depth == 1)
        return "dict";
    }
    return "set";
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
};

inline Expr parse_expression(std::string_view text)
{
  return Parser{tokenize(text)}.parse_standalone_expression();
}

} // namespace guard::code

#endif // GUARD_CODE_PARSER_HPP
