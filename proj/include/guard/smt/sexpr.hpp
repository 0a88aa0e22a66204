#ifndef GUARD_SMT_SEXPR_HPP
#define GUARD_SMT_SEXPR_HPP

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "guard/error.hpp"

namespace guard::smt {

// Minimal SMT-LIB s-expression, enough to read solver replies.
struct SExpr {
  enum class Kind { Symbol, Keyword, Numeral, Decimal, Hex, Binary, String, List };

  Kind kind = Kind::List;
  std::string text; // atom text; string literals already unescaped at the lexical level ("" -> ")
  std::vector<SExpr> items;

  bool is_list() const { return kind == Kind::List; }
  bool is_atom() const { return kind != Kind::List; }
  bool is_symbol(std::string_view s) const { return kind == Kind::Symbol && text == s; }
  size_t size() const { return items.size(); }
  const SExpr &operator[](size_t i) const { return items.at(i); }

  std::string str() const
  {
    switch (kind) {
    case Kind::List: {
      std::string out = "(";
      for (size_t i = 0; i < items.size(); i++)
        out += (i ? " " : "") + items[i].str();
      return out + ")";
    }
    case Kind::String: {
      std::string out = "\"";
      for (char c : text)
        out += c == '"' ? std::string("\"\"") : std::string(1, c);
      return out + "\"";
    }
    default: return text;
    }
  }
};

class SExprReader {
public:
  explicit SExprReader(std::string_view text)
    : text_{text}
  {}

  bool at_end()
  {
    skip_space();
    return pos_ >= text_.size();
  }

  SExpr read()
  {
    skip_space();
    if (pos_ >= text_.size())
      fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      pos_++;
      SExpr list;
      for (;;) {
        skip_space();
        if (pos_ >= text_.size())
          fail("unterminated list");
        if (text_[pos_] == ')') {
          pos_++;
          return list;
        }
        list.items.push_back(read());
      }
    }
    if (c == ')')
      fail("unexpected ')'");
    if (c == '"')
      return read_string();
    if (c == '|') {
      size_t end = text_.find('|', pos_ + 1);
      if (end == std::string_view::npos)
        fail("unterminated quoted symbol");
      SExpr s{SExpr::Kind::Symbol, std::string(text_.substr(pos_ + 1, end - pos_ - 1)), {}};
      pos_ = end + 1;
      return s;
    }
    size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))
           && text_[pos_] != '(' && text_[pos_] != ')' && text_[pos_] != '"')
      pos_++;
    std::string atom(text_.substr(start, pos_ - start));
    return SExpr{classify(atom), atom, {}};
  }

  std::vector<SExpr> read_all()
  {
    std::vector<SExpr> out;
    while (!at_end())
      out.push_back(read());
    return out;
  }

private:
  static SExpr::Kind classify(const std::string &a)
  {
    if (a.size() > 2 && a[0] == '#' && a[1] == 'x')
      return SExpr::Kind::Hex;
    if (a.size() > 2 && a[0] == '#' && a[1] == 'b')
      return SExpr::Kind::Binary;
    if (a[0] == ':')
      return SExpr::Kind::Keyword;
    bool digits = true, dot = false;
    for (char c : a) {
      if (c == '.' && !dot)
        dot = true;
      else if (!std::isdigit(static_cast<unsigned char>(c)))
        digits = false;
    }
    if (digits && std::isdigit(static_cast<unsigned char>(a[0])))
      return dot ? SExpr::Kind::Decimal : SExpr::Kind::Numeral;
    return SExpr::Kind::Symbol;
  }

  SExpr read_string()
  {
    std::string out;
    pos_++;
    for (;;) {
      if (pos_ >= text_.size())
        fail("unterminated string literal");
      char c = text_[pos_++];
      if (c == '"') {
        if (pos_ < text_.size() && text_[pos_] == '"') {
          out += '"';
          pos_++;
          continue;
        }
        break;
      }
      out += c;
    }
    return SExpr{SExpr::Kind::String, out, {}};
  }

  void skip_space()
  {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        pos_++;
      } else if (text_[pos_] == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n')
          pos_++;
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const std::string &msg)
  {
    throw ParseError("s-expression: " + msg + " at offset " + std::to_string(pos_));
  }

  std::string_view text_;
  size_t pos_ = 0;
};

inline SExpr parse_sexpr(std::string_view text)
{
  SExprReader r{text};
  SExpr e = r.read();
  if (!r.at_end())
    throw ParseError("s-expression: trailing input");
  return e;
}

} // namespace guard::smt

#endif // GUARD_SMT_SEXPR_HPP
