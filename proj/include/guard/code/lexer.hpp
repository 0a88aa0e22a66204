#ifndef GUARD_CODE_LEXER_HPP
#define GUARD_CODE_LEXER_HPP

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "guard/error.hpp"

namespace guard::code {

enum class Tok { Name, Int, Float, Imaginary, String, Op, Newline, Indent, Dedent, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
};

// Tokenizer for the Python function subset. Produces Python-style
// NEWLINE/INDENT/DEDENT structure; bracketed continuation lines are joined.
class Lexer {
public:
  explicit Lexer(std::string_view src)
    : src_{src}
  {}

  std::vector<Token> run()
  {
    std::vector<int> indents{0};
    bool at_line_start = true;
    while (pos_ < src_.size()) {
      if (at_line_start && depth_ == 0) {
        int col = 0;
        size_t p = pos_;
        while (p < src_.size() && (src_[p] == ' ' || src_[p] == '\t' || src_[p] == '\f')) {
          col = src_[p] == '\t' ? (col / 8 + 1) * 8 : col + 1;
          p++;
        }
        // Blank and comment-only lines carry no indentation.
        if (p >= src_.size() || src_[p] == '\n' || src_[p] == '\r' || src_[p] == '#') {
          pos_ = p;
          skip_comment();
          if (pos_ < src_.size())
            newline_char();
          continue;
        }
        pos_ = p;
        if (col > indents.back()) {
          indents.push_back(col);
          emit(Tok::Indent, "");
        } else {
          while (col < indents.back()) {
            indents.pop_back();
            emit(Tok::Dedent, "");
          }
          if (col != indents.back())
            throw ParseError("unindent does not match any outer indentation level", line_);
        }
        at_line_start = false;
      }
      char c = src_[pos_];
      if (c == '\n' || c == '\r') {
        if (depth_ == 0) {
          emit_newline();
          at_line_start = true;
        }
        newline_char();
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\f') {
        pos_++;
        continue;
      }
      if (c == '#') {
        skip_comment();
        continue;
      }
      if (c == '\\' && pos_ + 1 < src_.size() && (src_[pos_ + 1] == '\n' || src_[pos_ + 1] == '\r')) {
        pos_++;
        newline_char();
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))
          || (c == '.' && pos_ + 1 < src_.size()
              && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        number();
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_'
          || static_cast<unsigned char>(c) >= 0x80) {
        size_t start = pos_;
        while (pos_ < src_.size()
               && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'
                   || static_cast<unsigned char>(src_[pos_]) >= 0x80))
          pos_++;
        std::string word(src_.substr(start, pos_ - start));
        if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'') && is_string_prefix(word)) {
          string_literal();
          continue;
        }
        emit(Tok::Name, word);
        continue;
      }
      if (c == '"' || c == '\'') {
        string_literal();
        continue;
      }
      op();
    }
    if (!toks_.empty() && toks_.back().kind != Tok::Newline && toks_.back().kind != Tok::Dedent
        && toks_.back().kind != Tok::Indent)
      emit_newline();
    if (depth_ > 0)
      throw ParseError("unclosed bracket at end of input", line_);
    while (indents.size() > 1) {
      indents.pop_back();
      emit(Tok::Dedent, "");
    }
    emit(Tok::End, "");
    return toks_;
  }

private:
  static bool is_string_prefix(const std::string &w)
  {
    std::string l;
    for (char ch : w)
      l += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return l == "r" || l == "b" || l == "f" || l == "u" || l == "rb" || l == "br" || l == "fr"
      || l == "rf";
  }

  void emit(Tok k, std::string text) { toks_.push_back({k, std::move(text), line_}); }

  void emit_newline()
  {
    if (!toks_.empty() && toks_.back().kind != Tok::Newline)
      emit(Tok::Newline, "");
  }

  void newline_char()
  {
    if (src_[pos_] == '\r' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n')
      pos_++;
    pos_++;
    line_++;
  }

  void skip_comment()
  {
    if (pos_ < src_.size() && src_[pos_] == '#')
      while (pos_ < src_.size() && src_[pos_] != '\n' && src_[pos_] != '\r')
        pos_++;
  }

  void number()
  {
    size_t start = pos_;
    bool is_float = false;
    auto digits = [&] {
      while (pos_ < src_.size()
             && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        pos_++;
    };
    if (src_[pos_] == '0' && pos_ + 1 < src_.size()
        && std::string_view("xXoObB").find(src_[pos_ + 1]) != std::string_view::npos) {
      pos_ += 2;
      digits();
    } else {
      while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        pos_++;
      if (pos_ < src_.size() && src_[pos_] == '.') {
        is_float = true;
        pos_++;
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
          pos_++;
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        size_t save = pos_;
        pos_++;
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
          pos_++;
        if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          is_float = true;
          while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
            pos_++;
        } else {
          pos_ = save;
        }
      }
      if (pos_ < src_.size() && (src_[pos_] == 'j' || src_[pos_] == 'J')) {
        pos_++;
        emit(Tok::Imaginary, std::string(src_.substr(start, pos_ - start)));
        return;
      }
      if (pos_ < src_.size() && (std::isalpha(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        throw ParseError("invalid numeric literal", line_);
    }
    emit(is_float ? Tok::Float : Tok::Int, std::string(src_.substr(start, pos_ - start)));
  }

  void string_literal()
  {
    char q = src_[pos_];
    bool triple = src_.substr(pos_, 3) == std::string(3, q);
    int start_line = line_;
    pos_ += triple ? 3 : 1;
    for (;;) {
      if (pos_ >= src_.size())
        throw ParseError("unterminated string literal", start_line);
      char c = src_[pos_];
      if (c == '\\') {
        pos_ += 2;
        continue;
      }
      if (c == '\n') {
        if (!triple)
          throw ParseError("unterminated string literal", start_line);
        line_++;
      }
      if (c == q && (!triple || src_.substr(pos_, 3) == std::string(3, q))) {
        pos_ += triple ? 3 : 1;
        break;
      }
      pos_++;
    }
    toks_.push_back({Tok::String, "", start_line});
  }

  void op()
  {
    static const char *ops[] = {"**=", "//=", ">>=", "<<=", "...", "->", "**", "//", "==", "!=",
                                "<=", ">=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
                                ":=", "<<", ">>", "@=", "+", "-", "*", "/", "%", "<", ">",
                                "=", "(", ")", "[", "]", "{", "}", ":", ",", ".", ";", "@",
                                "&", "|", "^", "~"};
    for (const char *o : ops) {
      std::string_view sv{o};
      if (src_.substr(pos_, sv.size()) == sv) {
        if (sv == "(" || sv == "[" || sv == "{")
          depth_++;
        if ((sv == ")" || sv == "]" || sv == "}") && depth_ > 0)
          depth_--;
        pos_ += sv.size();
        emit(Tok::Op, std::string(sv));
        return;
      }
    }
    throw ParseError(std::string("unexpected character '") + src_[pos_] + "'", line_);
  }

  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1;
  int depth_ = 0;
  std::vector<Token> toks_;
};

inline std::vector<Token> tokenize(std::string_view src) { return Lexer{src}.run(); }

} // namespace guard::code

#endif // GUARD_CODE_LEXER_HPP
