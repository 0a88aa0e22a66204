#ifndef GUARD_TOOL_DEFINITION_HPP
#define GUARD_TOOL_DEFINITION_HPP

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "guard/error.hpp"
#include "guard/smt/eval.hpp"
#include "guard/smt/term.hpp"

namespace guard::tool {

struct EnumParam {
  std::vector<std::string> values;
};

struct IntRangeParam {
  std::optional<long long> lo;
  std::optional<long long> hi;
};

struct StringParam {
  std::optional<long long> max_len;
  std::optional<smt::CharSet> charset;
  std::string charset_text; // as written in the definition
};

struct Param {
  std::string name;
  std::variant<EnumParam, IntRangeParam, StringParam> kind;

  bool is_enum() const { return std::holds_alternative<EnumParam>(kind); }
  bool is_int() const { return std::holds_alternative<IntRangeParam>(kind); }
  bool is_string() const { return std::holds_alternative<StringParam>(kind); }
};

enum class PatternKind { Contains, Equals, Prefix };

inline const char *pattern_kind_name(PatternKind k)
{
  switch (k) {
  case PatternKind::Contains: return "contains";
  case PatternKind::Equals: return "equals";
  case PatternKind::Prefix: return "prefix";
  }
  return "?";
}

inline constexpr const char *template_target = "template";

struct ForbiddenPattern {
  PatternKind kind;
  std::string value;
  std::string applies_to = template_target;

  // Plain string semantics, used for concrete replay.
  bool matches(const std::string &s) const
  {
    switch (kind) {
    case PatternKind::Contains: return s.find(value) != std::string::npos;
    case PatternKind::Equals: return s == value;
    case PatternKind::Prefix: return s.rfind(value, 0) == 0;
    }
    return false;
  }

  std::string label() const
  {
    return std::string(pattern_kind_name(kind)) + " " + smt::quote_string(value) + " in "
         + applies_to;
  }
};

// One piece of an invocation template: literal text or a `{param}` slot.
struct TemplatePart {
  bool is_placeholder;
  std::string text;
};

struct ToolDefinition {
  std::string name;
  std::vector<Param> params;
  std::optional<std::string> invocation; // the template text
  std::vector<TemplatePart> parts;
  std::vector<ForbiddenPattern> forbidden;

  const Param *param(const std::string &n) const
  {
    for (auto &p : params)
      if (p.name == n)
        return &p;
    return nullptr;
  }
};

// `{name}` marks a placeholder; `{{` and `}}` are literal braces.
inline std::vector<TemplatePart> split_template(const std::string &t)
{
  std::vector<TemplatePart> parts;
  std::string lit;
  for (size_t i = 0; i < t.size(); ++i) {
    char c = t[i];
    if ((c == '{' || c == '}') && i + 1 < t.size() && t[i + 1] == c) {
      lit += c;
      i++;
      continue;
    }
    if (c == '}')
      throw ParseError("template: unmatched '}'");
    if (c != '{') {
      lit += c;
      continue;
    }
    auto close = t.find('}', i);
    if (close == std::string::npos)
      throw ParseError("template: unterminated placeholder");
    if (!lit.empty())
      parts.push_back({false, lit});
    lit.clear();
    std::string name = t.substr(i + 1, close - i - 1);
    if (name.empty())
      throw ParseError("template: empty placeholder");
    parts.push_back({true, name});
    i = close;
  }
  if (!lit.empty())
    parts.push_back({false, lit});
  return parts;
}

// Character class text such as "[a-z0-9_ ]" (brackets optional).
inline smt::CharSet parse_charset(const std::string &text)
{
  std::u32string s = smt::decode_utf8(text);
  if (s.size() >= 2 && s.front() == U'[' && s.back() == U']')
    s = s.substr(1, s.size() - 2);
  if (!s.empty() && s.front() == U'^')
    throw ParseError("charset: negated classes are not supported");
  std::vector<char32_t> chars;
  std::vector<bool> escaped;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == U'\\' && i + 1 < s.size()) {
      char32_t e = s[++i];
      chars.push_back(e == U'n' ? U'\n' : e == U't' ? U'\t' : e);
      escaped.push_back(true);
    } else {
      chars.push_back(s[i]);
      escaped.push_back(false);
    }
  }
  smt::CharSet out;
  for (size_t i = 0; i < chars.size(); ++i) {
    if (i + 2 < chars.size() && chars[i + 1] == U'-' && !escaped[i + 1]) {
      if (chars[i] > chars[i + 2])
        throw ParseError("charset: inverted range");
      out.push_back({chars[i], chars[i + 2]});
      i += 2;
    } else {
      out.push_back({chars[i], chars[i]});
    }
  }
  if (out.empty())
    throw ParseError("charset: empty character class");
  return out;
}

namespace detail {

inline const nlohmann::json &field(const nlohmann::json &j, const char *key, const std::string &where)
{
  if (!j.is_object() || !j.contains(key))
    throw ParseError(where + ": missing '" + key + "'");
  return j.at(key);
}

inline std::string string_field(const nlohmann::json &j, const char *key, const std::string &where)
{
  const auto &v = field(j, key, where);
  if (!v.is_string())
    throw ParseError(where + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

inline std::optional<long long> int_field(const nlohmann::json &j, const char *key,
                                          const std::string &where)
{
  if (!j.contains(key) || j.at(key).is_null())
    return std::nullopt;
  if (!j.at(key).is_number_integer())
    throw ParseError(where + ": '" + key + "' must be an integer");
  return j.at(key).get<long long>();
}

inline Param parse_param(const nlohmann::json &j, size_t index)
{
  std::string where = "params[" + std::to_string(index) + "]";
  Param p;
  p.name = string_field(j, "name", where);
  bool ident = !p.name.empty() && !std::isdigit(static_cast<unsigned char>(p.name[0]));
  for (char c : p.name)
    ident = ident && (std::isalnum(static_cast<unsigned char>(c)) || c == '_');
  if (!ident)
    throw ParseError(where + ": parameter name '" + p.name + "' is not an identifier");
  where += " '" + p.name + "'";
  std::string kind = string_field(j, "kind", where);
  if (kind == "enum") {
    const auto &vals = field(j, "values", where);
    if (!vals.is_array() || vals.empty())
      throw ParseError(where + ": enum needs a nonempty 'values' list");
    EnumParam e;
    std::set<std::string> seen;
    for (auto &v : vals) {
      if (!v.is_string())
        throw ParseError(where + ": enum values must be strings");
      if (!seen.insert(v.get<std::string>()).second)
        throw ParseError(where + ": duplicate enum value '" + v.get<std::string>() + "'");
      e.values.push_back(v.get<std::string>());
    }
    p.kind = std::move(e);
  } else if (kind == "int") {
    IntRangeParam r{int_field(j, "lo", where), int_field(j, "hi", where)};
    if (r.lo && r.hi && *r.lo > *r.hi)
      throw ParseError(where + ": empty integer range");
    p.kind = r;
  } else if (kind == "string") {
    StringParam s;
    s.max_len = int_field(j, "max_len", where);
    if (s.max_len && *s.max_len < 0)
      throw ParseError(where + ": negative max_len");
    if (j.contains("charset") && !j.at("charset").is_null()) {
      s.charset_text = string_field(j, "charset", where);
      try {
        s.charset = parse_charset(s.charset_text);
      } catch (const ParseError &e) {
        throw ParseError(where + ": " + e.what());
      }
    }
    p.kind = std::move(s);
  } else {
    throw ParseError(where + ": unknown kind '" + kind + "' (expected enum, int or string)");
  }
  return p;
}

} // namespace detail

// Reads and validates a JSON tool definition.
inline ToolDefinition parse_tool_definition(const std::string &text)
{
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object())
    throw ParseError("tool definition must be a JSON object");
  ToolDefinition def;
  def.name = detail::string_field(j, "name", "tool");
  if (j.contains("template") && !j.at("template").is_null())
    def.invocation = detail::string_field(j, "template", "tool");
  if (j.contains("params")) {
    if (!j.at("params").is_array())
      throw ParseError("tool: 'params' must be a list");
    std::set<std::string> names;
    for (size_t i = 0; i < j.at("params").size(); ++i) {
      Param p = detail::parse_param(j.at("params")[i], i);
      if (!names.insert(p.name).second)
        throw ParseError("duplicate parameter '" + p.name + "'");
      def.params.push_back(std::move(p));
    }
  }
  if (def.invocation) {
    def.parts = split_template(*def.invocation);
    for (auto &part : def.parts)
      if (part.is_placeholder && !def.param(part.text))
        throw ParseError("template placeholder '{" + part.text + "}' names no parameter");
  }
  if (j.contains("forbidden")) {
    if (!j.at("forbidden").is_array())
      throw ParseError("tool: 'forbidden' must be a list");
    for (size_t i = 0; i < j.at("forbidden").size(); ++i) {
      const auto &f = j.at("forbidden")[i];
      std::string where = "forbidden[" + std::to_string(i) + "]";
      ForbiddenPattern fp;
      std::string kind = detail::string_field(f, "kind", where);
      if (kind == "contains")
        fp.kind = PatternKind::Contains;
      else if (kind == "equals")
        fp.kind = PatternKind::Equals;
      else if (kind == "prefix")
        fp.kind = PatternKind::Prefix;
      else
        throw ParseError(where + ": unknown kind '" + kind + "'");
      fp.value = detail::string_field(f, "value", where);
      if (fp.value.empty())
        throw ParseError(where + ": empty pattern");
      if (f.contains("applies_to"))
        fp.applies_to = detail::string_field(f, "applies_to", where);
      if (fp.applies_to == template_target) {
        if (!def.invocation)
          throw ParseError(where + ": applies to the template but the tool has none");
      } else {
        const Param *p = def.param(fp.applies_to);
        if (!p)
          throw ParseError(where + ": applies to unknown parameter '" + fp.applies_to + "'");
        if (p->is_int())
          throw ParseError(where + ": applies to integer parameter '" + fp.applies_to
                           + "'; patterns need a string-valued target");
      }
      def.forbidden.push_back(std::move(fp));
    }
  }
  return def;
}

} // namespace guard::tool

#endif // GUARD_TOOL_DEFINITION_HPP
