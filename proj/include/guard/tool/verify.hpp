#ifndef GUARD_TOOL_VERIFY_HPP
#define GUARD_TOOL_VERIFY_HPP

#include <map>
#include <string>
#include <vector>

#include "guard/smt/solver.hpp"
#include "guard/tool/definition.hpp"
#include "guard/verdict.hpp"

namespace guard::tool {

struct PatternResult {
  ForbiddenPattern pattern;
  Status status = Status::Verified;
  smt::Model assignment;      // Unsafe only
  std::string rendered;       // Unsafe only: the triggering target text
  std::string note;           // Unsupported / Unknown detail
  double time_ms = 0;
};

struct ToolReport {
  Verdict verdict;
  std::vector<ObligationRecord> obligations;
  std::vector<PatternResult> patterns;
};

struct Finding {
  std::string param;
  std::string message;
};

// Static check: string parameters with neither a length bound nor a charset
// can never be certified against any pattern.
inline std::vector<Finding> explain_unverifiability(const ToolDefinition &def)
{
  std::vector<Finding> out;
  for (auto &p : def.params) {
    const auto *s = std::get_if<StringParam>(&p.kind);
    if (!s || s->max_len || s->charset)
      continue;
    out.push_back({p.name, "parameter '" + p.name
                             + "' is an unconstrained string: any forbidden substring can be "
                               "supplied through it, so safety cannot be certified. Use an enum "
                               "of allowed values, or bound its length and character set."});
  }
  return out;
}

// Concrete rendering of the pattern target. Parameters absent from
// `values` fall back to a representative value.
inline std::string render_target(const ToolDefinition &def, const ForbiddenPattern &fp,
                                 const std::map<std::string, std::string> &values)
{
  auto value_of = [&](const std::string &name) -> std::string {
    if (auto it = values.find(name); it != values.end())
      return it->second;
    const Param *p = def.param(name);
    if (const auto *e = std::get_if<EnumParam>(&p->kind))
      return e->values.front();
    if (const auto *r = std::get_if<IntRangeParam>(&p->kind))
      return std::to_string(r->lo ? *r->lo : r->hi ? std::min(*r->hi, 0LL) : 0LL);
    return "";
  };
  if (fp.applies_to != template_target)
    return value_of(fp.applies_to);
  std::string out;
  for (auto &part : def.parts)
    out += part.is_placeholder ? value_of(part.text) : part.text;
  return out;
}

inline std::map<std::string, std::string> string_values(const smt::Model &m)
{
  std::map<std::string, std::string> out;
  for (auto &[k, v] : m)
    if (v.is_string())
      out[k] = v.as_string();
  return out;
}

namespace detail {

inline smt::Term pattern_predicate(const ForbiddenPattern &fp, const smt::Term &target)
{
  smt::Term needle = smt::str_lit(fp.value);
  switch (fp.kind) {
  case PatternKind::Contains: return smt::str_contains(target, needle);
  case PatternKind::Equals: return smt::eq(target, needle);
  case PatternKind::Prefix: return smt::str_prefixof(needle, target);
  }
  throw Error("unknown pattern kind");
}

// Domain constraints for a string-valued parameter variable.
inline void constrain(const Param &p, const smt::Term &v, std::vector<smt::Term> &out)
{
  if (const auto *e = std::get_if<EnumParam>(&p.kind)) {
    // The finite case split: the variable is one of the literals.
    std::vector<smt::Term> cases;
    for (auto &val : e->values)
      cases.push_back(smt::eq(v, smt::str_lit(val)));
    out.push_back(smt::or_(cases));
  } else if (const auto *s = std::get_if<StringParam>(&p.kind)) {
    if (s->max_len)
      out.push_back(smt::le(smt::str_len(v), smt::int_lit(*s->max_len)));
    if (s->charset)
      out.push_back(smt::str_in_charset(v, *s->charset));
  }
}

} // namespace detail

// Checks each forbidden pattern for a triggering parameter assignment.
inline ToolReport verify_tool(const ToolDefinition &def, int timeout_ms = smt::default_timeout_ms,
                              const smt::Solver &solver = smt::Solver{})
{
  ToolReport rep{Verified{}, {}, {}};
  int per = obligation_timeout(timeout_ms, def.forbidden.size());
  std::optional<Verdict> unsafe, unsupported, unknown;
  for (size_t i = 0; i < def.forbidden.size(); ++i) {
    const ForbiddenPattern &fp = def.forbidden[i];
    PatternResult pr;
    pr.pattern = fp;
    std::string label = "forbidden[" + std::to_string(i) + "]: " + fp.label();

    std::vector<std::string> used;
    if (fp.applies_to == template_target) {
      for (auto &part : def.parts)
        if (part.is_placeholder && std::find(used.begin(), used.end(), part.text) == used.end())
          used.push_back(part.text);
    } else {
      used.push_back(fp.applies_to);
    }
    std::string int_slot;
    for (auto &u : used)
      if (def.param(u)->is_int() && int_slot.empty())
        int_slot = u;
    if (!int_slot.empty()) {
      pr.status = Status::Unsupported;
      pr.note = "integer parameter '" + int_slot + "' rendered into the template";
      rep.obligations.push_back({label, Status::Unsupported, 0});
      rep.patterns.push_back(pr);
      if (!unsupported)
        unsupported = Unsupported{"int-in-template:" + int_slot, std::nullopt};
      continue;
    }

    std::map<std::string, smt::Term> vars;
    std::vector<smt::Term> decls, assertions;
    for (auto &u : used) {
      auto v = smt::var(u, smt::Sort::string());
      vars.emplace(u, v);
      decls.push_back(v);
      detail::constrain(*def.param(u), v, assertions);
    }
    smt::Term target;
    if (fp.applies_to == template_target) {
      std::vector<smt::Term> pieces;
      for (auto &part : def.parts)
        pieces.push_back(part.is_placeholder ? vars.at(part.text) : smt::str_lit(part.text));
      target = pieces.empty() ? smt::str_lit("") : smt::str_concat(pieces);
    } else {
      target = vars.at(fp.applies_to);
    }
    assertions.push_back(detail::pattern_predicate(fp, target));

    auto r = solver.check_sat(decls, assertions, per);
    pr.time_ms = r.elapsed_ms;
    if (r.is_unsat()) {
      pr.status = Status::Verified;
    } else if (r.is_unknown()) {
      pr.status = Status::Unknown;
      pr.note = r.reason();
      if (!unknown)
        unknown = Unknown{label, r.reason()};
    } else {
      pr.status = Status::Unsafe;
      pr.assignment = r.model();
      pr.rendered = render_target(def, fp, string_values(pr.assignment));
      if (!unsafe) {
        std::string witness = pr.assignment.to_string();
        witness += (witness.empty() ? "" : " ") + std::string("renders ")
                 + (fp.applies_to == template_target ? "invocation " : fp.applies_to + " = ")
                 + smt::quote_string(pr.rendered) + ", which " + fp.label();
        unsafe = Unsafe{label, pr.assignment, witness};
      }
    }
    rep.obligations.push_back({label, pr.status, pr.time_ms});
    rep.patterns.push_back(std::move(pr));
  }
  if (unsafe)
    rep.verdict = *unsafe;
  else if (unsupported)
    rep.verdict = *unsupported;
  else if (unknown)
    rep.verdict = *unknown;
  return rep;
}

} // namespace guard::tool

#endif // GUARD_TOOL_VERIFY_HPP
