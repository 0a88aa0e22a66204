#ifndef GUARD_CODE_VERIFY_HPP
#define GUARD_CODE_VERIFY_HPP

#include <sstream>
#include <string>
#include <vector>

#include "guard/code/ssa.hpp"
#include "guard/smt/eval.hpp"
#include "guard/smt/solver.hpp"
#include "guard/verdict.hpp"

namespace guard::code {

struct Clause {
  std::string text; // the expression as written
  Expr expr;
  int line = 0;
};

struct FunctionSpec {
  std::vector<Clause> preconditions;
  std::vector<Clause> postconditions;
};

inline constexpr const char *result_name = "result";

// Contract text: one `requires: <expr>` or `ensures: <expr>` per line;
// blank lines and `#` comments are skipped.
inline FunctionSpec parse_spec(std::string_view text)
{
  FunctionSpec spec;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    line++;
    auto first = raw.find_first_not_of(" \t\r");
    if (first == std::string::npos || raw[first] == '#')
      continue;
    std::string body = raw.substr(first);
    while (!body.empty() && (body.back() == '\r' || body.back() == ' ' || body.back() == '\t'))
      body.pop_back();
    std::vector<Clause> *dest = nullptr;
    std::string rest;
    for (auto [kw, d] : {std::pair{"requires:", &spec.preconditions}, std::pair{"ensures:", &spec.postconditions}}) {
      std::string k = kw;
      if (body.compare(0, k.size(), k) == 0) {
        dest = d;
        rest = body.substr(k.size());
      }
    }
    if (!dest)
      throw ParseError("expected 'requires:' or 'ensures:'", line);
    auto s = rest.find_first_not_of(" \t");
    if (s == std::string::npos)
      throw ParseError("empty contract clause", line);
    rest = rest.substr(s);
    Clause c;
    c.text = rest;
    c.line = line;
    try {
      c.expr = parse_expression(rest);
    } catch (const UnsupportedConstruct &u) {
      throw ParseError("unsupported construct in contract clause: " + u.feature().feature, line);
    } catch (const ParseError &e) {
      throw ParseError(e.detail(), line);
    }
    dest->push_back(std::move(c));
  }
  return spec;
}

struct ContractTerms {
  std::vector<smt::Term> preconditions;
  std::vector<smt::Term> postconditions;
};

// Translates the contract against the function's parameters; `result`
// is bound to `result_term` in ensures clauses only.
inline ContractTerms translate_spec(const FunctionUnit &fn, const FunctionSpec &spec,
                                    const smt::Term &result_term)
{
  Bindings names;
  for (auto &p : fn.params)
    names[p.name] = smt::var(p.name, p.sort);
  if (names.count(result_name))
    throw ParseError(std::string("parameter may not be named '") + result_name + "'", fn.line);
  auto one = [](const Clause &c, const Bindings &b) {
    try {
      return detail::truthy(translate_expression(c.expr, b));
    } catch (const UnsupportedConstruct &u) {
      throw ParseError("unsupported construct in contract clause: " + u.feature().feature, c.line);
    } catch (const ParseError &e) {
      throw ParseError("contract: " + e.detail(), c.line);
    }
  };
  ContractTerms out;
  for (auto &c : spec.preconditions)
    out.preconditions.push_back(one(c, names));
  names[result_name] = result_term;
  for (auto &c : spec.postconditions)
    out.postconditions.push_back(one(c, names));
  return out;
}

struct CodeReport {
  Verdict verdict;
  std::vector<ObligationRecord> obligations;
  SsaResult ssa;
};

namespace detail {

inline std::string inputs_text(const smt::Model &m, const std::vector<smt::Term> &params)
{
  std::string out;
  for (auto &p : params) {
    if (!out.empty())
      out += ", ";
    const smt::Value *v = m.find(p.name());
    out += p.name() + " = " + (v ? v->to_string() : "?");
  }
  return out;
}

} // namespace detail

// Proves every division obligation, then every ensures clause, each under
// the conjoined requires. The first refuted obligation decides the verdict.
inline CodeReport verify_code(const FunctionUnit &fn, const FunctionSpec &spec,
                              int timeout_ms = smt::default_timeout_ms,
                              const smt::Solver &solver = smt::Solver{})
{
  CodeReport rep{Verified{}, {}, ssa_translate(fn)};
  const SsaResult &ssa = rep.ssa;
  ContractTerms contract = translate_spec(fn, spec, ssa.result);

  struct Goal {
    std::string label;
    smt::Term property;
    bool is_division;
  };
  std::vector<Goal> goals;
  for (auto &o : ssa.obligations)
    goals.push_back({o.label, o.condition, true});
  for (size_t i = 0; i < spec.postconditions.size(); ++i)
    goals.push_back({"ensures: " + spec.postconditions[i].text, contract.postconditions[i], false});

  int per = obligation_timeout(timeout_ms, goals.size());
  std::optional<Unknown> stalled;
  for (auto &g : goals) {
    auto r = solver.prove(ssa.params, contract.preconditions, g.property, per);
    if (r.proven()) {
      rep.obligations.push_back({g.label, Status::Verified, r.elapsed_ms});
      continue;
    }
    if (r.unknown()) {
      rep.obligations.push_back({g.label, Status::Unknown, r.elapsed_ms});
      if (!stalled)
        stalled = Unknown{g.label, r.reason()};
      continue;
    }
    rep.obligations.push_back({g.label, Status::Unsafe, r.elapsed_ms});
    smt::Model model = r.model();
    std::string witness = detail::inputs_text(model, ssa.params);
    if (g.is_division) {
      witness += " reaches " + g.label;
    } else {
      try {
        smt::Value res = smt::evaluate(ssa.result, model);
        model.set(result_name, res);
        witness += " gives result = " + res.to_string();
      } catch (const smt::EvalError &) {
      }
      witness += ", violating " + g.label;
    }
    rep.verdict = Unsafe{g.label, std::move(model), std::move(witness)};
    return rep;
  }
  if (stalled)
    rep.verdict = *stalled;
  return rep;
}

} // namespace guard::code

#endif // GUARD_CODE_VERIFY_HPP
