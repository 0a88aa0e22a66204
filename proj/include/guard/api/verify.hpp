#ifndef GUARD_API_VERIFY_HPP
#define GUARD_API_VERIFY_HPP

#include <chrono>
#include <optional>
#include <string>

#include "guard/api/artifact.hpp"
#include "guard/api/report.hpp"
#include "guard/code/verify.hpp"
#include "guard/distill/verify.hpp"
#include "guard/hw/verify.hpp"
#include "guard/shell/verify.hpp"
#include "guard/tool/verify.hpp"

namespace guard::api {

// Malformed artifact input, raised before any solver query. The message is
// prefixed with the artifact kind ("code: line 3: ...").
class ArtifactError : public Error {
public:
  ArtifactError(Kind kind, const std::string &msg, std::optional<int> line = std::nullopt)
    : Error(std::string(kind_name(kind)) + ": " + msg)
    , kind_{kind}
    , line_{line}
  {}

  Kind kind() const { return kind_; }
  std::optional<int> line() const { return line_; }

private:
  Kind kind_;
  std::optional<int> line_;
};

namespace detail {

inline json trace_json(const distill::TraceReport &t)
{
  json steps = json::array();
  for (auto &s : t.steps) {
    json j = {{"index", s.index}, {"status", distill::step_status_name(s.status)},
              {"downstream", s.downstream}};
    if (s.witness)
      j["witness"] = value_to_json(*s.witness);
    if (!s.reason.empty())
      j["reason"] = s.reason;
    steps.push_back(j);
  }
  return {{"steps", steps},
          {"first_invalid", t.first_invalid ? json(*t.first_invalid) : json(nullptr)}};
}

struct Outcome {
  Verdict verdict;
  std::vector<ObligationRecord> obligations;
  json details = json::object();
};

// Runs `parse`, relabelling its failures with the artifact kind.
template <class F>
auto parsed(Kind kind, F &&parse) -> decltype(parse())
{
  try {
    return parse();
  } catch (const ParseError &e) {
    throw ArtifactError(kind, e.what(), e.line());
  } catch (const SolverEnvironmentError &) {
    throw;
  } catch (const Error &e) {
    throw ArtifactError(kind, e.what());
  }
}

// A missing solver only matters once a query runs; the report still names it.
inline std::string solver_identity(const smt::Solver &solver)
{
  try {
    return solver.identity();
  } catch (const Error &) {
    return solver.path();
  }
}

class Dispatcher {
public:
  Dispatcher(int timeout_ms, const smt::Solver &solver)
    : timeout_{timeout_ms}
    , solver_{solver}
  {}

  Outcome operator()(const CodeArtifact &a) const
  {
    auto fn = parsed(Kind::Code, [&] { return code::parse_function(a.source); });
    if (auto *u = std::get_if<UnsupportedFeature>(&fn))
      return {Unsupported{u->feature, u->line}, {}, {}};
    const auto &unit = std::get<code::FunctionUnit>(fn);
    auto spec = parsed(Kind::Code, [&] {
      auto s = code::parse_spec(a.spec);
      code::translate_spec(unit, s, code::ssa_translate(unit).result);
      return s;
    });
    auto rep = code::verify_code(unit, spec, timeout_, solver_);
    json params = json::array();
    for (auto &p : unit.params)
      params.push_back(p.name);
    return {rep.verdict, rep.obligations, {{"function", unit.name}, {"params", params}}};
  }

  Outcome operator()(const ToolArtifact &a) const
  {
    auto def = parsed(Kind::Tool, [&] { return tool::parse_tool_definition(a.definition); });
    auto rep = tool::verify_tool(def, timeout_, solver_);
    json patterns = json::array();
    for (auto &p : rep.patterns) {
      json j = {{"pattern", p.pattern.label()}, {"status", status_name(p.status)}};
      if (p.status == Status::Unsafe)
        j["rendered"] = p.rendered;
      if (!p.note.empty())
        j["note"] = p.note;
      patterns.push_back(j);
    }
    json findings = json::array();
    for (auto &f : tool::explain_unverifiability(def))
      findings.push_back({{"param", f.param}, {"message", f.message}});
    return {rep.verdict, rep.obligations,
            {{"tool", def.name}, {"patterns", patterns}, {"findings", findings}}};
  }

  Outcome operator()(const TraceArtifact &a) const
  {
    auto trace = parsed(Kind::Trace, [&] { return distill::parse_trace(a.trace); });
    auto rep = distill::verify_trace(trace, timeout_, solver_);
    return {rep.verdict, rep.obligations, trace_json(rep)};
  }

  Outcome operator()(const TracePairArtifact &a) const
  {
    auto ref = parsed(Kind::TracePair, [&] { return distill::parse_trace(a.reference); });
    auto dist = parsed(Kind::TracePair, [&] { return distill::parse_trace(a.distilled); });
    if (!distill::same_equation(ref.steps[0], dist.steps[0]))
      throw ArtifactError(Kind::TracePair, "traces start from different problems: '"
                                             + ref.steps[0].text + "' vs '" + dist.steps[0].text
                                             + "'");
    auto rep = distill::compare_traces(ref, dist, timeout_, solver_);
    std::vector<ObligationRecord> obs = rep.reference.obligations;
    for (auto o : rep.distilled.obligations) {
      o.label = "distilled " + o.label;
      obs.push_back(o);
    }
    for (size_t i = 0; i < rep.reference.obligations.size(); ++i)
      obs[i].label = "reference " + obs[i].label;
    json d = {{"divergence", rep.divergence ? json(*rep.divergence) : json(nullptr)},
              {"reference", trace_json(rep.reference)},
              {"distilled", trace_json(rep.distilled)}};
    return {rep.verdict, obs, d};
  }

  Outcome operator()(const CommandArtifact &a) const
  {
    parsed(Kind::Command, [&] { return shell::analyze_command(a.text); });
    auto rep = shell::verify_command(a.text, timeout_, solver_);
    json matches = json::array();
    for (auto &m : rep.matches)
      if (m.matched)
        matches.push_back({{"id", m.id}, {"name", m.name}, {"text", m.text}, {"regex", *m.regex}});
    return {rep.verdict, rep.obligations, {{"command", a.text}, {"matches", matches}}};
  }

  Outcome operator()(const AssemblyArtifact &a) const
  {
    auto prog = parsed(Kind::Assembly, [&] { return hw::parse_asm(a.program); });
    if (auto *u = std::get_if<UnsupportedFeature>(&prog))
      return {Unsupported{u->feature, u->line}, {}, {}};
    auto props = parsed(Kind::Assembly, [&] { return hw::parse_properties(a.properties); });
    auto rep = hw::verify_program(std::get<hw::Program>(prog), props, timeout_, solver_);
    json list = json::array();
    for (auto &p : rep.properties)
      list.push_back({{"property", hw::property_label(p.property)},
                      {"status", status_name(status_of(p.verdict))}});
    return {rep.verdict, rep.obligations,
            {{"instructions", std::get<hw::Program>(prog).size()}, {"properties", list}}};
  }

  Outcome operator()(const AssemblyPairArtifact &a) const
  {
    auto first = parsed(Kind::AssemblyPair, [&] { return hw::parse_asm(a.first); });
    if (auto *u = std::get_if<UnsupportedFeature>(&first))
      return {Unsupported{u->feature, u->line}, {}, {}};
    auto second = parsed(Kind::AssemblyPair, [&] { return hw::parse_asm(a.second); });
    if (auto *u = std::get_if<UnsupportedFeature>(&second))
      return {Unsupported{u->feature, u->line}, {}, {}};
    const auto &pa = std::get<hw::Program>(first);
    const auto &pb = std::get<hw::Program>(second);
    if (hw::has_privileged(pa) || hw::has_privileged(pb))
      throw ArtifactError(Kind::AssemblyPair,
                          "equivalence is defined only for programs without ecall/ebreak");
    std::vector<unsigned> observed;
    for (auto &name : a.observe) {
      auto r = hw::parse_register(name);
      if (!r)
        throw ArtifactError(Kind::AssemblyPair, "'" + name + "' is not a register");
      observed.push_back(*r);
    }
    if (observed.empty())
      observed = hw::written_registers(pa, pb);
    if (observed.empty())
      observed = {10}; // memory-only sequences: a0 is compared alongside memory
    auto rep = hw::check_equivalence(pa, pb, observed, timeout_, solver_);
    json regs = json::array(), diffs = json::array();
    for (unsigned r : observed)
      regs.push_back(hw::reg_name(r));
    for (auto &d : rep.diffs)
      diffs.push_back({{"reg", hw::reg_name(d.reg)}, {"first", hw::hex32(d.a)}, {"second", hw::hex32(d.b)}});
    return {rep.verdict, rep.obligations, {{"observed", regs}, {"diffs", diffs}}};
  }

private:
  int timeout_;
  const smt::Solver &solver_;
};

} // namespace detail

// Parses the artifact, runs its verifier and packages the result. Unsafe and
// Unknown are ordinary verdicts; malformed input throws ArtifactError and a
// solver that cannot run throws SolverEnvironmentError.
inline Report verify(const Artifact &artifact, int timeout_ms = smt::default_timeout_ms,
                     const smt::Solver &solver = smt::Solver{})
{
  Report r;
  r.solver = detail::solver_identity(solver);
  auto start = std::chrono::steady_clock::now();
  detail::Outcome out = std::visit(detail::Dispatcher{timeout_ms, solver}, artifact);
  r.kind = kind_of(artifact);
  r.verdict = std::move(out.verdict);
  r.obligations = std::move(out.obligations);
  r.details = out.details.is_null() ? json::object() : std::move(out.details);
  r.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

} // namespace guard::api

#endif // GUARD_API_VERIFY_HPP
