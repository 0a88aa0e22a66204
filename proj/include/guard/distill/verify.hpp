#ifndef GUARD_DISTILL_VERIFY_HPP
#define GUARD_DISTILL_VERIFY_HPP

#include <optional>
#include <string>
#include <vector>

#include "guard/distill/trace.hpp"
#include "guard/smt/solver.hpp"
#include "guard/verdict.hpp"

namespace guard::distill {

enum class StepStatus { Valid, Invalid, Tainted, Unknown };

inline const char *step_status_name(StepStatus s)
{
  switch (s) {
  case StepStatus::Valid: return "valid";
  case StepStatus::Invalid: return "invalid";
  case StepStatus::Tainted: return "tainted";
  case StepStatus::Unknown: return "unknown";
  }
  return "?";
}

struct StepCheck {
  StepStatus status = StepStatus::Valid; // Valid, Invalid or Unknown
  std::optional<smt::Value> witness;     // x, present iff Invalid
  std::string reason;                    // Unknown only
  double time_ms = 0;
};

struct StepVerdict {
  size_t index = 0;
  StepStatus status = StepStatus::Valid;
  std::optional<smt::Value> witness;
  // Set on every step after the first Invalid one, whatever its own status.
  bool downstream = false;
  std::string reason;
};

struct TraceReport {
  Verdict verdict;
  std::vector<StepVerdict> steps;
  std::vector<ObligationRecord> obligations;
  std::optional<size_t> first_invalid;
};

struct ComparisonReport {
  TraceReport reference;
  TraceReport distilled;
  std::optional<size_t> divergence;
  std::optional<size_t> distilled_first_invalid;
  Verdict verdict;
};

class ProblemMismatch : public Error {
public:
  using Error::Error;
};

inline smt::Term equation_term(const Equation &e, const smt::Term &x)
{
  return smt::eq(e.lhs.to_term(x), e.rhs.to_term(x));
}

// Exact check of an equation at a rational point.
inline bool satisfies(const Equation &e, const Rational &x)
{
  return e.lhs(x) == e.rhs(x);
}

// before ∧ ¬after over the reals: unsat means the step is a valid implication.
inline StepCheck check_step(const Equation &before, const Equation &after,
                            int timeout_ms = smt::default_timeout_ms,
                            const smt::Solver &solver = smt::Solver{})
{
  auto x = smt::var(unknown_name, smt::Sort::real());
  std::vector<smt::Term> decls{x};
  std::vector<smt::Term> assertions{equation_term(before, x), smt::not_(equation_term(after, x))};
  auto r = solver.check_sat(decls, assertions, timeout_ms);
  StepCheck out;
  out.time_ms = r.elapsed_ms;
  if (r.is_unsat()) {
    out.status = StepStatus::Valid;
  } else if (r.is_unknown()) {
    out.status = StepStatus::Unknown;
    out.reason = r.reason();
  } else {
    out.status = StepStatus::Invalid;
    const auto &m = r.model();
    out.witness = m.contains(unknown_name) ? m.at(unknown_name) : smt::Value{Rational{0}};
  }
  return out;
}

inline std::string step_label(const ReasoningTrace &t, size_t i)
{
  return "step " + std::to_string(i) + ": " + t.steps[i - 1].text + " => " + t.steps[i].text;
}

inline TraceReport verify_trace(const ReasoningTrace &trace,
                                int timeout_ms = smt::default_timeout_ms,
                                const smt::Solver &solver = smt::Solver{})
{
  if (trace.steps.empty())
    throw Error("empty trace");
  TraceReport rep{Verified{}, {}, {}, std::nullopt};
  rep.steps.push_back({0, StepStatus::Valid, std::nullopt, false, {}});
  int per = obligation_timeout(timeout_ms, std::max<size_t>(1, trace.steps.size() - 1));
  std::optional<Verdict> unknown;
  for (size_t i = 1; i < trace.steps.size(); ++i) {
    StepCheck c = check_step(trace.steps[i - 1], trace.steps[i], per, solver);
    std::string label = step_label(trace, i);
    StepVerdict v{i, c.status, c.witness, rep.first_invalid.has_value(), c.reason};
    if (v.downstream && c.status == StepStatus::Valid)
      v.status = StepStatus::Tainted;
    Status st = c.status == StepStatus::Valid     ? Status::Verified
              : c.status == StepStatus::Invalid ? Status::Unsafe
                                                : Status::Unknown;
    rep.obligations.push_back({label, st, c.time_ms});
    if (c.status == StepStatus::Invalid && !rep.first_invalid) {
      rep.first_invalid = i;
      smt::Model m;
      m.set(unknown_name, *c.witness);
      rep.verdict = Unsafe{label, m,
                           "x = " + c.witness->to_string() + " satisfies " + trace.steps[i - 1].text
                             + " but not " + trace.steps[i].text};
    }
    if (c.status == StepStatus::Unknown && !unknown)
      unknown = Unknown{label, c.reason};
    rep.steps.push_back(std::move(v));
  }
  if (!rep.first_invalid && unknown)
    rep.verdict = *unknown;
  return rep;
}

namespace detail {

inline std::string squeeze(const std::string &s)
{
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c)))
      out += c;
  return out;
}

} // namespace detail

inline bool same_equation(const Equation &a, const Equation &b)
{
  return a.lhs == b.lhs && a.rhs == b.rhs;
}

inline ComparisonReport compare_traces(const ReasoningTrace &reference,
                                       const ReasoningTrace &distilled,
                                       int timeout_ms = smt::default_timeout_ms,
                                       const smt::Solver &solver = smt::Solver{})
{
  if (reference.steps.empty() || distilled.steps.empty())
    throw Error("empty trace");
  if (!same_equation(reference.steps[0], distilled.steps[0]))
    throw ProblemMismatch("traces start from different problems: '" + reference.steps[0].text
                          + "' vs '" + distilled.steps[0].text + "'");
  ComparisonReport rep;
  rep.reference = verify_trace(reference, timeout_ms / 2, solver);
  rep.distilled = verify_trace(distilled, timeout_ms / 2, solver);
  rep.distilled_first_invalid = rep.distilled.first_invalid;

  size_t n = std::min(reference.steps.size(), distilled.steps.size());
  for (size_t i = 0; i < n && !rep.divergence; ++i)
    if (detail::squeeze(reference.steps[i].text) != detail::squeeze(distilled.steps[i].text)
        || rep.reference.steps[i].status != rep.distilled.steps[i].status)
      rep.divergence = i;
  if (!rep.divergence && reference.steps.size() != distilled.steps.size())
    rep.divergence = n;

  // The distilled trace is the one under test; an error in the reference
  // still makes the pair unusable.
  auto pick = [](const TraceReport &a, const TraceReport &b, Status s) -> const Verdict * {
    if (status_of(a.verdict) == s)
      return &a.verdict;
    if (status_of(b.verdict) == s)
      return &b.verdict;
    return nullptr;
  };
  if (auto *v = pick(rep.distilled, rep.reference, Status::Unsafe))
    rep.verdict = *v;
  else if (auto *u = pick(rep.distilled, rep.reference, Status::Unknown))
    rep.verdict = *u;
  else
    rep.verdict = Verified{};
  return rep;
}

} // namespace guard::distill

#endif // GUARD_DISTILL_VERIFY_HPP
