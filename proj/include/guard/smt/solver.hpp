#ifndef GUARD_SMT_SOLVER_HPP
#define GUARD_SMT_SOLVER_HPP

#include <chrono>
#include <cstdlib>
#include <map>
#include <mutex>
#include <variant>

#include "guard/smt/smtlib.hpp"
#include "guard/smt/subprocess.hpp"

namespace guard::smt {

inline constexpr int default_timeout_ms = 5000;

struct Sat {
  Model model;
};
struct Unsat {};
struct Unknown {
  std::string reason;
};

struct SatResult {
  std::variant<Sat, Unsat, Unknown> outcome;
  double elapsed_ms = 0;

  bool is_sat() const { return std::holds_alternative<Sat>(outcome); }
  bool is_unsat() const { return std::holds_alternative<Unsat>(outcome); }
  bool is_unknown() const { return std::holds_alternative<Unknown>(outcome); }
  const Model &model() const { return std::get<Sat>(outcome).model; }
  const std::string &reason() const { return std::get<Unknown>(outcome).reason; }
};

struct Proven {};
struct Counterexample {
  Model model;
};

struct ProofResult {
  std::variant<Proven, Counterexample, Unknown> outcome;
  double elapsed_ms = 0;

  bool proven() const { return std::holds_alternative<Proven>(outcome); }
  bool refuted() const { return std::holds_alternative<Counterexample>(outcome); }
  bool unknown() const { return std::holds_alternative<Unknown>(outcome); }
  const Model &model() const { return std::get<Counterexample>(outcome).model; }
  const std::string &reason() const { return std::get<Unknown>(outcome).reason; }
};

inline std::string default_solver_path()
{
  const char *env = std::getenv("GUARD_SOLVER");
  return env && *env ? env : "z3";
}

// A solver session: one subprocess per query, no shared mutable state
// beyond the cached version string.
class Solver {
public:
  explicit Solver(std::string path = default_solver_path())
    : path_{std::move(path)}
  {}

  const std::string &path() const { return path_; }

  // "Z3 version 4.x.y - 64 bit" or similar; recorded in every report.
  std::string identity() const
  {
    static std::mutex mu;
    static std::map<std::string, std::string> cache;
    std::lock_guard lock{mu};
    if (auto it = cache.find(path_); it != cache.end())
      return it->second;
    auto r = run_process({path_, "--version"}, "", std::chrono::milliseconds{5000});
    std::string id = r.out;
    while (!id.empty() && (id.back() == '\n' || id.back() == '\r' || id.back() == ' '))
      id.pop_back();
    if (id.empty())
      id = path_;
    cache.emplace(path_, id);
    return id;
  }

  SatResult check_sat(std::span<const Term> declarations, std::span<const Term> assertions,
                      int timeout_ms = default_timeout_ms) const
  {
    if (timeout_ms <= 0)
      throw std::invalid_argument("timeout must be positive");
    check_declared(declarations, assertions);
    std::string script = serialize(declarations, assertions) + "(get-info :reason-unknown)\n";
    auto start = std::chrono::steady_clock::now();
    // The solver enforces the soft limit; the hard kill is a backstop.
    auto proc = run_process({path_, "-in", "-smt2", "-t:" + std::to_string(timeout_ms)}, script,
                            std::chrono::milliseconds{timeout_ms + 2000});
    double elapsed = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    if (proc.timed_out)
      return {Unknown{"timeout after " + std::to_string(timeout_ms) + " ms (killed)"}, elapsed};
    if (proc.term_signal)
      throw SolverEnvironmentError("solver '" + path_ + "' died with signal "
                                   + std::to_string(proc.term_signal));

    std::vector<SExpr> replies;
    try {
      replies = SExprReader{proc.out}.read_all();
    } catch (const ParseError &e) {
      throw ModelParseError(std::string("unreadable solver output: ") + e.what(), proc.out);
    }
    if (replies.empty())
      throw SolverEnvironmentError("solver '" + path_ + "' produced no output: " + proc.err);
    const SExpr &status = replies[0];
    if (status.is_symbol("unsat"))
      return {Unsat{}, elapsed};
    if (status.is_symbol("sat")) {
      if (replies.size() < 2)
        throw ModelParseError("missing model after sat", proc.out);
      return {Sat{parse_model(replies[1], declarations, proc.out)}, elapsed};
    }
    if (status.is_symbol("unknown")) {
      std::string reason;
      for (auto &r : replies)
        if (r.is_list() && r.size() == 2 && r[0].kind == SExpr::Kind::Keyword
            && r[0].text == ":reason-unknown")
          reason = r[1].text;
      if (reason.empty() || reason == "unknown")
        reason = elapsed >= timeout_ms ? "timeout" : "solver returned unknown";
      if (reason == "canceled" || reason == "timeout")
        reason = "timeout after " + std::to_string(timeout_ms) + " ms";
      return {Unknown{reason}, elapsed};
    }
    throw ModelParseError("unexpected solver reply: " + status.str(), proc.out);
  }

  // Proof by refutation: assumptions ∧ ¬property unsatisfiable means proven.
  ProofResult prove(std::span<const Term> declarations, std::span<const Term> assumptions,
                    const Term &property, int timeout_ms = default_timeout_ms) const
  {
    if (!property.sort().is_bool())
      throw SortError("property is not Bool-sorted");
    std::vector<Term> assertions(assumptions.begin(), assumptions.end());
    assertions.push_back(not_(property));
    SatResult r = check_sat(declarations, assertions, timeout_ms);
    if (r.is_unsat())
      return {Proven{}, r.elapsed_ms};
    if (r.is_sat())
      return {Counterexample{r.model()}, r.elapsed_ms};
    return {Unknown{r.reason()}, r.elapsed_ms};
  }

  // Convenience overload: declarations are the free variables of the query.
  ProofResult prove(std::span<const Term> assumptions, const Term &property,
                    int timeout_ms = default_timeout_ms) const
  {
    std::vector<Term> all(assumptions.begin(), assumptions.end());
    all.push_back(property);
    auto decls = free_vars(all);
    return prove(decls, assumptions, property, timeout_ms);
  }

  SatResult check_sat(std::span<const Term> assertions, int timeout_ms = default_timeout_ms) const
  {
    auto decls = free_vars(assertions);
    return check_sat(decls, assertions, timeout_ms);
  }

private:
  static void check_declared(std::span<const Term> declarations, std::span<const Term> assertions)
  {
    std::map<std::string, Sort> declared;
    for (auto &d : declarations)
      declared.emplace(d.name(), d.sort());
    for (auto &v : free_vars(assertions)) {
      auto it = declared.find(v.name());
      if (it == declared.end())
        throw std::invalid_argument("undeclared variable '" + v.name() + "'");
      if (it->second != v.sort())
        throw SortError("variable '" + v.name() + "' declared as " + it->second.name()
                        + " but used as " + v.sort().name());
    }
  }

  std::string path_;
};

} // namespace guard::smt

#endif // GUARD_SMT_SOLVER_HPP
