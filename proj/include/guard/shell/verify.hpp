#ifndef GUARD_SHELL_VERIFY_HPP
#define GUARD_SHELL_VERIFY_HPP

#include <optional>
#include <string>
#include <vector>

#include "guard/shell/patterns.hpp"
#include "guard/smt/solver.hpp"
#include "guard/verdict.hpp"

namespace guard::shell {

struct CategoryMatch {
  int id = 0;
  std::string name;
  bool matched = false;
  std::optional<std::string> regex; // first matching regex source
  std::optional<std::pair<size_t, size_t>> span; // byte offset, length
  std::string text;                 // the matched slice
};

struct CommandReport {
  std::string command;
  std::vector<CategoryMatch> matches; // one per category, in id order
  Verdict verdict;
  std::vector<ObligationRecord> obligations;

  bool any_matched() const
  {
    for (auto &m : matches)
      if (m.matched)
        return true;
    return false;
  }
};

inline std::string category_var(int id) { return "p" + std::to_string(id); }

// Concrete regex evaluation against the raw command string.
inline std::vector<CategoryMatch> analyze_command(const std::string &command)
{
  if (command.find_first_not_of(" \t\r\n") == std::string::npos)
    throw ParseError("empty command");
  std::vector<CategoryMatch> out;
  for (auto &cat : categories()) {
    CategoryMatch m;
    m.id = cat.id;
    m.name = cat.name;
    for (auto &r : cat.regexes) {
      std::smatch sm;
      if (std::regex_search(command, sm, r.re)) {
        m.matched = true;
        m.regex = r.source;
        m.span = {static_cast<size_t>(sm.position(0)), static_cast<size_t>(sm.length(0))};
        m.text = sm.str(0);
        break;
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

inline constexpr const char *command_obligation = "no dangerous pattern matches";

// Pins p1..p10 to the concrete match results and proves the conjunction of
// their negations.
inline CommandReport verify_command(const std::string &command,
                                    int timeout_ms = smt::default_timeout_ms,
                                    const smt::Solver &solver = smt::Solver{})
{
  CommandReport rep{command, analyze_command(command), Verified{}, {}};
  std::vector<smt::Term> decls, pins, negated;
  for (auto &m : rep.matches) {
    auto p = smt::var(category_var(m.id), smt::Sort::boolean());
    decls.push_back(p);
    pins.push_back(smt::eq(p, smt::bool_lit(m.matched)));
    negated.push_back(smt::not_(p));
  }
  auto r = solver.prove(decls, pins, smt::and_(negated), timeout_ms);
  Status st = r.proven() ? Status::Verified : r.refuted() ? Status::Unsafe : Status::Unknown;
  rep.obligations.push_back({command_obligation, st, r.elapsed_ms});
  if (r.refuted()) {
    std::string witness;
    for (auto &m : rep.matches) {
      auto v = r.model().find(category_var(m.id));
      if (!v || !v->is_bool() || !v->as_bool())
        continue;
      witness += (witness.empty() ? "" : "; ") + category_var(m.id) + " (" + m.name + ") matches "
               + smt::quote_string(m.text);
    }
    rep.verdict = Unsafe{command_obligation, r.model(), witness};
  } else if (r.unknown()) {
    rep.verdict = Unknown{command_obligation, r.reason()};
  }
  return rep;
}

// Rows of the embedded table for --dump-patterns.
inline std::string dump_patterns()
{
  std::string out;
  for (auto &c : categories()) {
    out += std::to_string(c.id) + "\t" + c.name + "\n";
    for (auto &r : c.regexes)
      out += "\t" + r.source + "\n";
  }
  return out;
}

} // namespace guard::shell

#endif // GUARD_SHELL_VERIFY_HPP
