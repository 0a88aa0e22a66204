#ifndef GUARD_VERDICT_HPP
#define GUARD_VERDICT_HPP

#include <algorithm>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "guard/smt/value.hpp"

namespace guard {

struct Verified {
  bool operator==(const Verified &) const = default;
};

struct Unsafe {
  std::string obligation;
  smt::Model model;
  std::string witness;
  bool operator==(const Unsafe &) const = default;
};

struct Unsupported {
  std::string feature;
  std::optional<int> line;
  bool operator==(const Unsupported &) const = default;
};

struct Unknown {
  std::string obligation;
  std::string reason;
  bool operator==(const Unknown &) const = default;
};

using Verdict = std::variant<Verified, Unsafe, Unsupported, Unknown>;

enum class Status { Verified, Unsafe, Unsupported, Unknown };

inline Status status_of(const Verdict &v) { return static_cast<Status>(v.index()); }

inline const char *status_name(Status s)
{
  switch (s) {
  case Status::Verified: return "verified";
  case Status::Unsafe: return "unsafe";
  case Status::Unsupported: return "unsupported";
  case Status::Unknown: return "unknown";
  }
  return "?";
}

inline std::optional<Status> parse_status(const std::string &s)
{
  for (auto st : {Status::Verified, Status::Unsafe, Status::Unsupported, Status::Unknown})
    if (s == status_name(st))
      return st;
  return std::nullopt;
}

inline bool is_verified(const Verdict &v) { return std::holds_alternative<Verified>(v); }
inline bool is_unsafe(const Verdict &v) { return std::holds_alternative<Unsafe>(v); }

// One proof obligation as it was discharged.
struct ObligationRecord {
  std::string label;
  Status status;
  double time_ms = 0;
  bool operator==(const ObligationRecord &) const = default;
};

inline double solver_time(const std::vector<ObligationRecord> &obs)
{
  double t = 0;
  for (auto &o : obs)
    t += o.time_ms;
  return t;
}

// Splits a total budget across obligations so one stalling check cannot
// starve the rest; each obligation still gets at least 250 ms.
inline int obligation_timeout(int total_ms, size_t count)
{
  if (count == 0)
    return total_ms;
  return std::max(250, static_cast<int>(total_ms / static_cast<long>(count)));
}

} // namespace guard

#endif // GUARD_VERDICT_HPP
