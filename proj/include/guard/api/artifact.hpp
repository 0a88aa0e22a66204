#ifndef GUARD_API_ARTIFACT_HPP
#define GUARD_API_ARTIFACT_HPP

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace guard::api {

// Texts are the artifact contents, not paths.
struct CodeArtifact {
  std::string source;
  std::string spec;
};

struct ToolArtifact {
  std::string definition; // JSON
};

struct TraceArtifact {
  std::string trace;
};

struct TracePairArtifact {
  std::string reference;
  std::string distilled;
};

struct CommandArtifact {
  std::string text;
};

struct AssemblyArtifact {
  std::string program;
  std::string properties;
};

// Equivalence of two sequences. An empty `observe` means every register
// either program writes.
struct AssemblyPairArtifact {
  std::string first;
  std::string second;
  std::vector<std::string> observe;
};

using Artifact = std::variant<CodeArtifact, ToolArtifact, TraceArtifact, TracePairArtifact,
                              CommandArtifact, AssemblyArtifact, AssemblyPairArtifact>;

enum class Kind { Code, Tool, Trace, TracePair, Command, Assembly, AssemblyPair };

inline Kind kind_of(const Artifact &a) { return static_cast<Kind>(a.index()); }

inline const char *kind_name(Kind k)
{
  switch (k) {
  case Kind::Code: return "code";
  case Kind::Tool: return "tool";
  case Kind::Trace: return "trace";
  case Kind::TracePair: return "trace-pair";
  case Kind::Command: return "command";
  case Kind::Assembly: return "assembly";
  case Kind::AssemblyPair: return "assembly-pair";
  }
  return "?";
}

inline constexpr Kind all_kinds[] = {Kind::Code,    Kind::Tool,     Kind::Trace,       Kind::TracePair,
                                     Kind::Command, Kind::Assembly, Kind::AssemblyPair};

inline std::optional<Kind> parse_kind(const std::string &s)
{
  for (Kind k : all_kinds)
    if (s == kind_name(k))
      return k;
  return std::nullopt;
}

// The benchmark domain an artifact kind belongs to.
inline const char *domain_of(Kind k)
{
  switch (k) {
  case Kind::Code: return "code";
  case Kind::Tool: return "tool";
  case Kind::Trace:
  case Kind::TracePair: return "distill";
  case Kind::Command: return "cli";
  case Kind::Assembly:
  case Kind::AssemblyPair: return "hw";
  }
  return "?";
}

} // namespace guard::api

#endif // GUARD_API_ARTIFACT_HPP
