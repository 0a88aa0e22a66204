#ifndef GUARD_BENCH_BENCH_HPP
#define GUARD_BENCH_BENCH_HPP

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

#include "guard/api/verify.hpp"

namespace guard::bench {

namespace fs = std::filesystem;
using nlohmann::json;

// Bad manifest: missing, empty, malformed or pointing at absent files.
class ManifestError : public Error {
public:
  using Error::Error;
};

inline std::string read_text(const fs::path &p)
{
  std::ifstream in(p, std::ios::binary);
  if (!in)
    throw ManifestError("cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CorpusCase {
  std::string id;
  api::Kind kind = api::Kind::Command;
  std::string category;
  Status expected = Status::Verified; // Verified or Unsafe
  std::map<std::string, fs::path> files; // role -> path, resolved against the manifest
  std::vector<std::string> observe;      // assembly-pair only
};

struct Manifest {
  fs::path path;
  std::vector<CorpusCase> cases;
};

// File roles each artifact kind needs.
inline std::vector<std::string> file_roles(api::Kind k)
{
  switch (k) {
  case api::Kind::Code: return {"source", "spec"};
  case api::Kind::Tool: return {"definition"};
  case api::Kind::Trace: return {"trace"};
  case api::Kind::TracePair: return {"reference", "distilled"};
  case api::Kind::Command: return {"command"};
  case api::Kind::Assembly: return {"program", "properties"};
  case api::Kind::AssemblyPair: return {"first", "second"};
  }
  return {};
}

inline Manifest parse_manifest(const std::string &text, const fs::path &path)
{
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ManifestError(path.string() + ": invalid JSON: " + e.what());
  }
  if (!j.is_object() || !j.contains("cases") || !j["cases"].is_array())
    throw ManifestError(path.string() + ": expected an object with a \"cases\" array");
  if (j["cases"].empty())
    throw ManifestError(path.string() + ": manifest lists no cases");
  Manifest m{path, {}};
  fs::path root = path.parent_path();
  std::map<std::string, int> seen;
  for (auto &c : j["cases"]) {
    auto where = [&](const std::string &msg) {
      std::string id = c.is_object() && c.contains("id") && c["id"].is_string() ? c["id"].get<std::string>()
                                                                                 : "?";
      return ManifestError(path.string() + ": case '" + id + "': " + msg);
    };
    auto str = [&](const char *key) {
      if (!c.is_object() || !c.contains(key) || !c[key].is_string())
        throw where(std::string("missing string field \"") + key + "\"");
      return c[key].get<std::string>();
    };
    CorpusCase cc;
    cc.id = str("id");
    if (seen[cc.id]++)
      throw where("duplicate id");
    auto kind = api::parse_kind(str("kind"));
    if (!kind)
      throw where("unknown kind '" + c["kind"].get<std::string>() + "'");
    cc.kind = *kind;
    cc.category = str("category");
    std::string exp = str("expected");
    if (exp == "verified")
      cc.expected = Status::Verified;
    else if (exp == "unsafe")
      cc.expected = Status::Unsafe;
    else
      throw where("expected must be \"verified\" or \"unsafe\", got '" + exp + "'");
    if (!c.contains("files") || !c["files"].is_object())
      throw where("missing \"files\" object");
    for (auto &role : file_roles(cc.kind)) {
      if (!c["files"].contains(role) || !c["files"][role].is_string())
        throw where("missing file role \"" + role + "\"");
      fs::path p = root / c["files"][role].get<std::string>();
      if (!fs::is_regular_file(p))
        throw where("file '" + p.string() + "' does not exist");
      cc.files[role] = p;
    }
    if (c.contains("observe")) {
      if (cc.kind != api::Kind::AssemblyPair || !c["observe"].is_array())
        throw where("\"observe\" is a register list for assembly-pair cases only");
      for (auto &r : c["observe"])
        cc.observe.push_back(r.get<std::string>());
    }
    m.cases.push_back(std::move(cc));
  }
  return m;
}

inline Manifest load_manifest(const fs::path &path)
{
  return parse_manifest(read_text(path), path);
}

inline api::Artifact load_artifact(const CorpusCase &c)
{
  auto f = [&](const char *role) { return read_text(c.files.at(role)); };
  switch (c.kind) {
  case api::Kind::Code: return api::CodeArtifact{f("source"), f("spec")};
  case api::Kind::Tool: return api::ToolArtifact{f("definition")};
  case api::Kind::Trace: return api::TraceArtifact{f("trace")};
  case api::Kind::TracePair: return api::TracePairArtifact{f("reference"), f("distilled")};
  case api::Kind::Command: {
    std::string text = f("command");
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r'))
      text.pop_back();
    return api::CommandArtifact{text};
  }
  case api::Kind::Assembly: return api::AssemblyArtifact{f("program"), f("properties")};
  case api::Kind::AssemblyPair: return api::AssemblyPairArtifact{f("first"), f("second"), c.observe};
  }
  throw Error("unreachable artifact kind");
}

struct CaseResult {
  std::string id;
  api::Kind kind = api::Kind::Command;
  std::string category;
  Status expected = Status::Verified;
  std::optional<api::Report> report; // absent when the case errored
  std::string error;
  double wall_ms = 0;

  bool correct() const { return report && status_of(report->verdict) == expected; }
  std::string outcome() const { return report ? status_name(status_of(report->verdict)) : "error"; }
  double solver_ms() const { return report ? solver_time(report->obligations) : 0; }
};

struct DomainSummary {
  std::string domain;
  size_t cases = 0, correct = 0;
  double avg_ms = 0, median_ms = 0;               // per-case wall time
  double avg_solver_ms = 0, median_solver_ms = 0; // per-case solver time

  double accuracy() const { return cases ? static_cast<double>(correct) / cases : 0; }
};

struct BenchSummary {
  std::vector<DomainSummary> domains; // in table order, only domains with cases
  size_t cases = 0, correct = 0;
  size_t false_positives = 0; // correct artifact reported unsafe
  size_t false_negatives = 0; // buggy artifact reported verified
  size_t errors = 0;          // cases that failed to parse or run
  double wall_ms = 0;
  std::vector<CaseResult> results; // manifest order

  double accuracy() const { return cases ? static_cast<double>(correct) / cases : 0; }
  bool perfect() const { return cases > 0 && correct == cases; }
};

inline constexpr const char *domain_order[] = {"code", "tool", "cli", "hw", "distill"};

inline const char *domain_title(const std::string &d)
{
  if (d == "code")
    return "Code";
  if (d == "tool")
    return "Tool API";
  if (d == "cli")
    return "CLI";
  if (d == "hw")
    return "Hardware";
  if (d == "distill")
    return "Distillation";
  return "?";
}

inline double median(std::vector<double> v)
{
  if (v.empty())
    return 0;
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

inline CaseResult run_case(const CorpusCase &c, int timeout_ms, const smt::Solver &solver)
{
  CaseResult r{c.id, c.kind, c.category, c.expected, std::nullopt, {}, 0};
  auto start = std::chrono::steady_clock::now();
  try {
    r.report = api::verify(load_artifact(c), timeout_ms, solver);
  } catch (const Error &e) {
    r.error = e.what();
  }
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

inline BenchSummary summarize(std::vector<CaseResult> results)
{
  BenchSummary s;
  for (const char *d : domain_order) {
    DomainSummary ds{d};
    std::vector<double> wall, solver;
    for (auto &r : results) {
      if (api::domain_of(r.kind) != ds.domain)
        continue;
      ds.cases++;
      ds.correct += r.correct();
      wall.push_back(r.wall_ms);
      solver.push_back(r.solver_ms());
    }
    if (!ds.cases)
      continue;
    for (double w : wall)
      ds.avg_ms += w / wall.size();
    for (double t : solver)
      ds.avg_solver_ms += t / solver.size();
    ds.median_ms = median(wall);
    ds.median_solver_ms = median(solver);
    s.domains.push_back(ds);
  }
  for (auto &r : results) {
    s.cases++;
    s.correct += r.correct();
    if (!r.report)
      s.errors++;
    else if (r.expected == Status::Verified && is_unsafe(r.report->verdict))
      s.false_positives++;
    else if (r.expected == Status::Unsafe && is_verified(r.report->verdict))
      s.false_negatives++;
  }
  s.results = std::move(results);
  return s;
}

// Runs every case, `jobs` at a time; results keep manifest order.
inline BenchSummary run_bench(const Manifest &m, int timeout_ms = smt::default_timeout_ms,
                              unsigned jobs = 1, const smt::Solver &solver = smt::Solver{})
{
  auto start = std::chrono::steady_clock::now();
  std::vector<CaseResult> results(m.cases.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i; (i = next++) < m.cases.size();)
      results[i] = run_case(m.cases[i], timeout_ms, solver);
  };
  jobs = std::clamp<unsigned>(jobs, 1, static_cast<unsigned>(m.cases.size()));
  std::vector<std::jthread> pool;
  for (unsigned k = 1; k < jobs; ++k)
    pool.emplace_back(worker);
  worker();
  pool.clear();
  BenchSummary s = summarize(std::move(results));
  s.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return s;
}

inline std::string format_ms(double ms)
{
  std::ostringstream os;
  os << std::fixed << std::setprecision(ms < 10 ? 2 : 1) << ms << "ms";
  return os.str();
}

inline std::string percent(double x)
{
  std::ostringstream os;
  os << std::fixed << std::setprecision(x == 1 ? 0 : 1) << 100 * x << "%";
  return os.str();
}

// The evaluation table plus median columns and the error counts.
inline std::string render_table(const BenchSummary &s)
{
  std::ostringstream os;
  auto row = [&](const std::string &a, const std::string &b, const std::string &c, const std::string &d,
                 const std::string &e, const std::string &f, const std::string &g) {
    os << std::left << std::setw(14) << a << std::setw(12) << b << std::setw(10) << c << std::setw(10)
       << d << std::setw(11) << e << std::setw(11) << f << g << "\n";
  };
  row("Verifier", "Test Cases", "Correct", "Accuracy", "Avg Time", "Median", "Solver avg/median");
  for (auto &d : s.domains)
    row(domain_title(d.domain), std::to_string(d.cases),
        std::to_string(d.correct) + "/" + std::to_string(d.cases), percent(d.accuracy()),
        format_ms(d.avg_ms), format_ms(d.median_ms),
        format_ms(d.avg_solver_ms) + " / " + format_ms(d.median_solver_ms));
  row("Total", std::to_string(s.cases), std::to_string(s.correct) + "/" + std::to_string(s.cases),
      percent(s.accuracy()), "", "", "");
  os << "\nfalse positives: " << s.false_positives << "  false negatives: " << s.false_negatives
     << "  errors: " << s.errors << "  wall: " << format_ms(s.wall_ms) << "\n";
  return os.str();
}

// One line per case: id, expected, outcome, time, and the error if any.
inline std::string render_log(const BenchSummary &s)
{
  std::ostringstream os;
  for (auto &r : s.results) {
    os << (r.correct() ? "ok   " : "FAIL ") << std::left << std::setw(24) << r.id << " expected "
       << std::setw(9) << status_name(r.expected) << " got " << std::setw(12) << r.outcome()
       << format_ms(r.wall_ms);
    if (!r.error.empty())
      os << "  " << r.error;
    os << "\n";
  }
  return os.str();
}

inline json to_json(const BenchSummary &s)
{
  json domains = json::array();
  for (auto &d : s.domains)
    domains.push_back({{"domain", d.domain},
                       {"cases", d.cases},
                       {"correct", d.correct},
                       {"accuracy", d.accuracy()},
                       {"avg_ms", d.avg_ms},
                       {"median_ms", d.median_ms},
                       {"avg_solver_ms", d.avg_solver_ms},
                       {"median_solver_ms", d.median_solver_ms}});
  json cases = json::array();
  for (auto &r : s.results) {
    json c = {{"id", r.id},
              {"kind", api::kind_name(r.kind)},
              {"category", r.category},
              {"expected", status_name(r.expected)},
              {"outcome", r.outcome()},
              {"correct", r.correct()},
              {"wall_ms", r.wall_ms}};
    if (r.report)
      c["report"] = api::to_json(*r.report);
    else
      c["error"] = r.error;
    cases.push_back(c);
  }
  return {{"domains", domains},
          {"cases", s.cases},
          {"correct", s.correct},
          {"accuracy", s.accuracy()},
          {"false_positives", s.false_positives},
          {"false_negatives", s.false_negatives},
          {"errors", s.errors},
          {"wall_ms", s.wall_ms},
          {"results", cases}};
}

} // namespace guard::bench

#endif // GUARD_BENCH_BENCH_HPP
