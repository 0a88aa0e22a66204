#include <gtest/gtest.h>

#include <fstream>
#include <unistd.h>

#include "guard/bench/bench.hpp"
#include "support/python_oracle.hpp"
#include "support/stub_solver.hpp"

using namespace guard;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

smt::ProcessResult guard_cli(std::vector<std::string> args, const std::string &solver = "")
{
  std::vector<std::string> argv = {"/usr/bin/env"};
  if (!solver.empty())
    argv.push_back("GUARD_SOLVER=" + solver);
  argv.push_back(GUARD_CLI_PATH);
  argv.insert(argv.end(), args.begin(), args.end());
  return smt::run_process(argv, "", std::chrono::seconds{120});
}

class TempDir {
public:
  TempDir()
    : path_(fs::temp_directory_path() / ("guard-cli-" + std::to_string(::getpid())))
  {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }

  std::string write(const std::string &name, const std::string &text) const
  {
    fs::path p = path_ / name;
    fs::create_directories(p.parent_path());
    std::ofstream(p) << text;
    return p.string();
  }

private:
  fs::path path_;
};

const std::string corpus = GUARD_CORPUS_DIR;

std::vector<std::string> case_args(const bench::CorpusCase &c)
{
  auto f = [&](const char *role) { return c.files.at(role).string(); };
  switch (c.kind) {
  case api::Kind::Code: return {"code", f("source"), "--spec", f("spec")};
  case api::Kind::Tool: return {"tool", f("definition")};
  case api::Kind::Trace: return {"distill", f("trace")};
  case api::Kind::TracePair: return {"distill", f("reference"), "--compare", f("distilled")};
  case api::Kind::Command: return {"cli", "--file", f("command")};
  case api::Kind::Assembly: return {"asm", f("program"), "--props", f("properties")};
  case api::Kind::AssemblyPair: {
    std::vector<std::string> a = {"asm", f("first"), "--equiv", f("second")};
    if (!c.observe.empty()) {
      std::string regs;
      for (auto &r : c.observe)
        regs += (regs.empty() ? "" : ",") + r;
      a.push_back("--observe");
      a.push_back(regs);
    }
    return a;
  }
  }
  return {};
}

} // namespace

TEST(Cli, Examples)
{
  TempDir dir;
  auto ls = guard_cli({"cli", "ls -la", "--json"});
  EXPECT_EQ(ls.exit_code, 0) << ls.err;
  EXPECT_EQ(json::parse(ls.out)["verdict"]["status"], "verified");

  auto abs = guard_cli({"asm", corpus + "/hw/abs_branchless.s", "--props", corpus + "/hw/abs_branchless.props"});
  EXPECT_EQ(abs.exit_code, 1);
  EXPECT_NE(abs.out.find("0x80000000"), std::string::npos) << abs.out;

  auto cmp = guard_cli({"distill", corpus + "/distill/compare/perturbed.ref.trace", "--compare",
                        corpus + "/distill/compare/perturbed.distilled.trace"});
  EXPECT_EQ(cmp.exit_code, 1);
  EXPECT_NE(cmp.out.find("divergence: step 1"), std::string::npos) << cmp.out;

  auto dump = guard_cli({"--dump-patterns"});
  EXPECT_EQ(dump.exit_code, 0);
  EXPECT_EQ(dump.out, shell::dump_patterns());
}

TEST(Cli, ExitCodesForOtherStatuses)
{
  TempDir dir;
  auto src = dir.write("s.py", "def f(s: str) -> int:\n    return 0\n");
  auto spec = dir.write("s.spec", "ensures: result == 0\n");
  auto unsupported = guard_cli({"code", src, "--spec", spec, "--json"});
  EXPECT_EQ(unsupported.exit_code, 2);
  EXPECT_EQ(json::parse(unsupported.out)["verdict"]["feature"], "type:str");

  auto unknown = guard_cli({"cli", "ls"}, oracle::unknown_solver());
  EXPECT_EQ(unknown.exit_code, 3);

  auto env = guard_cli({"cli", "ls"}, "/nonexistent/solver");
  EXPECT_EQ(env.exit_code, 3);
  EXPECT_TRUE(env.out.empty());
  EXPECT_FALSE(env.err.empty());

  auto malformed = dir.write("bad.trace", "3x + 6 = 15\n3y = 9\n");
  auto bad = guard_cli({"distill", malformed, "--json"});
  EXPECT_EQ(bad.exit_code, 2);
  EXPECT_TRUE(bad.out.empty());
  EXPECT_NE(bad.err.find("trace: line 2"), std::string::npos) << bad.err;
}

TEST(Cli, UsageErrors)
{
  TempDir dir;
  auto trace = dir.write("t.trace", "x = 1\n");
  const std::vector<std::vector<std::string>> bad = {
    {},
    {"--bogus"},
    {"frobnicate"},
    {"code", "/nonexistent.py", "--spec", trace},
    {"code", trace},
    {"distill", trace, "--compare", "/nonexistent.trace"},
    {"asm", trace},
    {"asm", trace, "--props", trace, "--equiv", trace},
    {"asm", trace, "--props", trace, "--observe", "a0"},
    {"cli"},
    {"cli", "ls", "--file", trace},
    {"--timeout-ms", "0", "cli", "ls"},
    {"bench", "/nonexistent/manifest.json"},
  };
  for (auto &args : bad) {
    auto r = guard_cli(args);
    std::string joined;
    for (auto &a : args)
      joined += a + " ";
    EXPECT_EQ(r.exit_code, 64) << joined << "\n" << r.err;
    EXPECT_TRUE(r.out.empty()) << joined;
    EXPECT_FALSE(r.err.empty()) << joined;
  }
}

TEST(Cli, ExitCodeContractAndJsonOverCorpus)
{
  auto m = bench::load_manifest(corpus + "/manifest.json");
  for (auto &c : m.cases) {
    auto args = case_args(c);
    args.push_back("--json");
    auto r = guard_cli(args);
    int expected = c.expected == Status::Verified ? 0 : 1;
    EXPECT_EQ(r.exit_code, expected) << c.id << "\n" << r.err;
    json j;
    ASSERT_NO_THROW(j = json::parse(r.out)) << c.id << ": stdout is not a single JSON document";
    EXPECT_EQ(j["verdict"]["status"], status_name(c.expected)) << c.id;
    EXPECT_EQ(j["kind"], api::kind_name(c.kind)) << c.id;
  }
}

TEST(Manifest, Errors)
{
  TempDir dir;
  auto file = dir.write("m/a.sh", "ls\n");
  auto root = fs::path(file).parent_path();
  auto parse = [&](const std::string &text) { return bench::parse_manifest(text, root / "manifest.json"); };
  EXPECT_THROW(parse("{\"cases\": []}"), bench::ManifestError);
  EXPECT_THROW(parse("not json"), bench::ManifestError);
  EXPECT_THROW(parse("[]"), bench::ManifestError);
  const char *bad_cases[] = {
    R"({"kind": "command", "category": "c", "expected": "verified", "files": {"command": "a.sh"}})",
    R"({"id": "x", "kind": "shell", "category": "c", "expected": "verified", "files": {"command": "a.sh"}})",
    R"({"id": "x", "kind": "command", "category": "c", "expected": "unknown", "files": {"command": "a.sh"}})",
    R"({"id": "x", "kind": "command", "category": "c", "expected": "verified", "files": {"command": "b.sh"}})",
    R"({"id": "x", "kind": "command", "category": "c", "expected": "verified", "files": {}})",
    R"({"id": "x", "kind": "command", "category": "c", "expected": "verified", "files": {"command": "a.sh"},
        "observe": ["a0"]})",
  };
  for (auto *c : bad_cases)
    EXPECT_THROW(parse(std::string("{\"cases\": [") + c + "]}"), bench::ManifestError) << c;
  const char *ok = R"({"id": "x", "kind": "command", "category": "c", "expected": "verified", "files": {"command": "a.sh"}})";
  EXPECT_THROW(parse(std::string("{\"cases\": [") + ok + "," + ok + "]}"), bench::ManifestError);
  auto m = parse(std::string("{\"cases\": [") + ok + "]}");
  ASSERT_EQ(m.cases.size(), 1u);
  EXPECT_EQ(m.cases[0].files.at("command"), root / "a.sh");

  auto empty = dir.write("empty.json", "{\"cases\": []}");
  auto r = guard_cli({"bench", empty});
  EXPECT_EQ(r.exit_code, 64);
}

TEST(Manifest, ShippedManifestMatchesSchema)
{
  auto lines = oracle::run_script("import json, jsonschema\n"
                                  "s = json.load(open('" GUARD_DOCS_DIR "/manifest.schema.json'))\n"
                                  "jsonschema.Draft202012Validator.check_schema(s)\n"
                                  "jsonschema.validate(json.load(open('" GUARD_CORPUS_DIR "/manifest.json')), s)\n"
                                  "print('ok')\n");
  ASSERT_EQ(lines, std::vector<std::string>{"ok"});
}

TEST(Bench, SummaryArithmetic)
{
  auto res = [](std::string id, api::Kind k, Status expected, std::optional<Verdict> got, double ms) {
    bench::CaseResult r{id, k, "c", expected, std::nullopt, {}, ms};
    if (got) {
      api::Report rep;
      rep.kind = k;
      rep.verdict = *got;
      rep.obligations = {{"o", status_of(*got), ms / 2}};
      r.report = rep;
    } else {
      r.error = "boom";
    }
    return r;
  };
  Unsafe bad{"o", {}, "w"};
  auto s = bench::summarize({
    res("a", api::Kind::Code, Status::Verified, Verified{}, 10),
    res("b", api::Kind::Code, Status::Verified, bad, 20),                      // false positive
    res("c", api::Kind::Code, Status::Unsafe, Verified{}, 30),                 // false negative
    res("d", api::Kind::Code, Status::Unsafe, Unknown{"o", "timeout"}, 40),    // wrong, neither
    res("e", api::Kind::TracePair, Status::Unsafe, bad, 5),
    res("f", api::Kind::Command, Status::Verified, std::nullopt, 1),           // error
  });
  EXPECT_EQ(s.cases, 6u);
  EXPECT_EQ(s.correct, 2u);
  EXPECT_EQ(s.false_positives, 1u);
  EXPECT_EQ(s.false_negatives, 1u);
  EXPECT_EQ(s.errors, 1u);
  EXPECT_FALSE(s.perfect());
  ASSERT_EQ(s.domains.size(), 3u);
  EXPECT_EQ(s.domains[0].domain, "code");
  EXPECT_EQ(s.domains[0].cases, 4u);
  EXPECT_EQ(s.domains[0].correct, 1u);
  EXPECT_DOUBLE_EQ(s.domains[0].accuracy(), 0.25);
  EXPECT_DOUBLE_EQ(s.domains[0].avg_ms, 25);
  EXPECT_DOUBLE_EQ(s.domains[0].median_ms, 25);
  EXPECT_DOUBLE_EQ(s.domains[0].median_solver_ms, 12.5);
  EXPECT_EQ(s.domains[1].domain, "cli");
  EXPECT_EQ(s.domains[2].domain, "distill");
  EXPECT_DOUBLE_EQ(bench::median({3, 1, 2}), 2);
}

TEST(Bench, MislabelledCaseFailsTheRun)
{
  TempDir dir;
  auto m = json::parse(bench::read_text(corpus + "/manifest.json"));
  for (auto &c : m["cases"])
    for (auto &[role, p] : c["files"].items())
      p = corpus + "/" + p.get<std::string>();
  ASSERT_EQ(m["cases"][0]["expected"], "verified");
  m["cases"][0]["expected"] = "unsafe";
  auto path = dir.write("mislabelled.json", m.dump());
  auto r = guard_cli({"bench", path, "--json"});
  EXPECT_NE(r.exit_code, 0);
  auto j = json::parse(r.out);
  EXPECT_EQ(j["cases"], 135);
  EXPECT_EQ(j["correct"], 134);
  EXPECT_EQ(j["false_negatives"], 1); // labelled buggy, verifies
  EXPECT_EQ(j["false_positives"], 0);
  EXPECT_EQ(j["results"][0]["correct"], false);
}

TEST(Bench, DeterministicVerdicts)
{
  auto m = bench::load_manifest(corpus + "/manifest.json");
  auto a = bench::run_bench(m, smt::default_timeout_ms, 4);
  auto b = bench::run_bench(m, smt::default_timeout_ms, 1);
  ASSERT_EQ(a.results.size(), b.results.size());
  for (size_t i = 0; i < a.results.size(); ++i) {
    ASSERT_TRUE(a.results[i].report && b.results[i].report) << a.results[i].id;
    EXPECT_EQ(a.results[i].report->verdict, b.results[i].report->verdict) << a.results[i].id;
    EXPECT_EQ(a.results[i].report->details, b.results[i].report->details) << a.results[i].id;
  }
}
