#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "guard/api/render.hpp"
#include "guard/api/verify.hpp"
#include "guard/bench/bench.hpp"

namespace {

using namespace guard;

constexpr int exit_usage = 64;

int exit_code(const Verdict &v)
{
  switch (status_of(v)) {
  case Status::Verified: return 0;
  case Status::Unsafe: return 1;
  case Status::Unsupported: return 2;
  case Status::Unknown: return 3;
  }
  return 3;
}

std::string read_file(const std::string &path)
{
  try {
    return bench::read_text(path);
  } catch (const Error &e) {
    throw CLI::ValidationError(e.what());
  }
}

std::vector<std::string> split_registers(const std::string &list)
{
  std::vector<std::string> out;
  std::string cur;
  for (char c : list + ",") {
    if (c == ',' || c == ' ') {
      if (!cur.empty())
        out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

struct Options {
  bool json = false;
  bool dump_patterns = false;
  int timeout_ms = smt::default_timeout_ms;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  bool log = false;

  std::string source, spec;
  std::string definition;
  std::string trace, compare;
  std::string command, command_file;
  std::string asm_file, props, equiv, observe;
  std::string manifest;
};

int emit(const api::Report &r, const Options &o)
{
  if (o.json)
    std::cout << api::to_json(r).dump(2) << "\n";
  else
    std::cout << api::render_report(r);
  return exit_code(r.verdict);
}

int run_bench(const Options &o)
{
  bench::Manifest m;
  try {
    m = bench::load_manifest(o.manifest);
  } catch (const bench::ManifestError &e) {
    std::cerr << "guard: " << e.what() << "\n";
    return exit_usage;
  }
  auto s = bench::run_bench(m, o.timeout_ms, o.jobs);
  if (o.json) {
    std::cout << bench::to_json(s).dump(2) << "\n";
  } else {
    if (o.log || !s.perfect())
      std::cout << bench::render_log(s) << "\n";
    std::cout << bench::render_table(s);
  }
  return s.perfect() ? 0 : 1;
}

} // namespace

int main(int argc, char **argv)
{
  Options o;
  CLI::App app{"Formal verification of generated artifacts with an SMT solver.", "guard"};
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  app.fallthrough(); // global flags may follow the subcommand
  app.add_flag("--json", o.json, "Print the report as JSON (the only stdout output)");
  app.add_option("--timeout-ms", o.timeout_ms, "Total solver budget per artifact")
    ->check(CLI::PositiveNumber);
  app.add_flag("--dump-patterns", o.dump_patterns, "Print the dangerous-command pattern table and exit");
  app.add_option("--jobs", o.jobs, "Parallel cases for bench")->check(CLI::PositiveNumber);

  auto *code = app.add_subcommand("code", "Verify a Python function against its contract");
  code->add_option("source", o.source, "Python source")->required()->check(CLI::ExistingFile);
  code->add_option("--spec", o.spec, "requires/ensures contract")->required()->check(CLI::ExistingFile);

  auto *tool = app.add_subcommand("tool", "Verify a tool definition against its forbidden patterns");
  tool->add_option("definition", o.definition, "Tool definition (JSON)")->required()->check(CLI::ExistingFile);

  auto *distill = app.add_subcommand("distill", "Check every step of a reasoning trace");
  distill->add_option("trace", o.trace, "Trace, one equation per line")->required()->check(CLI::ExistingFile);
  distill->add_option("--compare", o.compare, "Distilled trace to compare against the first")
    ->check(CLI::ExistingFile);

  auto *cli = app.add_subcommand("cli", "Check a shell command for dangerous patterns");
  auto *cmd_opt = cli->add_option("command", o.command, "The command text");
  auto *file_opt = cli->add_option("--file", o.command_file, "Read the command from a file")
                     ->check(CLI::ExistingFile);
  cmd_opt->excludes(file_opt);
  cli->require_option(1);

  auto *hw = app.add_subcommand("asm", "Verify straight-line RV32I assembly");
  hw->add_option("program", o.asm_file, "Assembly source")->required()->check(CLI::ExistingFile);
  auto *props_opt = hw->add_option("--props", o.props, "Property file")->check(CLI::ExistingFile);
  auto *equiv_opt = hw->add_option("--equiv", o.equiv, "Second program for an equivalence check")
                      ->check(CLI::ExistingFile);
  auto *observe_opt = hw->add_option("--observe", o.observe,
                                     "Registers compared by --equiv (default: every written register)");
  props_opt->excludes(equiv_opt);
  observe_opt->needs(equiv_opt);

  auto *bench_cmd = app.add_subcommand("bench", "Run a corpus manifest and print the results table");
  bench_cmd->add_option("manifest", o.manifest, "Manifest JSON")->required();
  bench_cmd->add_flag("--log", o.log, "Print one line per case");

  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
    std::string missing;
    if (hw->parsed() && o.props.empty() && o.equiv.empty())
      missing = "asm needs --props or --equiv";
    if (!o.dump_patterns && app.get_subcommands().empty())
      missing = "a subcommand is required";
    if (!missing.empty()) {
      std::cerr << "guard: " << missing << "\nrun 'guard --help' for usage\n";
      return exit_usage;
    }
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::Error &e) {
    std::cerr << "guard: " << e.what() << "\n" << "run 'guard --help' for usage\n";
    return exit_usage;
  }

  if (o.dump_patterns) {
    std::cout << shell::dump_patterns();
    return 0;
  }

  try {
    if (bench_cmd->parsed())
      return run_bench(o);

    api::Artifact artifact;
    if (code->parsed())
      artifact = api::CodeArtifact{read_file(o.source), read_file(o.spec)};
    else if (tool->parsed())
      artifact = api::ToolArtifact{read_file(o.definition)};
    else if (distill->parsed() && o.compare.empty())
      artifact = api::TraceArtifact{read_file(o.trace)};
    else if (distill->parsed())
      artifact = api::TracePairArtifact{read_file(o.trace), read_file(o.compare)};
    else if (cli->parsed()) {
      std::string text = o.command_file.empty() ? o.command : read_file(o.command_file);
      while (!o.command_file.empty() && !text.empty() && (text.back() == '\n' || text.back() == '\r'))
        text.pop_back();
      artifact = api::CommandArtifact{text};
    } else if (!o.props.empty())
      artifact = api::AssemblyArtifact{read_file(o.asm_file), read_file(o.props)};
    else
      artifact = api::AssemblyPairArtifact{read_file(o.asm_file), read_file(o.equiv),
                                           split_registers(o.observe)};
    return emit(api::verify(artifact, o.timeout_ms), o);
  } catch (const CLI::Error &e) {
    std::cerr << "guard: " << e.what() << "\n";
    return exit_usage;
  } catch (const api::ArtifactError &e) {
    std::cerr << "guard: " << e.what() << "\n";
    return 2;
  } catch (const SolverEnvironmentError &e) {
    std::cerr << "guard: solver unavailable: " << e.what() << "\n";
    return 3;
  } catch (const std::exception &e) {
    std::cerr << "guard: " << e.what() << "\n";
    return 3;
  }
}
