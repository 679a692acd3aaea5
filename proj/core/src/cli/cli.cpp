#include "hbs/cli/cli.hpp"

#include <climits>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "hbs/backends/backend.hpp"
#include "hbs/error.hpp"
#include "hbs/flow/session.hpp"
#include "hbs/tclish/list.hpp"
#include "hbs/tclish/output.hpp"
#include "hbs/testrunner/testrunner.hpp"

namespace hbs::cli {

namespace fs = std::filesystem;
using tclish::make_list;

const std::vector<CommandInfo>& commands() {
  static const std::vector<CommandInfo> table{
      {"help", "Print help message", "hbs help [command]",
       "Without an argument prints the command list. With a command name prints\n"
       "its usage and description."},
      {"doc", "Show documentation for cores", "hbs doc [pattern]",
       "Prints each core matching the glob pattern (default *) with its defining\n"
       "file, the comment block above its namespace eval, and its targets with\n"
       "the comment block above each proc. Exits 2 when nothing matches."},
      {"dump", "Dump info about cores in Tcl dictionary format", "hbs dump",
       "Prints the registry as a Tcl dictionary: cores, each with path, file,\n"
       "doc and targets; each target with name, params and testbench."},
      {"dump-json", "Dump info about cores in JSON format", "hbs dump-json",
       "Prints {\"cores\": [...]} where each core has path, file, doc and targets;\n"
       "each target has name, params (name and optional default) and testbench."},
      {"graph", "Output dependency graph for given target", "hbs graph <target> [args...]",
       "Evaluates the target in dry-run mode and prints the hbs::AddDep graph in\n"
       "DOT format. Nodes are target paths followed by their arguments."},
      {"info", "Show information on hbs Tcl symbol or EDA tool", "hbs info <symbol|tool>",
       "For a tool prints its kind, stages and callback commands. For an hbs::\n"
       "symbol prints its signature and a short description."},
      {"ls-cores", "List cores found in .hbs files", "hbs ls-cores [pattern]",
       "Prints registered core paths, sorted, optionally filtered by a glob."},
      {"ls-targets", "List targets for given core", "hbs ls-targets <core>",
       "Prints the targets of a core, sorted. Procs starting with _ are not targets."},
      {"ls-tb", "List testbench targets", "hbs ls-tb [pattern]",
       "Prints testbench target paths: names starting with tb- or tb_, ending with\n"
       "-tb or _tb, or equal to tb."},
      {"run", "Run given target", "hbs run <target> [args...]",
       "Runs the target proc. Arguments after the target are passed to it."},
      {"dry-run", "Run given target without executing and evaluating commands",
       "hbs dry-run <target> [args...]",
       "Evaluates the target but prints external commands and generated scripts\n"
       "instead of running or writing them. Nothing is written to disk."},
      {"test", "Run testbench targets", "hbs test [pattern]",
       "Runs every testbench target matching the glob, each in its own flow, with\n"
       "up to --workers (or HBS_WORKERS) running at once. Output of each test goes\n"
       "to build/test-logs/. Exits 1 if any test fails."},
      {"version", "Print hbs version", "hbs version", "Prints the version number."},
      {"where", "Print where given cores are defined", "hbs where [pattern]",
       "Prints each matching core with the .hbs file that registers it."},
  };
  return table;
}

std::string help_text() {
  std::string out = "Usage\n\n  hbs <command> [arguments]\n\nThe command is one of:\n\n";
  for (const auto& c : commands()) {
    std::string name(c.name);
    name.resize(12, ' ');
    out += "  " + name + std::string(c.summary) + "\n";
  }
  out += "\nType 'hbs help <command>' to obtain more information about particular command.\n";
  return out;
}

int exit_code_for(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->code()) {
      case Errc::usage:
      case Errc::unknown_target:
      case Errc::unknown_core:
      case Errc::no_tests_matched:
        return 2;
      default:
        return 1;
    }
  }
  return 1;
}

namespace {

nlohmann::ordered_json core_json(const registry::Core& core) {
  nlohmann::ordered_json j;
  j["path"] = core.path;
  j["file"] = core.defining_file;
  j["doc"] = core.doc;
  j["targets"] = nlohmann::ordered_json::array();
  for (const auto& [name, t] : core.targets) {
    nlohmann::ordered_json tj;
    tj["name"] = name;
    tj["params"] = nlohmann::ordered_json::array();
    for (const auto& p : t.params) {
      nlohmann::ordered_json pj;
      pj["name"] = p.name;
      if (p.default_value) pj["default"] = *p.default_value;
      tj["params"].push_back(std::move(pj));
    }
    if (t.has_rest) tj["params"].push_back({{"name", "args"}});
    tj["testbench"] = t.testbench;
    j["targets"].push_back(std::move(tj));
  }
  return j;
}

}  // namespace

std::string dump_json(const registry::Registry& reg) {
  nlohmann::ordered_json j;
  j["cores"] = nlohmann::ordered_json::array();
  for (const auto& [path, core] : reg.cores()) j["cores"].push_back(core_json(core));
  return j.dump(2) + "\n";
}

std::string dump_tcl(const registry::Registry& reg) {
  std::vector<std::string> cores;
  for (const auto& [path, core] : reg.cores()) {
    std::vector<std::string> targets;
    for (const auto& [name, t] : core.targets) {
      std::vector<std::string> params;
      for (const auto& p : t.params) {
        std::vector<std::string> pd{"name", p.name};
        if (p.default_value) {
          pd.push_back("default");
          pd.push_back(*p.default_value);
        }
        params.push_back(make_list(pd));
      }
      if (t.has_rest) params.push_back(make_list(std::vector<std::string>{"name", "args"}));
      targets.push_back(make_list(std::vector<std::string>{
          "name", name, "params", make_list(params), "testbench", t.testbench ? "1" : "0"}));
    }
    cores.push_back(make_list(std::vector<std::string>{"path", path, "file", core.defining_file,
                                                       "doc", core.doc, "targets",
                                                       make_list(targets)}));
  }
  return make_list(std::vector<std::string>{"cores", make_list(cores)}) + "\n";
}

namespace {

struct Symbol {
  std::string_view signature;
  std::string_view description;
};

const std::map<std::string, Symbol, std::less<>>& symbols() {
  static const auto table = [] {
    std::map<std::string, Symbol, std::less<>> m{
        {"hbs::Register", {"hbs::Register", "Registers the enclosing namespace as a core."}},
        {"hbs::AddFile",
         {"hbs::AddFile path ?path ...?",
          "Adds files, relative to the .hbs file defining the running proc, with the current\n"
          "library and standard."}},
        {"hbs::AddDep",
         {"hbs::AddDep path ?args...?",
          "Runs a dependency target with the given arguments and records the edge. Memoized:\n"
          "within one flow a target runs at most once per distinct argument list."}},
        {"hbs::Run", {"hbs::Run ?stage?", "Runs the tool flow up to stage (default: last)."}},
        {"hbs::Exec",
         {"hbs::Exec command ?arg ...?",
          "Runs a program with output shown and returns its exit status. Prints the command\n"
          "instead in dry-run mode."}},
        {"hbs::panic", {"hbs::panic message", "Aborts the flow with message; exit status 1."}},
        {"hbs::SetTool", {"hbs::SetTool tool", "Selects the EDA tool backend."}},
        {"hbs::SetTop", {"hbs::SetTop name", "Sets the top-level design unit."}},
        {"hbs::SetDevice", {"hbs::SetDevice part", "Sets the target device."}},
        {"hbs::SetLib", {"hbs::SetLib name", "Library for files added next; \"\" is the default."}},
        {"hbs::SetStd",
         {"hbs::SetStd standard", "HDL standard: 1987 1993 2000 2002 2008 2019 or 87..19."}},
        {"hbs::SetGeneric", {"hbs::SetGeneric name value", "Sets a top-level generic."}},
        {"hbs::SetArgPrefix",
         {"hbs::SetArgPrefix ?arg ...?", "Extra tool arguments placed after the mode flag."}},
        {"hbs::SetArgSuffix",
         {"hbs::SetArgSuffix ?arg ...?", "Extra tool arguments placed before the top unit."}},
        {"hbs::SetExitSeverity",
         {"hbs::SetExitSeverity note|warning|error|failure",
          "Severity at which a simulation fails."}},
        {"hbs::AddPreCb",
         {"hbs::AddPreCb stage command ?arg ...?", "Runs command before stage."}},
        {"hbs::AddPostCb",
         {"hbs::AddPostCb stage command ?arg ...?", "Runs command after stage."}},
        {"hbs::mock::SetStageCmd",
         {"hbs::mock::SetStageCmd stage command", "Command a mock backend runs for stage."}},
        {"hbs::ghdl::std", {"hbs::ghdl::std", "Current standard as a ghdl --std= value."}},
        {"hbs::Tool", {"$hbs::Tool", "Active tool name, empty until hbs::SetTool."}},
        {"hbs::Top", {"$hbs::Top", "Top-level design unit."}},
        {"hbs::ThisCorePath", {"$hbs::ThisCorePath", "Core path of the running target."}},
        {"hbs::ThisCore", {"$hbs::ThisCore", "Same as $hbs::ThisCorePath."}},
        {"hbs::ThisTargetPath", {"$hbs::ThisTargetPath", "Path of the running target."}},
        {"hbs::ArgPrefix", {"$hbs::ArgPrefix", "Value set by hbs::SetArgPrefix."}},
        {"hbs::ArgSuffix", {"$hbs::ArgSuffix", "Value set by hbs::SetArgSuffix."}},
        {"hbs::RunTargetBuildDir",
         {"$hbs::RunTargetBuildDir", "Build directory of the target given on the command line."}},
        {"hbs::ghdl::libs", {"$hbs::ghdl::libs", "Library search flags for ghdl."}},
    };
    static std::deque<std::string> names;  // backing storage for generated signatures
    for (const auto& spec : backends::all_backends()) {
      for (std::size_t i = 0; i < spec.stages.size(); ++i) {
        for (const auto phase : {flow::Phase::pre, flow::Phase::post}) {
          const std::string name = backends::callback_builtin(spec, i, phase);
          if (m.contains(name)) continue;
          names.push_back(name + " command ?arg ...?");
          names.push_back(std::string("Runs command ") +
                          (phase == flow::Phase::pre ? "before" : "after") + " the " +
                          spec.stages[i] + " stage.");
          m.emplace(name, Symbol{names[names.size() - 2], names.back()});
        }
      }
    }
    return m;
  }();
  return table;
}

std::string indent(std::string_view text, std::string_view pad) {
  std::string out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    const auto line = text.substr(start, end == std::string_view::npos ? end : end - start);
    out += std::string(pad) + std::string(line) + "\n";
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

struct Options {
  std::string dir = ".";
  std::optional<long> workers;
  std::string tool_cmd;
};

class Runner {
 public:
  Runner(Options opts, std::vector<std::string> args, int out_fd, int err_fd)
      : opts_(std::move(opts)), args_(std::move(args)), sink_(out_fd, err_fd) {}

  using Table = std::map<std::string, int (Runner::*)(), std::less<>>;

  static const Table& table() {
    static const Table t{
        {"help", &Runner::help},         {"doc", &Runner::doc},
        {"dump", &Runner::dump},         {"dump-json", &Runner::dump_json_cmd},
        {"graph", &Runner::graph},       {"info", &Runner::info},
        {"ls-cores", &Runner::ls_cores}, {"ls-targets", &Runner::ls_targets},
        {"ls-tb", &Runner::ls_tb},       {"run", &Runner::run_cmd},
        {"dry-run", &Runner::dry_run},   {"test", &Runner::test},
        {"version", &Runner::version},   {"where", &Runner::where},
    };
    return t;
  }

  int dispatch(const std::string& command) {
    const auto it = table().find(command);
    if (it == table().end()) {
      sink_.write_err("hbs: unknown command \"" + command + "\"\n\n" + help_text());
      return 2;
    }
    return (this->*it->second)();
  }

 private:
  void out(const std::string& text) { sink_.write(text); }
  int usage_error(std::string_view command) {
    for (const auto& c : commands()) {
      if (c.name == command) sink_.write_err("usage: " + std::string(c.usage) + "\n");
    }
    return 2;
  }
  std::optional<std::string> optional_arg() {
    if (args_.empty()) return std::nullopt;
    return args_.front();
  }

  flow::Session& session(bool dry_run) {
    session_ = std::make_unique<flow::Session>(
        flow::SessionOptions{opts_.dir, fs::current_path(), dry_run, opts_.tool_cmd}, sink_);
    session_->load();
    return *session_;
  }

  int help() {
    if (args_.empty()) {
      out(help_text());
      return 0;
    }
    for (const auto& c : commands()) {
      if (c.name == args_.front()) {
        out("Usage\n\n  " + std::string(c.usage) + "\n\n" + std::string(c.summary) + ".\n\n" +
            std::string(c.detail) + "\n");
        return 0;
      }
    }
    sink_.write_err("hbs: unknown command \"" + args_.front() + "\"\n");
    return 2;
  }

  int version() {
    out(std::string(kVersion) + "\n");
    return 0;
  }

  int ls_cores() {
    if (args_.size() > 1) return usage_error("ls-cores");
    for (const auto& c : session(true).registry().list_cores(optional_arg())) out(c + "\n");
    return 0;
  }

  int ls_targets() {
    if (args_.size() != 1) return usage_error("ls-targets");
    for (const auto& t : session(true).registry().list_targets(args_.front())) out(t + "\n");
    return 0;
  }

  int ls_tb() {
    if (args_.size() > 1) return usage_error("ls-tb");
    for (const auto& t : session(true).registry().list_tb(optional_arg())) out(t + "\n");
    return 0;
  }

  int where() {
    if (args_.size() > 1) return usage_error("where");
    for (const auto& [core, file] : session(true).registry().where(optional_arg().value_or("*"))) {
      out(core + "  " + file + "\n");
    }
    return 0;
  }

  int doc() {
    if (args_.size() > 1) return usage_error("doc");
    const auto& reg = session(true).registry();
    const auto matches = reg.list_cores(optional_arg().value_or("*"));
    if (matches.empty()) {
      sink_.write_err("hbs: no core matches \"" + optional_arg().value_or("*") + "\"\n");
      return 2;
    }
    std::string text;
    for (const auto& path : matches) {
      const registry::Core& core = *reg.find_core(path);
      if (!text.empty()) text += "\n";
      text += core.path + "\n  file: " + core.defining_file + "\n";
      if (!core.doc.empty()) text += indent(core.doc, "  ");
      if (core.targets.empty()) continue;
      text += "  targets:\n";
      for (const auto& [name, t] : core.targets) {
        text += "    " + name + (t.testbench ? "  (testbench)" : "") + "\n";
        if (!t.doc.empty()) text += indent(t.doc, "      ");
      }
    }
    out(text);
    return 0;
  }

  int dump() {
    if (!args_.empty()) return usage_error("dump");
    out(dump_tcl(session(true).registry()));
    return 0;
  }

  int dump_json_cmd() {
    if (!args_.empty()) return usage_error("dump-json");
    out(dump_json(session(true).registry()));
    return 0;
  }

  int info() {
    if (args_.size() != 1) return usage_error("info");
    const std::string& what = args_.front();
    for (const auto& spec : backends::all_backends()) {
      if (spec.name != what) continue;
      std::string text = spec.name + "\n  kind: " + std::string(backends::backend_kind_name(spec.kind)) +
                         "\n  stages:";
      for (const auto& s : spec.stages) text += " " + s;
      text += "\n  callbacks:";
      for (std::size_t i = 0; i < spec.stages.size(); ++i) {
        text += " " + backends::callback_builtin(spec, i, flow::Phase::pre) + " " +
                backends::callback_builtin(spec, i, flow::Phase::post);
      }
      text += "\n  " + spec.summary + "\n";
      out(text);
      return 0;
    }
    std::string_view key = what;
    if (key.starts_with("$")) key.remove_prefix(1);
    while (key.starts_with("::")) key.remove_prefix(2);
    if (const auto it = symbols().find(key); it != symbols().end()) {
      out(std::string(it->second.signature) + "\n" + indent(it->second.description, "  "));
      return 0;
    }
    sink_.write_err("hbs: no tool or hbs symbol named \"" + what + "\"\n");
    return 2;
  }

  int run_target(bool dry_run) {
    if (args_.empty()) return usage_error(dry_run ? "dry-run" : "run");
    const std::vector<std::string> argv(args_.begin() + 1, args_.end());
    session(dry_run).run(args_.front(), argv);
    return 0;
  }
  int run_cmd() { return run_target(false); }
  int dry_run() { return run_target(true); }

  int graph() {
    if (args_.empty()) return usage_error("graph");
    const std::vector<std::string> argv(args_.begin() + 1, args_.end());
    out(flow::emit_dot(session(true).graph(args_.front(), argv)));
    return 0;
  }

  int test() {
    if (args_.size() > 1) return usage_error("test");
    testrunner::RunOptions ro;
    ro.root = opts_.dir;
    ro.work_dir = fs::current_path();
    ro.workers = testrunner::resolve_workers(opts_.workers);
    ro.pattern = optional_arg();
    ro.tool_cmd = opts_.tool_cmd;
    const auto summary = testrunner::run_tests(ro, [this](const testrunner::TestResult& r) {
      sink_.write_err(std::string(r.status == testrunner::TestResult::Status::pass ? "ok    "
                                                                                   : "fail  ") +
                      r.target + "\n");
    });
    out(testrunner::report(summary.results));
    return summary.exit_code;
  }

  Options opts_;
  std::vector<std::string> args_;
  tclish::FdSink sink_;
  std::unique_ptr<flow::Session> session_;
};

}  // namespace

std::vector<std::string> dispatch_names() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : Runner::table()) out.push_back(name);
  return out;
}

int run(const std::vector<std::string>& args, int out_fd, int err_fd) {
  tclish::FdSink diag(out_fd, err_fd);
  Options opts;
  CLI::App app{"hbs"};
  app.set_help_flag();
  app.prefix_command();
  long workers = 0;
  app.add_option("--dir", opts.dir, "directory searched for .hbs files");
  auto* workers_opt =
      app.add_option("--workers", workers, "parallel test flows")->check(CLI::Range(1L, LONG_MAX));
  app.add_option("--tool-cmd", opts.tool_cmd, "program that runs generated scripts");

  std::vector<const char*> cargs{"hbs"};
  for (const auto& a : args) cargs.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    diag.write_err("hbs: " + std::string(e.what()) + "\n\n" + help_text());
    return 2;
  }
  if (workers_opt->count() > 0) opts.workers = workers;

  std::vector<std::string> rest = app.remaining();
  if (rest.empty()) {
    diag.write_err(help_text());
    return 2;
  }
  const std::string command = rest.front();
  rest.erase(rest.begin());
  try {
    Runner runner(std::move(opts), std::move(rest), out_fd, err_fd);
    return runner.dispatch(command);
  } catch (const Error& e) {
    diag.write_err("hbs: error: " + e.describe() + "\n");
    return exit_code_for(e);
  } catch (const std::exception& e) {
    diag.write_err(std::string("hbs: error: ") + e.what() + "\n");
    return 1;
  }
}

}  // namespace hbs::cli
