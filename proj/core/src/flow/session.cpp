#include "hbs/flow/session.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

#include "hbs/backends/backend.hpp"
#include "hbs/error.hpp"
#include "hbs/process.hpp"
#include "hbs/tclish/list.hpp"

namespace hbs::flow {

namespace fs = std::filesystem;
using tclish::Interp;
using tclish::Result;
using Args = std::span<const std::string>;

namespace {

std::string strip_absolute(std::string_view name) {
  while (name.starts_with("::")) name.remove_prefix(2);
  return std::string(name);
}

[[noreturn]] void wrong_args(std::string_view usage) {
  throw Error(Errc::arity, "wrong # args: should be \"" + std::string(usage) + "\"");
}

double now_seconds() {
  using namespace std::chrono;
  return duration<double>(system_clock::now().time_since_epoch()).count();
}

std::string canonical_std(std::string_view token) {
  static const std::pair<std::string_view, std::string_view> table[] = {
      {"87", "1987"}, {"93", "1993"}, {"00", "2000"}, {"02", "2002"}, {"08", "2008"}, {"19", "2019"},
  };
  for (const auto& [short_form, year] : table) {
    if (token == short_form || token == year) return std::string(year);
  }
  throw Error(Errc::invalid_std, "invalid standard \"" + std::string(token) +
                                     "\", expected one of 1987 1993 2000 2002 2008 2019");
}

std::string join_words(Args words) {
  std::string out;
  for (const auto& w : words) {
    if (w.empty()) continue;
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Session::Session(SessionOptions options, tclish::OutputSink& out)
    : options_(std::move(options)), out_(out), interp_(std::make_unique<Interp>(out)) {
  ctx_.dry_run = options_.dry_run;
  interp_->ensure_namespace("hbs::ghdl");
  interp_->ensure_namespace("hbs::mock");
  builder_.install(*interp_);
  install_builtins();
  sync_vars();
  interp_->set_call_hook([this](const tclish::ProcDef& proc, Args args, bool entering) {
    on_call(proc, args, entering);
  });
  interp_->set_exec_hook([this](Args argv) {
    if (!ctx_.dry_run) return false;
    interp_->out().write(tclish::make_list(argv) + "\n");
    return true;
  });
}

Session::~Session() = default;

void Session::load() { load(registry::discover(options_.root)); }

void Session::load(const registry::DiscoveryList& list) {
  for (const auto& w : list.warnings) interp_->out().write_err("warning: " + w + "\n");
  registry_ = registry::source_all(list, *interp_, builder_);
}

fs::path Session::build_dir_for(const fs::path& work_dir, std::string_view target, Args argv) {
  fs::path dir = work_dir / "build";
  std::string_view rest = target;
  while (!rest.empty()) {
    const auto pos = rest.find("::");
    dir /= std::string(rest.substr(0, pos));
    if (pos == std::string_view::npos) break;
    rest.remove_prefix(pos + 2);
  }
  if (!argv.empty()) {
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a(tclish::make_list(argv))));
    dir /= hex;
  }
  return dir;
}

void Session::run(std::string_view target, Args argv) {
  const std::string fq = strip_absolute(target);
  if (!registry_.find_target(fq)) {
    throw Error(Errc::unknown_target, "unknown target \"" + std::string(target) + "\"");
  }
  ctx_.root_target = fq;
  ctx_.build_dir = build_dir_for(options_.work_dir, fq, argv);
  if (!ctx_.dry_run) fs::create_directories(ctx_.build_dir);
  interp_->set_var("::hbs::RunTargetBuildDir", ctx_.build_dir.string());

  const DepNode root{fq, {argv.begin(), argv.end()}};
  ctx_.graph.add_node(root);
  ctx_.memo.insert(root);
  interp_->call_proc(fq, argv);
}

DepGraph Session::graph(std::string_view target, Args argv) {
  tclish::NullSink null;
  interp_->set_output(null);
  struct Restore {
    Session& self;
    ~Restore() { self.interp_->set_output(self.out_); }
  } restore{*this};
  ctx_.dry_run = true;
  run(target, argv);
  return ctx_.graph;
}

void Session::sync_vars() {
  const auto set = [this](const char* name, const std::string& value) {
    interp_->set_var(std::string("::hbs::") + name, value);
  };
  set("Tool", ctx_.tool);
  set("Top", ctx_.top);
  set("Device", ctx_.device);
  set("Lib", ctx_.lib);
  set("Std", ctx_.std);
  set("ArgPrefix", ctx_.arg_prefix);
  set("ArgSuffix", ctx_.arg_suffix);
  set("ExitSeverity", ctx_.exit_severity);
  set("RunTargetBuildDir", ctx_.build_dir.string());
  set("ThisCorePath", ctx_.this_core_path);
  set("ThisCore", ctx_.this_core_path);
  set("ThisTargetPath", ctx_.this_target_path);
  bool libs = false;
  for (const auto& f : ctx_.files) libs = libs || !f.lib.empty();
  set("ghdl::libs", libs ? "-Pwork" : "");
}

void Session::on_call(const tclish::ProcDef& proc, Args args, bool entering) {
  if (!builder_.is_core(proc.ns) || proc.name().starts_with('_')) return;
  if (entering) {
    active_.push_back({DepNode{proc.fq_name, {args.begin(), args.end()}}, ctx_.this_core_path,
                       ctx_.this_target_path});
    ctx_.this_core_path = proc.ns;
    ctx_.this_target_path = proc.fq_name;
  } else {
    ctx_.this_core_path = std::move(active_.back().saved_core);
    ctx_.this_target_path = std::move(active_.back().saved_target);
    active_.pop_back();
  }
  interp_->set_var("::hbs::ThisCorePath", ctx_.this_core_path);
  interp_->set_var("::hbs::ThisCore", ctx_.this_core_path);
  interp_->set_var("::hbs::ThisTargetPath", ctx_.this_target_path);
}

void Session::add_dep(Args argv) {
  if (argv.size() < 2) wrong_args("hbs::AddDep path ?arg ...?");
  if (active_.empty()) throw Error(Errc::not_in_target, "hbs::AddDep called outside a target");
  const std::string fq = strip_absolute(argv[1]);
  if (!registry_.find_target(fq)) {
    throw Error(Errc::unknown_target, "unknown target \"" + argv[1] + "\"");
  }
  const DepNode node{fq, {argv.begin() + 2, argv.end()}};
  for (std::size_t i = 0; i < active_.size(); ++i) {
    if (active_[i].node != node) continue;
    std::string chain;
    for (std::size_t j = i; j < active_.size(); ++j) chain += active_[j].node.label() + " -> ";
    throw Error(Errc::dependency_cycle, "dependency cycle: " + chain + node.label());
  }
  ctx_.graph.add_edge(active_.back().node, node);
  if (ctx_.memo.insert(node).second) interp_->call_proc(fq, node.argv);
}

void Session::add_files(Args paths) {
  const tclish::ProcDef* proc = interp_->current_proc();
  const std::string& defining = proc ? proc->defining_file : interp_->current_file();
  const fs::path base = defining.empty() ? fs::current_path() : fs::path(defining).parent_path();
  for (const auto& p : paths) {
    const fs::path resolved = fs::absolute(base / p).lexically_normal();
    if (!ctx_.dry_run && !fs::exists(resolved)) {
      throw Error(Errc::file_not_found, "file not found: " + resolved.string());
    }
    bool duplicate = false;
    for (const auto& f : ctx_.files) duplicate = duplicate || (f.path == resolved && f.lib == ctx_.lib);
    if (duplicate) continue;
    ctx_.files.push_back({resolved, file_kind(resolved), ctx_.lib, ctx_.std});
  }
  ctx_.tool_locked = true;
}

void Session::set_tool(const std::string& tool) {
  const auto& spec = backends::backend_for(tool);
  if (tool == ctx_.tool) return;
  if (ctx_.tool_locked && !ctx_.tool.empty()) {
    throw Error(Errc::tool_already_set, "cannot switch tool from " + ctx_.tool + " to " + tool +
                                            " after files were added or a flow ran");
  }
  ctx_.tool = tool;
  if (spec.kind == backends::BackendKind::script_gen) {
    interp_->set_unknown_handler([this](Interp& in, const tclish::ScriptNode& node) {
      ctx_.unknown_log.push_back({backends::render_unknown(in, node), ctx_.files.size()});
      return Result{};
    });
  } else {
    interp_->set_unknown_handler(nullptr);
  }
}

void Session::add_callback(const std::string& stage, Phase phase, Args words,
                           std::string_view usage) {
  if (words.empty()) wrong_args(usage);
  bool known = false;
  if (!ctx_.tool.empty()) {
    known = backends::backend_for(ctx_.tool).stage_index(stage) >= 0;
  } else {
    for (const auto& spec : backends::all_backends()) known = known || spec.stage_index(stage) >= 0;
  }
  if (!known) {
    throw Error(Errc::unknown_stage,
                "unknown stage \"" + stage + "\" for tool " +
                    (ctx_.tool.empty() ? std::string("(none)") : ctx_.tool));
  }
  Callback cb;
  const auto fq = interp_->resolve_command(words.front());
  cb.command = fq ? "::" + *fq : words.front();
  cb.args.assign(words.begin() + 1, words.end());
  ctx_.callbacks[{stage, phase}].push_back(std::move(cb));
}

int Session::spawn(const std::vector<std::string>& argv, const fs::path& cwd) {
  SpawnRequest req;
  req.argv = argv;
  req.cwd = cwd;
  tclish::OutputSink& sink = interp_->out();
  const int out_fd = sink.stdout_fd();
  const int err_fd = sink.stderr_fd();
  req.out = out_fd >= 0 ? StreamTarget::to_fd(out_fd) : StreamTarget::captured();
  req.err = err_fd >= 0 ? StreamTarget::to_fd(err_fd) : StreamTarget::captured();
  const SpawnResult res = run_process(req);
  if (out_fd < 0) sink.write(res.out);
  if (err_fd < 0) sink.write_err(res.err);
  return res.exit_code;
}

void Session::run_callback(const Callback& cb) {
  std::vector<std::string> words{cb.command};
  words.insert(words.end(), cb.args.begin(), cb.args.end());
  interp_->invoke(words);
}

void Session::run_callbacks(const std::string& stage, Phase phase, bool trace) {
  // Copy: a callback may register further callbacks.
  const std::vector<Callback> list = ctx_.callbacks_for(stage, phase);
  for (const auto& cb : list) {
    const double t0 = now_seconds();
    run_callback(cb);
    if (trace && !ctx_.dry_run) {
      std::vector<std::string> words{cb.command};
      words.insert(words.end(), cb.args.begin(), cb.args.end());
      backends::append_trace(ctx_, {stage, std::string(phase_name(phase)),
                                    tclish::make_list(words), 0, t0, now_seconds()});
    }
  }
}

void Session::run_stages(std::string_view through) {
  if (ctx_.tool.empty()) throw Error(Errc::tool_not_set, "hbs::Run called before hbs::SetTool");
  const auto& spec = backends::backend_for(ctx_.tool);
  if (through.empty()) through = spec.final_stage();
  const int last = spec.stage_index(through);
  if (last < 0) {
    throw Error(Errc::unknown_stage,
                "unknown stage \"" + std::string(through) + "\" for tool " + spec.name);
  }
  ctx_.tool_locked = true;
  if (ctx_.build_dir.empty()) ctx_.build_dir = options_.work_dir / "build";
  if (!ctx_.dry_run) fs::create_directories(ctx_.build_dir);
  tclish::OutputSink& out = interp_->out();

  if (spec.kind == backends::BackendKind::script_gen) {
    for (int i = 0; i <= last; ++i) {
      for (const Phase phase : {Phase::pre, Phase::post}) {
        const std::vector<Callback> list = ctx_.callbacks_for(spec.stages[i], phase);
        for (const auto& cb : list) {
          const std::string name = strip_absolute(cb.command);
          if (!interp_->find_proc(name) && interp_->has_builtin(name)) run_callback(cb);
        }
      }
    }
    const std::string script = backends::scriptgen_emit(ctx_, spec, through, interp_.get());
    if (ctx_.dry_run) {
      out.write(script);
      return;
    }
    const fs::path file = ctx_.build_dir / "run.tcl";
    {
      std::ofstream os(file, std::ios::binary | std::ios::trunc);
      os << script;
      if (!os) throw Error(Errc::io_error, "cannot write " + file.string());
    }
    if (options_.tool_cmd.empty()) return;
    std::vector<std::string> argv = tclish::split_list(options_.tool_cmd);
    argv.push_back(file.string());
    if (const int code = spawn(argv, ctx_.build_dir); code != 0) {
      throw Error(Errc::stage_failure,
                  spec.name + " script failed with exit status " + std::to_string(code));
    }
    return;
  }

  const bool mock = spec.name == "mock-sim";
  for (int i = 0; i <= last; ++i) {
    const std::string& stage = spec.stages[i];
    run_callbacks(stage, Phase::pre, mock);
    if (mock) {
      const auto it = ctx_.mock_commands.find(stage);
      const std::string cmd = it == ctx_.mock_commands.end() ? std::string() : it->second;
      const double t0 = now_seconds();
      int code = 0;
      if (ctx_.dry_run) {
        if (!cmd.empty()) out.write(cmd + "\n");
      } else {
        const auto words = tclish::split_list(cmd);
        if (!words.empty()) code = spawn(words, ctx_.build_dir);
        backends::append_trace(ctx_, {stage, "stage", cmd, code, t0, now_seconds()});
      }
      if (code != 0) {
        throw Error(Errc::mock_stage_failure,
                    "mock " + stage + " failed with exit status " + std::to_string(code));
      }
    } else {
      for (const auto& argv : backends::ghdl_stage_commands(ctx_, stage)) {
        if (ctx_.dry_run) {
          out.write(backends::command_line(argv) + "\n");
          continue;
        }
        if (const int code = spawn(argv, ctx_.build_dir); code != 0) {
          throw Error(Errc::stage_failure, (ctx_.top.empty() ? std::string("design") : ctx_.top) +
                                               " " + stage + " failed with exit status " +
                                               std::to_string(code));
        }
      }
    }
    run_callbacks(stage, Phase::post, mock);
  }
}

void Session::install_builtins() {
  Interp& in = *interp_;
  install_state_builtins();
  install_callback_builtins();

  in.register_builtin("hbs::AddFile", [this](Interp&, Args argv) {
    if (argv.size() < 2) wrong_args("hbs::AddFile path ?path ...?");
    add_files(argv.subspan(1));
    sync_vars();
    return Result{};
  });
  in.register_builtin("hbs::AddDep", [this](Interp&, Args argv) {
    add_dep(argv);
    return Result{};
  });
  in.register_builtin("hbs::Run", [this](Interp&, Args argv) {
    if (argv.size() > 2) wrong_args("hbs::Run ?stage?");
    run_stages(argv.size() == 2 ? std::string_view(argv[1]) : std::string_view());
    return Result{};
  });
  in.register_builtin("hbs::Exec", [this](Interp& self, Args argv) {
    if (argv.size() < 2) wrong_args("hbs::Exec command ?arg ...?");
    std::vector<std::string> words =
        argv.size() == 2 ? tclish::split_list(argv[1])
                         : std::vector<std::string>(argv.begin() + 1, argv.end());
    if (words.empty()) throw Error(Errc::bad_exec, "hbs::Exec: empty command");
    if (ctx_.dry_run) {
      self.out().write(backends::command_line(words) + "\n");
      return Result{tclish::Code::ok, "0"};
    }
    return Result{tclish::Code::ok, std::to_string(spawn(words, {}))};
  });
  in.register_builtin("hbs::panic", [](Interp&, Args argv) -> Result {
    if (argv.size() != 2) wrong_args("hbs::panic message");
    throw Error(Errc::panic, argv[1]);
  });
  in.register_builtin("hbs::ghdl::std", [this](Interp&, Args argv) {
    if (argv.size() != 1) wrong_args("hbs::ghdl::std");
    return Result{tclish::Code::ok, backends::ghdl_std(ctx_.std)};
  });
  in.register_builtin("hbs::mock::SetStageCmd", [this](Interp&, Args argv) {
    if (argv.size() != 3) wrong_args("hbs::mock::SetStageCmd stage command");
    bool known = false;
    for (const auto& spec : backends::all_backends()) {
      if (spec.name.starts_with("mock-")) known = known || spec.stage_index(argv[1]) >= 0;
    }
    if (!known) throw Error(Errc::unknown_stage, "unknown mock stage \"" + argv[1] + "\"");
    ctx_.mock_commands[argv[1]] = argv[2];
    return Result{};
  });
}

void Session::install_state_builtins() {
  Interp& in = *interp_;
  const auto setter = [&](const char* name, auto apply) {
    const std::string usage = std::string(name) + " value";
    in.register_builtin(name, [this, usage, apply](Interp&, Args argv) {
      if (argv.size() != 2) wrong_args(usage);
      apply(argv[1]);
      sync_vars();
      return Result{};
    });
  };
  setter("hbs::SetTool", [this](const std::string& v) { set_tool(v); });
  setter("hbs::SetTop", [this](const std::string& v) { ctx_.top = v; });
  setter("hbs::SetDevice", [this](const std::string& v) { ctx_.device = v; });
  setter("hbs::SetLib", [this](const std::string& v) { ctx_.lib = v; });
  setter("hbs::SetStd", [this](const std::string& v) { ctx_.std = canonical_std(v); });
  setter("hbs::SetExitSeverity", [this](const std::string& v) {
    if (v != "note" && v != "warning" && v != "error" && v != "failure") {
      throw Error(Errc::invalid_severity,
                  "invalid severity \"" + v + "\", expected note, warning, error or failure");
    }
    ctx_.exit_severity = v;
  });
  in.register_builtin("hbs::SetGeneric", [this](Interp&, Args argv) {
    if (argv.size() != 3) wrong_args("hbs::SetGeneric name value");
    ctx_.generics[argv[1]] = argv[2];
    return Result{};
  });
  in.register_builtin("hbs::SetArgPrefix", [this](Interp&, Args argv) {
    ctx_.arg_prefix = join_words(argv.subspan(1));
    sync_vars();
    return Result{};
  });
  in.register_builtin("hbs::SetArgSuffix", [this](Interp&, Args argv) {
    ctx_.arg_suffix = join_words(argv.subspan(1));
    sync_vars();
    return Result{};
  });
}

void Session::install_callback_builtins() {
  Interp& in = *interp_;
  for (const Phase phase : {Phase::pre, Phase::post}) {
    const std::string generic = phase == Phase::pre ? "hbs::AddPreCb" : "hbs::AddPostCb";
    in.register_builtin(generic, [this, phase, generic](Interp&, Args argv) {
      const std::string usage = generic + " stage command ?arg ...?";
      if (argv.size() < 3) wrong_args(usage);
      add_callback(argv[1], phase, argv.subspan(2), usage);
      return Result{};
    });
    for (const auto& spec : backends::all_backends()) {
      for (std::size_t i = 0; i < spec.stages.size(); ++i) {
        const std::string name = backends::callback_builtin(spec, i, phase);
        if (in.has_builtin(name)) continue;
        const std::string stage = spec.stages[i];
        in.register_builtin(name, [this, phase, name, stage](Interp&, Args argv) {
          add_callback(stage, phase, argv.subspan(1), name + " command ?arg ...?");
          return Result{};
        });
      }
    }
  }
}

}  // namespace hbs::flow
