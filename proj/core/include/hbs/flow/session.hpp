#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hbs/flow/context.hpp"
#include "hbs/registry/discovery.hpp"
#include "hbs/registry/registry.hpp"
#include "hbs/tclish/interp.hpp"

namespace hbs::flow {

struct SessionOptions {
  std::filesystem::path root = ".";      // where .hbs files are discovered
  std::filesystem::path work_dir = ".";  // build/ is created here
  bool dry_run = false;
  std::string tool_cmd;  // runs the generated script when non-empty
};

/// One flow: a private interpreter with every `hbs::*` command installed,
/// the sourced registry and the run context. Not shared between threads.
class Session {
 public:
  Session(SessionOptions options, tclish::OutputSink& out);
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  /// Discovers and sources the .hbs files under the root.
  void load();
  void load(const registry::DiscoveryList& list);

  const registry::Registry& registry() const { return registry_; }
  tclish::Interp& interp() { return *interp_; }
  RunContext& context() { return ctx_; }
  const SessionOptions& options() const { return options_; }

  /// Runs a target with its arguments. Errors propagate as hbs::Error.
  void run(std::string_view target, std::span<const std::string> argv);
  /// Dry-runs the target with all output discarded and returns the graph.
  DepGraph graph(std::string_view target, std::span<const std::string> argv);

  /// `<work_dir>/build/<target path as dirs>[/<argv hash>]`.
  static std::filesystem::path build_dir_for(const std::filesystem::path& work_dir,
                                             std::string_view target,
                                             std::span<const std::string> argv);

 private:
  struct Active {
    DepNode node;
    std::string saved_core;
    std::string saved_target;
  };

  void install_builtins();
  void install_state_builtins();
  void install_callback_builtins();
  void sync_vars();
  void on_call(const tclish::ProcDef& proc, std::span<const std::string> args, bool entering);
  void add_dep(std::span<const std::string> argv);
  void add_files(std::span<const std::string> paths);
  void set_tool(const std::string& tool);
  void add_callback(const std::string& stage, Phase phase, std::span<const std::string> words,
                    std::string_view usage);
  void run_stages(std::string_view through);
  void run_callbacks(const std::string& stage, Phase phase, bool trace);
  void run_callback(const Callback& cb);
  int spawn(const std::vector<std::string>& argv, const std::filesystem::path& cwd);

  SessionOptions options_;
  tclish::OutputSink& out_;
  std::unique_ptr<tclish::Interp> interp_;
  registry::RegistryBuilder builder_;
  registry::Registry registry_;
  RunContext ctx_;
  std::vector<Active> active_;
};

}  // namespace hbs::flow
