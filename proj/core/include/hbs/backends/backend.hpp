#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hbs/flow/context.hpp"
#include "hbs/tclish/interp.hpp"

namespace hbs::backends {

enum class BackendKind { direct_exec, script_gen };
std::string_view backend_kind_name(BackendKind kind);

struct BackendSpec {
  std::string name;
  BackendKind kind = BackendKind::direct_exec;
  std::vector<std::string> stages;
  /// Short stage names used in callback builtins, e.g. `Synth` in
  /// `hbs::AddPostSynthCb`. Parallel to `stages`.
  std::vector<std::string> stage_tags;
  bool requires_top = false;
  std::string summary;

  const std::string& final_stage() const { return stages.back(); }
  /// Index of `stage`, or -1.
  int stage_index(std::string_view stage) const;
};

/// Throws Error(unknown_tool) naming the known tools.
const BackendSpec& backend_for(std::string_view tool);
const std::vector<BackendSpec>& all_backends();

/// `hbs::AddPreSynthCb` style name for one stage of a backend.
std::string callback_builtin(const BackendSpec& spec, std::size_t stage, flow::Phase phase);

using Argv = std::vector<std::string>;

/// Space-joined command line; empty words are dropped.
std::string command_line(const Argv& argv);

/// `--std=` token: `2008` -> `08`.
std::string ghdl_std(std::string_view std);

/// Commands for one GHDL stage: one per VHDL file for analysis, one
/// otherwise. Throws Error(top_not_set) / Error(non_vhdl_file).
std::vector<Argv> ghdl_stage_commands(const flow::RunContext& ctx, std::string_view stage);

/// The script a script-gen backend runs, covering stages up to `through`.
/// Callbacks naming user procs are emitted as proc definitions plus calls;
/// `interp` supplies the definitions and may be null.
std::string scriptgen_emit(const flow::RunContext& ctx, const BackendSpec& spec,
                           std::string_view through, const tclish::Interp* interp);

/// Text of an unknown command for passthrough: variables and known command
/// substitutions are replaced, nested unknown commands stay as `[...]`.
std::string render_unknown(tclish::Interp& interp, const tclish::ScriptNode& node);

struct TraceRecord {
  std::string stage;
  std::string phase;  // pre, stage or post
  std::string command;
  int exit = 0;
  double t_start = 0;  // seconds since the epoch
  double t_end = 0;
};

/// Appends one JSON line to `<buildDir>/trace.jsonl`.
void append_trace(const flow::RunContext& ctx, const TraceRecord& record);
std::vector<TraceRecord> read_trace(const std::filesystem::path& file);

}  // namespace hbs::backends
