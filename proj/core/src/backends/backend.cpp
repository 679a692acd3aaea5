#include "hbs/backends/backend.hpp"

#include <fstream>

#include "json.hpp"

#include "hbs/error.hpp"
#include "hbs/tclish/list.hpp"

namespace hbs::backends {

std::string_view backend_kind_name(BackendKind kind) {
  return kind == BackendKind::direct_exec ? "direct-exec" : "script-gen";
}

int BackendSpec::stage_index(std::string_view stage) const {
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (stages[i] == stage) return static_cast<int>(i);
  }
  return -1;
}

const std::vector<BackendSpec>& all_backends() {
  static const std::vector<BackendSpec> specs = [] {
    const std::vector<std::string> sim{"analysis", "elaboration", "simulation"};
    const std::vector<std::string> sim_tags{"Analysis", "Elab", "Sim"};
    const std::vector<std::string> prj{"project", "synthesis", "implementation", "bitstream"};
    const std::vector<std::string> prj_tags{"Prj", "Synth", "Impl", "Bit"};
    return std::vector<BackendSpec>{
        {"ghdl", BackendKind::direct_exec, sim, sim_tags, true,
         "GHDL simulator, driven by spawning ghdl for each stage"},
        {"mock-prj", BackendKind::script_gen, prj, prj_tags, false,
         "test double for script-generating tools"},
        {"mock-sim", BackendKind::direct_exec, sim, sim_tags, false,
         "test double for simulators; stage commands set with hbs::mock::SetStageCmd"},
        {"vivado-prj", BackendKind::script_gen, prj, prj_tags, false,
         "Vivado project mode; emits a Tcl script for vivado -mode batch"},
    };
  }();
  return specs;
}

const BackendSpec& backend_for(std::string_view tool) {
  std::string known;
  for (const auto& spec : all_backends()) {
    if (spec.name == tool) return spec;
    if (!known.empty()) known += ", ";
    known += spec.name;
  }
  throw Error(Errc::unknown_tool,
              "unknown tool \"" + std::string(tool) + "\", known tools: " + known);
}

std::string callback_builtin(const BackendSpec& spec, std::size_t stage, flow::Phase phase) {
  return std::string("hbs::Add") + (phase == flow::Phase::pre ? "Pre" : "Post") +
         spec.stage_tags.at(stage) + "Cb";
}

std::string command_line(const Argv& argv) {
  std::string out;
  for (const auto& word : argv) {
    if (word.empty()) continue;
    if (!out.empty()) out += ' ';
    out += word;
  }
  return out;
}

std::string ghdl_std(std::string_view std) {
  if (std.size() == 4) return std::string(std.substr(2));
  return std::string(std);
}

namespace {

void append_words(Argv& argv, const std::string& text) {
  for (auto& w : tclish::split_list(text)) argv.push_back(std::move(w));
}

Argv ghdl_base(const flow::RunContext& ctx, std::string_view mode) {
  Argv argv{"ghdl", std::string(mode)};
  append_words(argv, ctx.arg_prefix);
  argv.push_back("--std=" + ghdl_std(ctx.std));
  argv.push_back("--workdir=work");
  return argv;
}

bool uses_libraries(const flow::RunContext& ctx) {
  for (const auto& f : ctx.files) {
    if (!f.lib.empty()) return true;
  }
  return false;
}

}  // namespace

std::vector<Argv> ghdl_stage_commands(const flow::RunContext& ctx, std::string_view stage) {
  const bool libs = uses_libraries(ctx);
  std::vector<Argv> out;
  if (stage == "analysis") {
    for (const auto& f : ctx.files) {
      if (f.kind != flow::FileKind::vhdl) {
        throw Error(Errc::non_vhdl_file, "ghdl cannot analyse " + f.path.string() + " (" +
                                             std::string(flow::file_kind_name(f.kind)) + ")");
      }
      Argv argv = ghdl_base(ctx, "-a");
      if (!f.lib.empty()) argv.push_back("--work=" + f.lib);
      if (libs) argv.push_back("-Pwork");
      append_words(argv, ctx.arg_suffix);
      argv.push_back(f.path.string());
      out.push_back(std::move(argv));
    }
    return out;
  }
  if (ctx.top.empty()) throw Error(Errc::top_not_set, "top not set for ghdl " + std::string(stage));
  Argv argv = ghdl_base(ctx, stage == "elaboration" ? "-e" : "-r");
  if (libs) argv.push_back("-Pwork");
  append_words(argv, ctx.arg_suffix);
  argv.push_back(ctx.top);
  if (stage == "simulation") {
    for (const auto& [name, value] : ctx.generics) argv.push_back("-g" + name + "=" + value);
    if (!ctx.exit_severity.empty()) argv.push_back("--assert-level=" + ctx.exit_severity);
  }
  out.push_back(std::move(argv));
  return out;
}

void append_trace(const flow::RunContext& ctx, const TraceRecord& r) {
  nlohmann::ordered_json j;
  j["stage"] = r.stage;
  j["phase"] = r.phase;
  j["command"] = r.command;
  j["exit"] = r.exit;
  j["t_start"] = r.t_start;
  j["t_end"] = r.t_end;
  std::ofstream out(ctx.build_dir / "trace.jsonl", std::ios::app);
  out << j.dump() << '\n';
  if (!out) throw Error(Errc::io_error, "cannot write " + (ctx.build_dir / "trace.jsonl").string());
}

std::vector<TraceRecord> read_trace(const std::filesystem::path& file) {
  std::vector<TraceRecord> out;
  std::ifstream in(file);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    out.push_back({j.at("stage"), j.at("phase"), j.at("command"), j.at("exit"), j.at("t_start"),
                   j.at("t_end")});
  }
  return out;
}

}  // namespace hbs::backends
