#include "hbs/backends/backend.hpp"

#include <set>

#include "hbs/error.hpp"
#include "hbs/tclish/list.hpp"

namespace hbs::backends {

using flow::Callback;
using flow::FileKind;
using flow::Phase;
using flow::RunContext;
using tclish::make_list;
using tclish::quote_element;

namespace {

std::string_view strip_absolute(std::string_view name) {
  while (name.starts_with("::")) name.remove_prefix(2);
  return name;
}

bool is_hdl(FileKind kind) {
  return kind == FileKind::vhdl || kind == FileKind::verilog || kind == FileKind::systemverilog;
}

std::string read_line(const flow::FileEntry& f) {
  const std::string path = quote_element(f.path.string(), false);
  switch (f.kind) {
    case FileKind::vhdl:
      if (f.std == "2008") return "read_vhdl -vhdl2008 " + path;
      if (f.std == "2019") return "read_vhdl -vhdl2019 " + path;
      return "read_vhdl " + path;
    case FileKind::verilog: return "read_verilog " + path;
    case FileKind::systemverilog: return "read_verilog -sv " + path;
    case FileKind::constraint_xdc: return "read_xdc " + path;
    case FileKind::tcl: return "source " + path;
    case FileKind::constraint_sdc:
    case FileKind::other: break;
  }
  return "add_files " + path;
}

std::string proc_definition(const tclish::ProcDef& proc) {
  std::vector<std::string> params;
  for (const auto& p : proc.params) {
    if (p.default_value) {
      params.push_back(make_list(std::vector<std::string>{p.name, *p.default_value}));
    } else {
      params.push_back(p.name);
    }
  }
  if (proc.has_rest) params.push_back("args");
  return "proc ::" + proc.fq_name + " " + quote_element(make_list(params), false) + " {" +
         proc.body + "}\n";
}

class Emitter {
 public:
  Emitter(const RunContext& ctx, const BackendSpec& spec, int through,
          const tclish::Interp* interp)
      : ctx_(ctx), spec_(spec), through_(through), interp_(interp) {}

  std::string emit() {
    out_ += "# hbs " + spec_.name + " script";
    if (!ctx_.root_target.empty()) out_ += " for " + ctx_.root_target;
    out_ += ", through stage " + spec_.stages[through_] + "\n";
    emit_proc_definitions();

    for (int i = 0; i <= through_; ++i) {
      const std::string& stage = spec_.stages[i];
      emit_calls(stage, Phase::pre);
      if (i == 0) {
        emit_project();
      } else {
        emit_stage(stage);
      }
      emit_calls(stage, Phase::post);
    }
    return std::move(out_);
  }

 private:
  bool mock() const { return spec_.name == "mock-prj"; }

  const tclish::ProcDef* user_proc(const Callback& cb) const {
    return interp_ ? interp_->find_proc(strip_absolute(cb.command)) : nullptr;
  }
  bool native(const Callback& cb) const {
    return interp_ && !user_proc(cb) && interp_->has_builtin(strip_absolute(cb.command));
  }

  void emit_proc_definitions() {
    std::set<std::string> seen;
    for (int i = 0; i <= through_; ++i) {
      for (const Phase phase : {Phase::pre, Phase::post}) {
        for (const auto& cb : ctx_.callbacks_for(spec_.stages[i], phase)) {
          const tclish::ProcDef* proc = user_proc(cb);
          if (proc && seen.insert(proc->fq_name).second) {
            out_ += "\n" + proc_definition(*proc);
          }
        }
      }
    }
    out_ += "\n";
  }

  void emit_calls(const std::string& stage, Phase phase) {
    for (const auto& cb : ctx_.callbacks_for(stage, phase)) {
      if (native(cb)) continue;
      std::vector<std::string> words{cb.command};
      words.insert(words.end(), cb.args.begin(), cb.args.end());
      out_ += make_list(words) + "\n";
    }
  }

  void emit_unknowns(std::size_t files_before) {
    for (const auto& u : ctx_.unknown_log) {
      if (u.files_before == files_before) out_ += u.text + "\n";
    }
  }

  void emit_project() {
    if (mock()) {
      out_ += "# mock stage: project\n";
    } else {
      out_ += "create_project -force hbs-project .";
      if (!ctx_.device.empty()) out_ += " -part " + quote_element(ctx_.device, false);
      out_ += "\n";
    }
    emit_unknowns(0);
    for (std::size_t i = 0; i < ctx_.files.size(); ++i) {
      const auto& f = ctx_.files[i];
      out_ += read_line(f) + "\n";
      if (is_hdl(f.kind) && !f.lib.empty()) {
        out_ += "set_property LIBRARY " + quote_element(f.lib, false) + " [get_files " +
                quote_element(f.path.string(), false) + "]\n";
      }
      emit_unknowns(i + 1);
    }
    if (!ctx_.top.empty()) {
      out_ += "set_property top " + quote_element(ctx_.top, false) + " [current_fileset]\n";
    }
    if (!ctx_.generics.empty()) {
      std::vector<std::string> items;
      for (const auto& [name, value] : ctx_.generics) items.push_back(name + "=" + value);
      out_ += "set_property generic " + quote_element(make_list(items), false) +
              " [current_fileset]\n";
    }
  }

  void emit_stage(const std::string& stage) {
    if (mock()) {
      out_ += "# mock stage: " + stage + "\n";
    } else if (stage == "synthesis") {
      out_ += "launch_runs synth_1\nwait_on_run synth_1\n";
    } else if (stage == "implementation") {
      out_ += "launch_runs impl_1\nwait_on_run impl_1\n";
    } else if (stage == "bitstream") {
      out_ += "launch_runs impl_1 -to_step write_bitstream\nwait_on_run impl_1\n";
    }
  }

  const RunContext& ctx_;
  const BackendSpec& spec_;
  int through_;
  const tclish::Interp* interp_;
  std::string out_;
};

// Backslash-escapes a substituted segment that shares a word with verbatim
// `[...]` text, so the word stays one bare word.
std::string escape_bare(std::string_view text) {
  std::string out;
  for (const char c : text) {
    switch (c) {
      case '\n': out += "\\n"; continue;
      case '\t': out += "\\t"; continue;
      case ' ': case '\\': case '$': case '[': case ']': case '"': case '{': case '}': case ';':
        out += '\\';
        break;
      default: break;
    }
    out += c;
  }
  return out;
}

bool unknown_command(tclish::Interp& interp, const tclish::Script& script) {
  if (script.size() != 1) return false;
  return !interp.resolve_command(interp.substitute(script.front().words.front()));
}

std::string render_word(tclish::Interp& interp, const tclish::Word& word, bool first) {
  using tclish::Word;
  if (word.form == Word::Form::braced) {
    return "{" + std::get<tclish::Braced>(word.parts.front()).text + "}";
  }
  struct Segment {
    std::string text;
    bool raw;
  };
  std::vector<Segment> segs;
  bool any_raw = false;
  for (const auto& part : word.parts) {
    if (const auto* sub = std::get_if<tclish::CmdSub>(&part)) {
      if (unknown_command(interp, *sub->script)) {
        segs.push_back({"[" + render_unknown(interp, sub->script->front()) + "]", true});
        any_raw = true;
        continue;
      }
    }
    tclish::Word single;
    single.parts.push_back(part);
    segs.push_back({interp.substitute(single), false});
  }
  std::string out;
  if (!any_raw) {
    for (const auto& s : segs) out += s.text;
    return quote_element(out, first);
  }
  for (const auto& s : segs) out += s.raw ? s.text : escape_bare(s.text);
  return out;
}

}  // namespace

std::string scriptgen_emit(const RunContext& ctx, const BackendSpec& spec,
                           std::string_view through, const tclish::Interp* interp) {
  const int idx = spec.stage_index(through);
  if (idx < 0) {
    throw Error(Errc::unknown_stage,
                "unknown stage \"" + std::string(through) + "\" for tool " + spec.name);
  }
  return Emitter(ctx, spec, idx, interp).emit();
}

std::string render_unknown(tclish::Interp& interp, const tclish::ScriptNode& node) {
  std::string out;
  for (std::size_t i = 0; i < node.words.size(); ++i) {
    if (i) out += ' ';
    out += render_word(interp, node.words[i], i == 0);
  }
  return out;
}

}  // namespace hbs::backends
