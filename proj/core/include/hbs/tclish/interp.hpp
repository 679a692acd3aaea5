#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hbs/tclish/ast.hpp"
#include "hbs/tclish/output.hpp"

namespace hbs::tclish {

class Interp;

/// Completion code of a script. Errors are reported as hbs::Error exceptions.
enum class Code { ok, ret, brk, cont };

struct Result {
  Code code = Code::ok;
  std::string value;
};

struct Param {
  std::string name;
  std::optional<std::string> default_value;
};

struct ProcDef {
  std::string fq_name;  // without leading `::`
  std::string ns;       // namespace the body runs in
  std::vector<Param> params;
  bool has_rest = false;  // trailing `args`
  std::string body;
  int body_line = 1;
  std::string defining_file;
  std::string doc;

  std::string_view name() const;
  /// Tcl-style usage text, e.g. `f a ?b? ?arg ...?`.
  std::string usage(std::string_view invoked_as) const;

 private:
  friend class Interp;
  mutable std::shared_ptr<const Script> compiled_;
};

/// argv[0] is the command name as invoked.
using NativeFn = std::function<Result(Interp&, std::span<const std::string> argv)>;
/// Receives the unsubstituted command when no proc or builtin matches.
using UnknownHandler = std::function<Result(Interp&, const ScriptNode& node)>;
/// Called around every proc invocation; `args` excludes the command name.
using CallHook =
    std::function<void(const ProcDef& proc, std::span<const std::string> args, bool entering)>;
/// Consulted before `exec` spawns anything; returning true suppresses the call.
using ExecHook = std::function<bool(std::span<const std::string> argv)>;

/// Interpreter for the build-description DSL. One instance per flow; not
/// shared between threads, but movable to another thread before first use.
class Interp {
 public:
  explicit Interp(OutputSink& out);
  ~Interp();
  Interp(const Interp&) = delete;
  Interp& operator=(const Interp&) = delete;

  /// Throws Error(duplicate_builtin) when `name` is already a builtin.
  void register_builtin(std::string name, NativeFn fn);
  bool has_builtin(std::string_view name) const;

  /// Evaluates source text. A top-level `return` yields its value.
  std::string eval(std::string_view source, int first_line = 1);
  Result eval_script(const Script& script);
  /// Evaluates a file with `file` recorded as the defining file of every
  /// proc it creates.
  std::string source_file(const std::filesystem::path& file);

  std::string substitute(const Word& word);
  std::string eval_expr(std::string_view expr);
  bool eval_condition(std::string_view expr);

  /// Calls a proc by fully qualified name. Throws Error(unknown_command)
  /// when no such proc exists, Error(arity) on a bad argument count.
  std::string call_proc(std::string_view fq_name, std::span<const std::string> args);
  /// Resolves words[0] as a command (proc or builtin) and calls it.
  std::string invoke(std::span<const std::string> words);
  /// Fully qualified name `name` resolves to from the current namespace.
  std::optional<std::string> resolve_command(std::string_view name) const;

  std::string get_var(std::string_view name) const;
  std::optional<std::string> find_var(std::string_view name) const;
  void set_var(std::string_view name, std::string value);

  const std::string& current_namespace() const;
  bool namespace_exists(std::string_view ns) const;
  void ensure_namespace(std::string_view ns);
  /// Doc comment of the innermost enclosing `namespace eval`.
  const std::string& namespace_doc() const;
  std::vector<const ProcDef*> procs_in(std::string_view ns) const;
  const ProcDef* find_proc(std::string_view fq_name) const;

  /// Innermost executing proc, or null at top level.
  const ProcDef* current_proc() const;
  /// Command being evaluated right now.
  const ScriptNode* current_node() const { return current_node_; }
  const std::string& current_file() const;

  void set_unknown_handler(UnknownHandler handler) { unknown_ = std::move(handler); }
  bool has_unknown_handler() const { return static_cast<bool>(unknown_); }
  void set_call_hook(CallHook hook) { call_hook_ = std::move(hook); }
  void set_exec_hook(ExecHook hook) { exec_hook_ = std::move(hook); }
  const ExecHook& exec_hook() const { return exec_hook_; }

  OutputSink& out() { return *out_; }
  void set_output(OutputSink& out) { out_ = &out; }

  // Used by the builtin commands.
  struct Frame;
  void define_proc(std::string_view name, std::string_view params, std::string body, int body_line,
                   std::string doc);
  Result eval_in_namespace(std::string_view ns, std::string_view script, int first_line,
                           std::string doc);
  Result eval_cached(std::string_view source, int first_line);

 private:
  Result eval_node(const ScriptNode& node);
  Result dispatch(const std::string& fq, std::span<const std::string> argv);
  std::string call_proc_impl(const ProcDef& proc, std::span<const std::string> argv);
  std::string qualify(std::string_view name) const;

  using VarTable = std::map<std::string, std::string, std::less<>>;
  const std::string* lookup_var(std::string_view name) const;
  VarTable& table_for_write(std::string_view name, std::string& key);

  OutputSink* out_;
  std::map<std::string, VarTable, std::less<>> namespaces_;
  std::map<std::string, std::unique_ptr<ProcDef>, std::less<>> procs_;
  std::vector<std::unique_ptr<ProcDef>> replaced_procs_;  // may still be on the stack
  std::map<std::string, NativeFn, std::less<>> builtins_;
  std::vector<std::unique_ptr<Frame>> frames_;
  std::unordered_map<std::string, std::shared_ptr<const Script>> script_cache_;
  UnknownHandler unknown_;
  CallHook call_hook_;
  ExecHook exec_hook_;
  const ScriptNode* current_node_ = nullptr;
  int depth_ = 0;
};

void install_standard_builtins(Interp& interp);

}  // namespace hbs::tclish
