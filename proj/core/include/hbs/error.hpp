#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hbs {

/// Every failure the build system can report. Interpreter errors, registry
/// errors and flow errors share one type so that a DSL `catch` can trap any
/// of them and the CLI can map them onto exit codes in one place.
enum class Errc {
  // tclish
  unbalanced_delimiter,
  unknown_command,
  undefined_variable,
  arity,
  expr_syntax,
  type_error,
  duplicate_builtin,
  user_error,  // the `error` command
  bad_exec,    // unsupported redirection or malformed exec
  spawn_failure,
  child_failure,
  nesting_limit,
  // registry
  io_error,
  register_outside_namespace,
  duplicate_core,
  unknown_core,
  // flow / backends
  unknown_target,
  not_in_target,
  dependency_cycle,
  unknown_tool,
  tool_already_set,
  tool_not_set,
  invalid_severity,
  invalid_std,
  unknown_stage,
  file_not_found,
  top_not_set,
  non_vhdl_file,
  stage_failure,
  mock_stage_failure,
  panic,
  // testrunner / cli
  no_tests_matched,
  usage,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  Errc code() const noexcept { return code_; }

  /// Innermost source location, e.g. `ip/edge/edge.hbs:12`. Empty until the
  /// interpreter attaches one.
  const std::string& where() const noexcept { return where_; }
  void set_where(std::string where) { where_ = std::move(where); }

  /// Call-chain notes appended while the error unwinds through procs.
  const std::vector<std::string>& trace() const noexcept { return trace_; }
  void add_trace(std::string line) { trace_.push_back(std::move(line)); }

  /// Message plus location and trace, one item per line.
  std::string describe() const;

 private:
  Errc code_;
  std::string where_;
  std::vector<std::string> trace_;
};

}  // namespace hbs
