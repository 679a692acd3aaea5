#include "hbs/error.hpp"

namespace hbs {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::unbalanced_delimiter: return "UnbalancedDelimiter";
    case Errc::unknown_command: return "UnknownCommand";
    case Errc::undefined_variable: return "UndefinedVariable";
    case Errc::arity: return "ArityError";
    case Errc::expr_syntax: return "ExprSyntaxError";
    case Errc::type_error: return "TypeError";
    case Errc::duplicate_builtin: return "DuplicateBuiltin";
    case Errc::user_error: return "Error";
    case Errc::bad_exec: return "BadExec";
    case Errc::spawn_failure: return "SpawnFailure";
    case Errc::child_failure: return "ChildFailure";
    case Errc::nesting_limit: return "NestingLimit";
    case Errc::io_error: return "IoError";
    case Errc::register_outside_namespace: return "RegisterOutsideNamespace";
    case Errc::duplicate_core: return "DuplicateCore";
    case Errc::unknown_core: return "UnknownCore";
    case Errc::unknown_target: return "UnknownTarget";
    case Errc::not_in_target: return "NotInTarget";
    case Errc::dependency_cycle: return "DependencyCycle";
    case Errc::unknown_tool: return "UnknownTool";
    case Errc::tool_already_set: return "ToolAlreadySet";
    case Errc::tool_not_set: return "ToolNotSet";
    case Errc::invalid_severity: return "InvalidSeverity";
    case Errc::invalid_std: return "InvalidStd";
    case Errc::unknown_stage: return "UnknownStage";
    case Errc::file_not_found: return "FileNotFound";
    case Errc::top_not_set: return "TopNotSet";
    case Errc::non_vhdl_file: return "NonVhdlFile";
    case Errc::stage_failure: return "StageFailure";
    case Errc::mock_stage_failure: return "MockStageFailure";
    case Errc::panic: return "Panic";
    case Errc::no_tests_matched: return "NoTestsMatched";
    case Errc::usage: return "UsageError";
  }
  return "Error";
}

std::string Error::describe() const {
  std::string text = what();
  if (!where_.empty()) {
    text += "\n    at ";
    text += where_;
  }
  for (const auto& line : trace_) {
    text += "\n    ";
    text += line;
  }
  return text;
}

}  // namespace hbs
