#pragma once

// Parser internals shared with the expression evaluator.

#include <string>
#include <string_view>
#include <vector>

#include "hbs/tclish/ast.hpp"

namespace hbs::tclish::detail {

class Parser {
 public:
  Parser(std::string_view src, int first_line);

  Script parse_commands(bool in_bracket);

  /// Parses `"..."` starting at the opening quote. Leaves pos() after the
  /// closing quote; does not check what follows.
  Word parse_quoted_body();

  /// Parses `$name` starting at the `$`. Appends either a VarRef or a
  /// literal `$` to `parts`.
  void parse_variable(std::vector<Part>& parts);

  /// Parses `[script]` starting at the `[`.
  CmdSub parse_command_substitution();

  /// Parses `{...}` starting at the `{`; returns the raw contents.
  std::string parse_braced_body();

  std::size_t pos() const { return pos_; }
  void set_pos(std::size_t pos) { pos_ = pos; }
  int line_at(std::size_t pos) const;

 private:
  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return src_[pos_]; }
  Word parse_word(bool in_bracket);
  void skip_comment();
  [[noreturn]] void unbalanced(std::string_view what, std::size_t open_pos) const;

  std::string_view src_;
  std::size_t pos_ = 0;
  int first_line_;
  std::vector<std::size_t> newlines_;
};

void append_literal(std::vector<Part>& parts, std::string_view text);

}  // namespace hbs::tclish::detail
