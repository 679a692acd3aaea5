#pragma once

#include <string_view>

#include "hbs/tclish/ast.hpp"

namespace hbs::tclish {

/// Parses DSL source into commands. Throws Error(unbalanced_delimiter) with
/// the line of the opening delimiter when `{`, `[` or `"` is left open.
/// `first_line` offsets reported line numbers (used for proc bodies).
Script parse_script(std::string_view source, int first_line = 1);

}  // namespace hbs::tclish
