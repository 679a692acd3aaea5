#pragma once

#include <string_view>

namespace hbs {

enum class GlobSyntax {
  /// `*` and `?` only; every other character matches itself.
  basic,
  /// Tcl `string match`: adds `[chars]`, `[a-z]` and `\x` escapes.
  tcl,
};

/// Whole-string glob match. `*` also matches across `::` separators, so
/// `lib::*` selects every core below `lib`.
bool glob_match(std::string_view pattern, std::string_view text,
                GlobSyntax syntax = GlobSyntax::basic, bool nocase = false);

}  // namespace hbs
