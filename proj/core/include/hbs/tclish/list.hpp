#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hbs::tclish {

/// Splits a Tcl list into its elements (brace, quote and backslash rules).
/// Throws Error(expr_syntax) style list errors as Errc::user_error with the
/// same wording Tcl uses.
std::vector<std::string> split_list(std::string_view list);

/// Quotes one element so that split_list() gives it back unchanged.
/// `first` enables quoting of a leading `#`.
std::string quote_element(std::string_view element, bool first = false);

/// Builds a canonical list from elements.
std::string make_list(std::span<const std::string> elements);

/// Tcl `concat`: trims each argument and joins the non-empty ones with a space.
std::string concat(std::span<const std::string> parts);

/// Decodes the backslash sequence starting at `src[pos]` (which must be a
/// backslash), appends the result to `out` and returns the number of source
/// characters consumed.
std::size_t decode_backslash(std::string_view src, std::size_t pos, std::string& out);

}  // namespace hbs::tclish
