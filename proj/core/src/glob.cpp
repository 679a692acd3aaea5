#include "hbs/glob.hpp"

#include <cctype>

namespace hbs {

namespace {

char fold(char c, bool nocase) {
  return nocase ? static_cast<char>(std::tolower(static_cast<unsigned char>(c))) : c;
}

// Matches a `[...]` class starting at pattern[p] (just past the `[`).
// Returns the index after the closing `]`, or npos on a malformed class.
// `matched` receives whether `c` belongs to the class.
std::size_t match_class(std::string_view pattern, std::size_t p, char c, bool nocase,
                        bool& matched) {
  matched = false;
  c = fold(c, nocase);
  while (p < pattern.size() && pattern[p] != ']') {
    char lo = pattern[p];
    if (lo == '\\' && p + 1 < pattern.size()) lo = pattern[++p];
    char hi = lo;
    if (p + 2 < pattern.size() && pattern[p + 1] == '-' && pattern[p + 2] != ']') {
      hi = pattern[p + 2];
      if (hi == '\\' && p + 3 < pattern.size()) {
        hi = pattern[p + 3];
        ++p;
      }
      p += 2;
    }
    lo = fold(lo, nocase);
    hi = fold(hi, nocase);
    if (lo > hi) std::swap(lo, hi);
    if (c >= lo && c <= hi) matched = true;
    ++p;
  }
  if (p >= pattern.size()) return std::string_view::npos;
  return p + 1;
}

}  // namespace

bool glob_match(std::string_view pattern, std::string_view text, GlobSyntax syntax,
                bool nocase) {
  // Iterative matcher with single-star backtracking; linear for the
  // patterns users type on the command line.
  std::size_t p = 0, t = 0;
  std::size_t star_p = std::string_view::npos, star_t = 0;
  const bool tcl = syntax == GlobSyntax::tcl;

  while (t < text.size()) {
    if (p < pattern.size()) {
      const char pc = pattern[p];
      if (pc == '*') {
        star_p = ++p;
        star_t = t;
        continue;
      }
      if (pc == '?') {
        ++p;
        ++t;
        continue;
      }
      if (tcl && pc == '[') {
        bool matched = false;
        const std::size_t next = match_class(pattern, p + 1, text[t], nocase, matched);
        if (next != std::string_view::npos && matched) {
          p = next;
          ++t;
          continue;
        }
      } else {
        char literal = pc;
        std::size_t width = 1;
        if (tcl && pc == '\\' && p + 1 < pattern.size()) {
          literal = pattern[p + 1];
          width = 2;
        }
        if (fold(literal, nocase) == fold(text[t], nocase)) {
          p += width;
          ++t;
          continue;
        }
      }
    }
    if (star_p == std::string_view::npos) return false;
    p = star_p;
    t = ++star_t;
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

}  // namespace hbs
