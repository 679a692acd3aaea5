#include "hbs/tclish/list.hpp"

#include "hbs/error.hpp"

namespace hbs::tclish {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

void append_utf8(std::string& out, unsigned cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

}  // namespace

std::size_t decode_backslash(std::string_view src, std::size_t pos, std::string& out) {
  if (pos + 1 >= src.size()) {
    out += '\\';
    return 1;
  }
  const char c = src[pos + 1];
  switch (c) {
    case 'a': out += '\a'; return 2;
    case 'b': out += '\b'; return 2;
    case 'f': out += '\f'; return 2;
    case 'n': out += '\n'; return 2;
    case 'r': out += '\r'; return 2;
    case 't': out += '\t'; return 2;
    case 'v': out += '\v'; return 2;
    case '\n': {
      std::size_t i = pos + 2;
      while (i < src.size() && (src[i] == ' ' || src[i] == '\t')) ++i;
      out += ' ';
      return i - pos;
    }
    case 'x': {
      std::size_t i = pos + 2;
      unsigned value = 0;
      int digits = 0;
      while (i < src.size() && digits < 2 && hex_value(src[i]) >= 0) {
        value = value * 16 + static_cast<unsigned>(hex_value(src[i]));
        ++i;
        ++digits;
      }
      if (digits == 0) {
        out += 'x';
        return 2;
      }
      out += static_cast<char>(value);
      return i - pos;
    }
    case 'u': {
      std::size_t i = pos + 2;
      unsigned value = 0;
      int digits = 0;
      while (i < src.size() && digits < 4 && hex_value(src[i]) >= 0) {
        value = value * 16 + static_cast<unsigned>(hex_value(src[i]));
        ++i;
        ++digits;
      }
      if (digits == 0) {
        out += 'u';
        return 2;
      }
      append_utf8(out, value);
      return i - pos;
    }
    default:
      break;
  }
  if (c >= '0' && c <= '7') {
    std::size_t i = pos + 1;
    unsigned value = 0;
    int digits = 0;
    while (i < src.size() && digits < 3 && src[i] >= '0' && src[i] <= '7') {
      value = value * 8 + static_cast<unsigned>(src[i] - '0');
      ++i;
      ++digits;
    }
    out += static_cast<char>(value & 0xFF);
    return i - pos;
  }
  out += c;
  return 2;
}

std::vector<std::string> split_list(std::string_view list) {
  std::vector<std::string> elements;
  std::size_t i = 0;
  const std::size_t n = list.size();
  while (true) {
    while (i < n && is_space(list[i])) ++i;
    if (i >= n) break;
    std::string element;
    if (list[i] == '{') {
      int depth = 1;
      std::size_t j = i + 1;
      for (; j < n; ++j) {
        if (list[j] == '\\' && j + 1 < n) {
          ++j;
        } else if (list[j] == '{') {
          ++depth;
        } else if (list[j] == '}') {
          if (--depth == 0) break;
        }
      }
      if (j >= n) throw Error(Errc::user_error, "unmatched open brace in list");
      element.assign(list.substr(i + 1, j - i - 1));
      i = j + 1;
      if (i < n && !is_space(list[i])) {
        throw Error(Errc::user_error, "list element in braces followed by \"" +
                                          std::string(1, list[i]) + "\" instead of space");
      }
    } else if (list[i] == '"') {
      std::size_t j = i + 1;
      for (; j < n && list[j] != '"';) {
        if (list[j] == '\\') {
          j += decode_backslash(list, j, element);
        } else {
          element += list[j++];
        }
      }
      if (j >= n) throw Error(Errc::user_error, "unmatched open quote in list");
      i = j + 1;
      if (i < n && !is_space(list[i])) {
        throw Error(Errc::user_error, "list element in quotes followed by \"" +
                                          std::string(1, list[i]) + "\" instead of space");
      }
    } else {
      while (i < n && !is_space(list[i])) {
        if (list[i] == '\\') {
          i += decode_backslash(list, i, element);
        } else {
          element += list[i++];
        }
      }
    }
    elements.push_back(std::move(element));
  }
  return elements;
}

std::string quote_element(std::string_view element, bool first) {
  if (element.empty()) return "{}";

  bool forbid_none = false;
  bool prefer_brace = false;
  bool require_escape = false;
  int braces = 0;

  if (element.front() == '{' || element.front() == '"' || (first && element.front() == '#')) {
    forbid_none = true;
    prefer_brace = true;
  }
  for (std::size_t i = 0; i < element.size(); ++i) {
    const char c = element[i];
    switch (c) {
      case '{':
        ++braces;
        break;
      case '}':
        if (--braces < 0) require_escape = true;
        break;
      case ']':
      case '"':
        forbid_none = true;
        break;
      case '[':
      case '$':
      case ';':
        forbid_none = true;
        prefer_brace = true;
        break;
      case '\\':
        if (i + 1 == element.size() || element[i + 1] == '\n') {
          require_escape = true;
        } else {
          ++i;
        }
        forbid_none = true;
        prefer_brace = true;
        break;
      default:
        if (is_space(c)) {
          forbid_none = true;
          prefer_brace = true;
        }
        break;
    }
  }
  if (braces != 0) require_escape = true;
  if (require_escape) forbid_none = true;

  if (!forbid_none) return std::string(element);
  if (prefer_brace && !require_escape) {
    std::string out;
    out.reserve(element.size() + 2);
    out += '{';
    out += element;
    out += '}';
    return out;
  }

  std::string out;
  out.reserve(element.size() * 2);
  for (std::size_t i = 0; i < element.size(); ++i) {
    const char c = element[i];
    switch (c) {
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      case '\v': out += "\\v"; break;
      case '\f': out += "\\f"; break;
      case '{': case '}': case '[': case ']': case '$': case ';': case '"': case '\\': case ' ':
        out += '\\';
        out += c;
        break;
      case '#':
        if (i == 0 && first) out += '\\';
        out += c;
        break;
      default:
        out += c;
        break;
    }
  }
  return out;
}

std::string make_list(std::span<const std::string> elements) {
  std::string out;
  bool first = true;
  for (const auto& e : elements) {
    if (!first) out += ' ';
    out += quote_element(e, first);
    first = false;
  }
  return out;
}

std::string concat(std::span<const std::string> parts) {
  std::string out;
  for (const auto& part : parts) {
    std::size_t b = 0, e = part.size();
    while (b < e && is_space(part[b])) ++b;
    while (e > b && is_space(part[e - 1])) --e;
    if (b == e) continue;
    if (!out.empty()) out += ' ';
    out.append(part, b, e - b);
  }
  return out;
}

}  // namespace hbs::tclish
