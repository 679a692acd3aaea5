#include "hbs/tclish/parser.hpp"

#include <algorithm>
#include <cctype>

#include "hbs/error.hpp"
#include "hbs/tclish/list.hpp"
#include "parser_impl.hpp"

namespace hbs::tclish {

namespace detail {

namespace {

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string comment_text(std::string_view raw) {
  while (!raw.empty() && raw.front() == '#') raw.remove_prefix(1);
  return std::string(trim(raw));
}

}  // namespace

void append_literal(std::vector<Part>& parts, std::string_view text) {
  if (text.empty()) return;
  if (!parts.empty()) {
    if (auto* lit = std::get_if<Literal>(&parts.back())) {
      lit->text += text;
      return;
    }
  }
  parts.emplace_back(Literal{std::string(text)});
}

Parser::Parser(std::string_view src, int first_line) : src_(src), first_line_(first_line) {
  for (std::size_t i = 0; i < src_.size(); ++i) {
    if (src_[i] == '\n') newlines_.push_back(i);
  }
}

int Parser::line_at(std::size_t pos) const {
  const auto it = std::lower_bound(newlines_.begin(), newlines_.end(), pos);
  return first_line_ + static_cast<int>(it - newlines_.begin());
}

void Parser::unbalanced(std::string_view what, std::size_t open_pos) const {
  Error err(Errc::unbalanced_delimiter, std::string(what));
  err.set_where("line " + std::to_string(line_at(open_pos)));
  throw err;
}

void Parser::skip_comment() {
  while (!at_end()) {
    const char c = peek();
    if (c == '\\' && pos_ + 1 < src_.size()) {
      pos_ += 2;
      continue;
    }
    if (c == '\n') break;
    ++pos_;
  }
}

Script Parser::parse_commands(bool in_bracket) {
  Script script;
  std::string pending_doc;
  int last_comment_line = -1;

  while (true) {
    while (!at_end()) {
      const char c = peek();
      if (is_blank(c) || c == ';' || c == '\n') {
        ++pos_;
      } else if (c == '\\' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') {
        pos_ += 2;
      } else {
        break;
      }
    }
    if (at_end()) return script;
    if (in_bracket && peek() == ']') return script;

    const int line = line_at(pos_);
    if (peek() == '#') {
      const std::size_t start = pos_;
      skip_comment();
      const std::string text = comment_text(src_.substr(start, pos_ - start));
      if (!pending_doc.empty() && line == last_comment_line + 1) {
        pending_doc += '\n';
        pending_doc += text;
      } else {
        pending_doc = text;
      }
      last_comment_line = line_at(pos_);
      continue;
    }

    ScriptNode node;
    node.line = line;
    if (!pending_doc.empty() && line == last_comment_line + 1) node.doc = std::move(pending_doc);
    pending_doc.clear();

    const std::size_t start = pos_;
    while (true) {
      while (!at_end()) {
        const char c = peek();
        if (is_blank(c)) {
          ++pos_;
        } else if (c == '\\' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') {
          pos_ += 2;
        } else {
          break;
        }
      }
      if (at_end()) break;
      const char c = peek();
      if (c == '\n' || c == ';') break;
      if (in_bracket && c == ']') break;
      node.words.push_back(parse_word(in_bracket));
    }
    node.source = std::string(trim(src_.substr(start, pos_ - start)));
    if (!node.words.empty()) script.push_back(std::move(node));
  }
}

Word Parser::parse_word(bool in_bracket) {
  Word word;
  word.line = line_at(pos_);
  const auto check_follow = [&](std::string_view what) {
    if (at_end()) return;
    const char c = peek();
    if (is_blank(c) || c == '\n' || c == ';' || (in_bracket && c == ']')) return;
    if (c == '\\' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') return;
    Error err(Errc::unbalanced_delimiter, std::string("extra characters after close-") +
                                              std::string(what));
    err.set_where("line " + std::to_string(line_at(pos_)));
    throw err;
  };

  if (peek() == '{') {
    word.form = Word::Form::braced;
    word.parts.emplace_back(Braced{parse_braced_body()});
    check_follow("brace");
    return word;
  }
  if (peek() == '"') {
    word = parse_quoted_body();
    check_follow("quote");
    return word;
  }

  word.form = Word::Form::bare;
  std::string literal;
  const auto flush = [&] {
    append_literal(word.parts, literal);
    literal.clear();
  };
  while (!at_end()) {
    const char c = peek();
    if (is_blank(c) || c == '\n' || c == ';') break;
    if (in_bracket && c == ']') break;
    if (c == '$') {
      flush();
      parse_variable(word.parts);
    } else if (c == '[') {
      flush();
      word.parts.emplace_back(parse_command_substitution());
    } else if (c == '\\') {
      if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '\n') break;
      pos_ += decode_backslash(src_, pos_, literal);
    } else {
      literal += c;
      ++pos_;
    }
  }
  flush();
  return word;
}

std::string Parser::parse_braced_body() {
  const std::size_t open = pos_;
  ++pos_;
  int depth = 1;
  std::string text;
  while (!at_end()) {
    const char c = peek();
    if (c == '\\' && pos_ + 1 < src_.size()) {
      if (src_[pos_ + 1] == '\n') {
        pos_ += 2;
        while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
        text += ' ';
      } else {
        text += c;
        text += src_[pos_ + 1];
        pos_ += 2;
      }
      continue;
    }
    if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) {
        ++pos_;
        return text;
      }
    }
    text += c;
    ++pos_;
  }
  unbalanced("missing close-brace", open);
}

Word Parser::parse_quoted_body() {
  Word word;
  word.form = Word::Form::quoted;
  word.line = line_at(pos_);
  const std::size_t open = pos_;
  ++pos_;
  std::string literal;
  const auto flush = [&] {
    append_literal(word.parts, literal);
    literal.clear();
  };
  while (!at_end()) {
    const char c = peek();
    if (c == '"') {
      ++pos_;
      flush();
      return word;
    }
    if (c == '$') {
      flush();
      parse_variable(word.parts);
    } else if (c == '[') {
      flush();
      word.parts.emplace_back(parse_command_substitution());
    } else if (c == '\\') {
      pos_ += decode_backslash(src_, pos_, literal);
    } else {
      literal += c;
      ++pos_;
    }
  }
  unbalanced("missing \"", open);
}

void Parser::parse_variable(std::vector<Part>& parts) {
  const std::size_t dollar = pos_;
  ++pos_;
  if (!at_end() && peek() == '{') {
    const std::size_t close = src_.find('}', pos_);
    if (close == std::string_view::npos) unbalanced("missing close-brace for variable name", dollar);
    parts.emplace_back(VarRef{std::string(src_.substr(pos_ + 1, close - pos_ - 1))});
    pos_ = close + 1;
    return;
  }
  std::string name;
  while (!at_end()) {
    const char c = peek();
    if (is_name_char(c)) {
      name += c;
      ++pos_;
    } else if (c == ':' && pos_ + 1 < src_.size() && src_[pos_ + 1] == ':') {
      while (!at_end() && peek() == ':') {
        name += ':';
        ++pos_;
      }
    } else {
      break;
    }
  }
  if (name.empty()) {
    append_literal(parts, "$");
    return;
  }
  parts.emplace_back(VarRef{std::move(name)});
}

CmdSub Parser::parse_command_substitution() {
  const std::size_t open = pos_;
  ++pos_;
  Script script = parse_commands(true);
  if (at_end()) unbalanced("missing close-bracket", open);
  const std::size_t close = pos_;
  ++pos_;
  return CmdSub{std::make_shared<const Script>(std::move(script)),
                std::string(src_.substr(open + 1, close - open - 1))};
}

}  // namespace detail

Script parse_script(std::string_view source, int first_line) {
  detail::Parser parser(source, first_line);
  return parser.parse_commands(false);
}

}  // namespace hbs::tclish
