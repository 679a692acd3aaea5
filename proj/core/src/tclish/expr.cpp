// Expression evaluator for `expr`, `if` and friends.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>

#include "hbs/error.hpp"
#include "hbs/tclish/interp.hpp"
#include "parser_impl.hpp"

namespace hbs::tclish {

namespace {

struct Number {
  bool is_int = true;
  std::int64_t i = 0;
  double d = 0.0;

  double as_double() const { return is_int ? static_cast<double>(i) : d; }
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<Number> parse_number(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  std::string_view body = text;
  bool negative = false;
  if (body.front() == '+' || body.front() == '-') {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  if (body.empty()) return std::nullopt;

  if (body.size() > 2 && body[0] == '0' && (body[1] == 'x' || body[1] == 'X')) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(body.data() + 2, body.data() + body.size(), value, 16);
    if (ec != std::errc{} || ptr != body.data() + body.size()) return std::nullopt;
    Number n;
    n.i = negative ? -static_cast<std::int64_t>(value) : static_cast<std::int64_t>(value);
    return n;
  }

  bool all_digits = true;
  for (char c : body) {
    if (c < '0' || c > '9') {
      all_digits = false;
      break;
    }
  }
  if (all_digits) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
    if (ec == std::errc{} && ptr == body.data() + body.size()) {
      Number n;
      n.i = negative ? static_cast<std::int64_t>(0 - value) : static_cast<std::int64_t>(value);
      return n;
    }
  }

  // Floating point: digits, optional fraction, optional exponent, or Inf.
  const std::string buffer(text);
  char* end = nullptr;
  const double d = std::strtod(buffer.c_str(), &end);
  if (end != buffer.c_str() + buffer.size()) return std::nullopt;
  if (std::isnan(d)) return std::nullopt;
  for (char c : body) {
    if (c == 'x' || c == 'X' || c == 'p' || c == 'P') return std::nullopt;
  }
  Number n;
  n.is_int = false;
  n.d = d;
  return n;
}

std::string format_number(const Number& n) {
  if (n.is_int) return std::to_string(n.i);
  if (std::isinf(n.d)) return n.d > 0 ? "Inf" : "-Inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, n.d);
  std::string out(buf, ptr);
  if (out.find_first_of(".eE") == std::string::npos) out += ".0";
  return out;
}

std::optional<bool> parse_boolean(std::string_view text) {
  if (const auto n = parse_number(text)) return n->as_double() != 0.0;
  std::string lower;
  for (char c : trim(text)) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower.empty()) return std::nullopt;
  const auto prefix_of = [&](std::string_view word, std::size_t min) {
    return lower.size() >= min && lower.size() <= word.size() && word.substr(0, lower.size()) == lower;
  };
  if (prefix_of("true", 1) || prefix_of("yes", 1) || lower == "on") return true;
  if (prefix_of("false", 1) || prefix_of("no", 1) || prefix_of("off", 2)) return false;
  return std::nullopt;
}

class ExprEvaluator {
 public:
  ExprEvaluator(Interp& interp, std::string_view src) : interp_(interp), src_(src) {}

  std::string run() {
    std::string value = ternary(true);
    skip_space();
    if (pos_ < src_.size()) syntax_error("extra tokens at end of expression");
    return value;
  }

 private:
  [[noreturn]] void syntax_error(std::string_view detail) const {
    throw Error(Errc::expr_syntax, "syntax error in expression \"" + std::string(src_) +
                                       "\": " + std::string(detail));
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool match(std::string_view op) {
    skip_space();
    if (src_.substr(pos_, op.size()) != op) return false;
    // Keep `*` from eating the first half of `**`, `<` from `<=`, etc.
    const char next = pos_ + op.size() < src_.size() ? src_[pos_ + op.size()] : '\0';
    if ((op == "*" && next == '*') || ((op == "<" || op == ">") && next == '=') ||
        (op == "=" && next == '=') || (op == "!" && next == '=') || (op == "&" && next == '&') ||
        (op == "|" && next == '|')) {
      return false;
    }
    if (std::isalpha(static_cast<unsigned char>(op.front())) &&
        (std::isalnum(static_cast<unsigned char>(next)) || next == '_')) {
      return false;
    }
    pos_ += op.size();
    return true;
  }

  Number numeric(const std::string& value, std::string_view op) const {
    if (const auto n = parse_number(value)) return *n;
    if (trim(value).empty()) {
      throw Error(Errc::type_error, "can't use empty string as operand of \"" + std::string(op) + "\"");
    }
    throw Error(Errc::type_error, "can't use non-numeric string as operand of \"" + std::string(op) + "\"");
  }

  bool truth(const std::string& value) const {
    if (const auto b = parse_boolean(value)) return *b;
    throw Error(Errc::type_error, "expected boolean value but got \"" + value + "\"");
  }

  std::string ternary(bool live) {
    std::string cond = logical_or(live);
    if (!match("?")) return cond;
    const bool take = live && truth(cond);
    std::string a = ternary(live && take);
    if (!match(":")) syntax_error("missing \":\" in ternary");
    std::string b = ternary(live && !take);
    if (!live) return {};
    return take ? a : b;
  }

  std::string logical_or(bool live) {
    std::string lhs = logical_and(live);
    while (match("||")) {
      const bool left = live && truth(lhs);
      std::string rhs = logical_and(live && !left);
      if (live) lhs = (left || truth(rhs)) ? "1" : "0";
    }
    return lhs;
  }

  std::string logical_and(bool live) {
    std::string lhs = string_eq(live);
    while (match("&&")) {
      const bool left = live && truth(lhs);
      std::string rhs = string_eq(live && left);
      if (live) lhs = (left && truth(rhs)) ? "1" : "0";
    }
    return lhs;
  }

  std::string string_eq(bool live) {
    std::string lhs = equality(live);
    while (true) {
      bool equal;
      if (match("eq")) {
        equal = true;
      } else if (match("ne")) {
        equal = false;
      } else {
        return lhs;
      }
      std::string rhs = equality(live);
      if (live) lhs = ((lhs == rhs) == equal) ? "1" : "0";
    }
  }

  int compare(const std::string& a, const std::string& b) const {
    const auto na = parse_number(a);
    const auto nb = parse_number(b);
    if (na && nb) {
      if (na->is_int && nb->is_int) return na->i < nb->i ? -1 : (na->i > nb->i ? 1 : 0);
      const double x = na->as_double(), y = nb->as_double();
      return x < y ? -1 : (x > y ? 1 : 0);
    }
    const int c = a.compare(b);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }

  std::string equality(bool live) {
    std::string lhs = relational(live);
    while (true) {
      bool want_equal;
      if (match("==")) {
        want_equal = true;
      } else if (match("!=")) {
        want_equal = false;
      } else {
        return lhs;
      }
      std::string rhs = relational(live);
      if (live) lhs = ((compare(lhs, rhs) == 0) == want_equal) ? "1" : "0";
    }
  }

  std::string relational(bool live) {
    std::string lhs = additive(live);
    while (true) {
      std::string_view op;
      if (match("<=")) {
        op = "<=";
      } else if (match(">=")) {
        op = ">=";
      } else if (match("<")) {
        op = "<";
      } else if (match(">")) {
        op = ">";
      } else {
        return lhs;
      }
      std::string rhs = additive(live);
      if (!live) continue;
      const int c = compare(lhs, rhs);
      bool r = false;
      if (op == "<") r = c < 0;
      if (op == "<=") r = c <= 0;
      if (op == ">") r = c > 0;
      if (op == ">=") r = c >= 0;
      lhs = r ? "1" : "0";
    }
  }

  std::string arith(const std::string& a, const std::string& b, char op) const {
    const std::string op_text(1, op);
    const Number x = numeric(a, op_text);
    const Number y = numeric(b, op_text);
    Number r;
    if (x.is_int && y.is_int) {
      const auto ux = static_cast<std::uint64_t>(x.i), uy = static_cast<std::uint64_t>(y.i);
      switch (op) {
        case '+': r.i = static_cast<std::int64_t>(ux + uy); break;
        case '-': r.i = static_cast<std::int64_t>(ux - uy); break;
        case '*': r.i = static_cast<std::int64_t>(ux * uy); break;
        case '/':
        case '%': {
          if (y.i == 0) throw Error(Errc::type_error, "divide by zero");
          std::int64_t q = x.i / y.i;
          std::int64_t m = x.i % y.i;
          // Floor semantics: remainder takes the sign of the divisor.
          if (m != 0 && ((m < 0) != (y.i < 0))) {
            --q;
            m += y.i;
          }
          r.i = op == '/' ? q : m;
          break;
        }
        default: break;
      }
      return format_number(r);
    }
    if (op == '%') {
      throw Error(Errc::type_error, "can't use floating-point value as operand of \"%\"");
    }
    r.is_int = false;
    const double dx = x.as_double(), dy = y.as_double();
    switch (op) {
      case '+': r.d = dx + dy; break;
      case '-': r.d = dx - dy; break;
      case '*': r.d = dx * dy; break;
      case '/':
        if (dy == 0.0) throw Error(Errc::type_error, "divide by zero");
        r.d = dx / dy;
        break;
      default: break;
    }
    return format_number(r);
  }

  std::string additive(bool live) {
    std::string lhs = multiplicative(live);
    while (true) {
      char op;
      if (match("+")) {
        op = '+';
      } else if (match("-")) {
        op = '-';
      } else {
        return lhs;
      }
      std::string rhs = multiplicative(live);
      if (live) lhs = arith(lhs, rhs, op);
    }
  }

  std::string multiplicative(bool live) {
    std::string lhs = power(live);
    while (true) {
      char op;
      if (match("*")) {
        op = '*';
      } else if (match("/")) {
        op = '/';
      } else if (match("%")) {
        op = '%';
      } else {
        return lhs;
      }
      std::string rhs = power(live);
      if (live) lhs = arith(lhs, rhs, op);
    }
  }

  std::string power(bool live) {
    std::string base = unary(live);
    if (!match("**")) return base;
    std::string exponent = power(live);  // right associative
    if (!live) return {};
    const Number b = numeric(base, "**");
    const Number e = numeric(exponent, "**");
    Number r;
    if (b.is_int && e.is_int) {
      if (e.i < 0) {
        if (b.i == 0) throw Error(Errc::type_error, "exponentiation of zero by negative power");
        r.i = (b.i == 1) ? 1 : (b.i == -1 ? (e.i % 2 == 0 ? 1 : -1) : 0);
      } else {
        std::uint64_t acc = 1, base_u = static_cast<std::uint64_t>(b.i);
        for (std::int64_t k = 0; k < e.i; ++k) acc *= base_u;
        r.i = static_cast<std::int64_t>(acc);
      }
    } else {
      r.is_int = false;
      r.d = std::pow(b.as_double(), e.as_double());
    }
    return format_number(r);
  }

  std::string unary(bool live) {
    skip_space();
    if (match("!")) {
      std::string v = unary(live);
      if (!live) return {};
      return truth(v) ? "0" : "1";
    }
    if (match("-")) {
      std::string v = unary(live);
      if (!live) return {};
      Number n = numeric(v, "-");
      if (n.is_int) {
        n.i = static_cast<std::int64_t>(0 - static_cast<std::uint64_t>(n.i));
      } else {
        n.d = -n.d;
      }
      return format_number(n);
    }
    if (match("+")) {
      std::string v = unary(live);
      if (!live) return {};
      return format_number(numeric(v, "+"));
    }
    return primary(live);
  }

  std::string primary(bool live) {
    skip_space();
    if (pos_ >= src_.size()) syntax_error("premature end of expression");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      std::string v = ternary(live);
      if (!match(")")) syntax_error("missing close parenthesis");
      return v;
    }
    if (c == '$') {
      detail::Parser parser(src_, 1);
      parser.set_pos(pos_);
      std::vector<Part> parts;
      parser.parse_variable(parts);
      pos_ = parser.pos();
      if (const auto* var = std::get_if<VarRef>(&parts.front())) {
        return live ? interp_.get_var(var->name) : std::string{};
      }
      syntax_error("invalid character \"$\"");
    }
    if (c == '[') {
      detail::Parser parser(src_, 1);
      parser.set_pos(pos_);
      CmdSub sub = parser.parse_command_substitution();
      pos_ = parser.pos();
      return live ? interp_.eval_script(*sub.script).value : std::string{};
    }
    if (c == '"') {
      detail::Parser parser(src_, 1);
      parser.set_pos(pos_);
      Word word = parser.parse_quoted_body();
      pos_ = parser.pos();
      return live ? interp_.substitute(word) : std::string{};
    }
    if (c == '{') {
      detail::Parser parser(src_, 1);
      parser.set_pos(pos_);
      std::string text = parser.parse_braced_body();
      pos_ = parser.pos();
      return text;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::size_t start = pos_;
      if (c == '0' && pos_ + 1 < src_.size() && (src_[pos_ + 1] == 'x' || src_[pos_ + 1] == 'X')) {
        pos_ += 2;
        while (pos_ < src_.size() && std::isxdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      } else {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
          ++pos_;
          while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
          std::size_t p = pos_ + 1;
          if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
          if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
            pos_ = p;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
          }
        }
      }
      const auto n = parse_number(src_.substr(start, pos_ - start));
      if (!n) syntax_error("invalid number \"" + std::string(src_.substr(start, pos_ - start)) + "\"");
      return format_number(*n);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        ++pos_;
      }
      const std::string word(src_.substr(start, pos_ - start));
      if (parse_boolean(word) && !parse_number(word)) return word;
      syntax_error("invalid bareword \"" + word + "\"");
    }
    syntax_error(std::string("invalid character \"") + c + "\"");
  }

  Interp& interp_;
  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string Interp::eval_expr(std::string_view expr) {
  return ExprEvaluator(*this, expr).run();
}

bool Interp::eval_condition(std::string_view expr) {
  const std::string value = eval_expr(expr);
  if (const auto b = parse_boolean(value)) return *b;
  throw Error(Errc::type_error, "expected boolean value but got \"" + value + "\"");
}

}  // namespace hbs::tclish
