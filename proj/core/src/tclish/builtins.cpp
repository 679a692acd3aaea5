// The fixed command set of the DSL. Everything else comes from procs, the
// hbs:: commands installed by the flow, or the unknown-command handler.

#include <charconv>

#include "hbs/error.hpp"
#include "hbs/glob.hpp"
#include "hbs/process.hpp"
#include "hbs/tclish/interp.hpp"
#include "hbs/tclish/list.hpp"

namespace hbs::tclish {

namespace {

using Args = std::span<const std::string>;

[[noreturn]] void wrong_args(std::string_view usage) {
  throw Error(Errc::arity, "wrong # args: should be \"" + std::string(usage) + "\"");
}

// Line of the n-th word of the command being evaluated, for scripts passed
// as arguments (bodies keep their source line numbers).
int word_line(const Interp& interp, std::size_t index) {
  const ScriptNode* node = interp.current_node();
  if (node && index < node->words.size()) return node->words[index].line;
  return node ? node->line : 1;
}

Result cmd_set(Interp& interp, Args argv) {
  if (argv.size() == 2) return {Code::ok, interp.get_var(argv[1])};
  if (argv.size() != 3) wrong_args("set varName ?newValue?");
  interp.set_var(argv[1], argv[2]);
  return {Code::ok, argv[2]};
}

Result cmd_puts(Interp& interp, Args argv) {
  std::size_t i = 1;
  bool newline = true;
  if (i < argv.size() && argv[i] == "-nonewline" && argv.size() > 2) {
    newline = false;
    ++i;
  }
  std::string channel = "stdout";
  if (argv.size() - i == 2) {
    channel = argv[i++];
  } else if (argv.size() - i != 1) {
    wrong_args("puts ?-nonewline? ?channelId? string");
  }
  std::string text = argv[i];
  if (newline) text += '\n';
  if (channel == "stdout") {
    interp.out().write(text);
  } else if (channel == "stderr") {
    interp.out().write_err(text);
  } else {
    throw Error(Errc::user_error, "can not find channel named \"" + channel + "\"");
  }
  return {};
}

Result cmd_proc(Interp& interp, Args argv) {
  if (argv.size() != 4) wrong_args("proc name args body");
  const ScriptNode* node = interp.current_node();
  interp.define_proc(argv[1], argv[2], argv[3], word_line(interp, 3), node ? node->doc : "");
  return {};
}

Result cmd_namespace(Interp& interp, Args argv) {
  if (argv.size() < 2) wrong_args("namespace subcommand ?arg ...?");
  if (argv[1] != "eval") {
    throw Error(Errc::user_error, "unknown or unsupported namespace subcommand \"" + argv[1] + "\"");
  }
  if (argv.size() < 4) wrong_args("namespace eval name arg ?arg...?");
  const ScriptNode* node = interp.current_node();
  std::string doc = node ? node->doc : "";
  if (argv.size() == 4) return interp.eval_in_namespace(argv[2], argv[3], word_line(interp, 3), doc);
  return interp.eval_in_namespace(argv[2], concat(argv.subspan(3)), word_line(interp, 3), doc);
}

Result cmd_if(Interp& interp, Args argv) {
  std::size_t i = 1;
  while (true) {
    if (i >= argv.size()) wrong_args("if expr ?then? body ?elseif expr ?then? body ...? ?else? ?body?");
    const bool cond = interp.eval_condition(argv[i]);
    ++i;
    if (i < argv.size() && argv[i] == "then") ++i;
    if (i >= argv.size()) {
      throw Error(Errc::user_error, "wrong # args: no script following \"" + argv[i - 1] + "\" argument");
    }
    if (cond) return interp.eval_cached(argv[i], word_line(interp, i));
    ++i;
    if (i >= argv.size()) return {};
    if (argv[i] == "elseif") {
      ++i;
      continue;
    }
    if (argv[i] == "else") {
      ++i;
      if (i >= argv.size()) {
        throw Error(Errc::user_error, "wrong # args: no script following \"else\" argument");
      }
    }
    if (i + 1 != argv.size()) {
      throw Error(Errc::user_error, "wrong # args: extra words after \"else\" clause in \"if\" command");
    }
    return interp.eval_cached(argv[i], word_line(interp, i));
  }
}

Result cmd_expr(Interp& interp, Args argv) {
  if (argv.size() < 2) wrong_args("expr arg ?arg ...?");
  if (argv.size() == 2) return {Code::ok, interp.eval_expr(argv[1])};
  return {Code::ok, interp.eval_expr(concat(argv.subspan(1)))};
}

Result cmd_return(Interp&, Args argv) {
  if (argv.size() > 2) wrong_args("return ?value?");
  return {Code::ret, argv.size() == 2 ? argv[1] : std::string{}};
}

Result cmd_error(Interp&, Args argv) {
  if (argv.size() < 2 || argv.size() > 4) wrong_args("error message ?errorInfo? ?errorCode?");
  throw Error(Errc::user_error, argv[1]);
}

Result cmd_catch(Interp& interp, Args argv) {
  if (argv.size() < 2 || argv.size() > 3) wrong_args("catch script ?resultVarName?");
  int code = 0;
  std::string value;
  try {
    Result r = interp.eval_cached(argv[1], word_line(interp, 1));
    value = std::move(r.value);
    switch (r.code) {
      case Code::ok: code = 0; break;
      case Code::ret: code = 2; break;
      case Code::brk: code = 3; break;
      case Code::cont: code = 4; break;
    }
  } catch (const Error& e) {
    code = 1;
    value = e.what();
  }
  if (argv.size() == 3) interp.set_var(argv[2], value);
  return {Code::ok, std::to_string(code)};
}

Result cmd_eval(Interp& interp, Args argv) {
  if (argv.size() < 2) wrong_args("eval arg ?arg ...?");
  if (argv.size() == 2) return interp.eval_cached(argv[1], word_line(interp, 1));
  return interp.eval_cached(concat(argv.subspan(1)), word_line(interp, 1));
}

Result cmd_foreach(Interp& interp, Args argv) {
  if (argv.size() != 4) wrong_args("foreach varList list body");
  const auto vars = split_list(argv[1]);
  if (vars.empty()) throw Error(Errc::user_error, "foreach varlist is empty");
  const auto items = split_list(argv[2]);
  const int line = word_line(interp, 3);
  for (std::size_t i = 0; i < items.size(); i += vars.size()) {
    for (std::size_t v = 0; v < vars.size(); ++v) {
      interp.set_var(vars[v], i + v < items.size() ? items[i + v] : std::string{});
    }
    Result r = interp.eval_cached(argv[3], line);
    if (r.code == Code::brk) break;
    if (r.code == Code::ret) return r;
  }
  return {};
}

Result cmd_list(Interp&, Args argv) { return {Code::ok, make_list(argv.subspan(1))}; }

Result cmd_llength(Interp&, Args argv) {
  if (argv.size() != 2) wrong_args("llength list");
  return {Code::ok, std::to_string(split_list(argv[1]).size())};
}

// Resolves `end`, `end-N`, `N` against a list of `size` elements.
std::optional<long long> resolve_index(std::string_view index, std::size_t size) {
  const auto parse_int = [](std::string_view text) -> std::optional<long long> {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return v;
  };
  if (index.substr(0, 3) == "end") {
    const long long last = static_cast<long long>(size) - 1;
    if (index.size() == 3) return last;
    if (index[3] == '-' || index[3] == '+') {
      const auto off = parse_int(index.substr(4));
      if (!off) return std::nullopt;
      return index[3] == '-' ? last - *off : last + *off;
    }
    return std::nullopt;
  }
  return parse_int(index);
}

Result cmd_lindex(Interp&, Args argv) {
  if (argv.size() < 2) wrong_args("lindex list ?index ...?");
  std::string value = argv[1];
  for (std::size_t i = 2; i < argv.size(); ++i) {
    const auto elements = split_list(value);
    const auto idx = resolve_index(argv[i], elements.size());
    if (!idx) {
      throw Error(Errc::user_error, "bad index \"" + argv[i] +
                                        "\": must be integer?[+-]integer? or end?[+-]integer?");
    }
    if (*idx < 0 || *idx >= static_cast<long long>(elements.size())) return {};
    value = elements[static_cast<std::size_t>(*idx)];
  }
  return {Code::ok, value};
}

Result cmd_string(Interp&, Args argv) {
  if (argv.size() < 2) wrong_args("string subcommand ?arg ...?");
  const std::string& sub = argv[1];
  if (sub == "match" || sub == "equal") {
    bool nocase = false;
    std::size_t i = 2;
    if (i < argv.size() && argv[i] == "-nocase" && argv.size() == 5) {
      nocase = true;
      ++i;
    }
    if (argv.size() - i != 2) {
      wrong_args(sub == "match" ? "string match ?-nocase? pattern string"
                                : "string equal ?-nocase? string1 string2");
    }
    bool result;
    if (sub == "match") {
      result = glob_match(argv[i], argv[i + 1], GlobSyntax::tcl, nocase);
    } else if (nocase) {
      const auto& a = argv[i];
      const auto& b = argv[i + 1];
      result = a.size() == b.size() &&
               std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
                 return std::tolower(static_cast<unsigned char>(x)) ==
                        std::tolower(static_cast<unsigned char>(y));
               });
    } else {
      result = argv[i] == argv[i + 1];
    }
    return {Code::ok, result ? "1" : "0"};
  }
  throw Error(Errc::user_error, "unknown or unsupported string subcommand \"" + sub + "\"");
}

Result cmd_exec(Interp& interp, Args argv) {
  std::size_t i = 1;
  while (i < argv.size() && argv[i].size() > 1 && argv[i][0] == '-') {
    if (argv[i] == "--") {
      ++i;
      break;
    }
    if (argv[i] == "-ignorestderr" || argv[i] == "-keepnewline") {
      throw Error(Errc::bad_exec, "exec switch \"" + argv[i] + "\" is not supported");
    }
    break;
  }
  std::vector<std::string> words;
  bool inherit_stdout = false;
  for (; i < argv.size(); ++i) {
    const std::string& w = argv[i];
    if (w == ">@" || w == ">@stdout") {
      if (w == ">@") {
        if (i + 1 >= argv.size() || argv[i + 1] != "stdout") {
          throw Error(Errc::bad_exec, "only the \">@ stdout\" redirection is supported");
        }
        ++i;
      }
      inherit_stdout = true;
      continue;
    }
    if (w == "|" || w == "&" || w.starts_with('<') || w.starts_with('>') || w.starts_with("2>") ||
        w.starts_with("|&")) {
      throw Error(Errc::bad_exec, "unsupported exec redirection \"" + w +
                                      "\": only \">@ stdout\" is available");
    }
    words.push_back(w);
  }
  if (words.empty()) wrong_args("exec ?-switch ...? arg ?arg ...?");

  if (const auto& hook = interp.exec_hook(); hook && hook(words)) return {};

  SpawnRequest request;
  request.argv = words;
  const int fd = interp.out().stdout_fd();
  request.out = (inherit_stdout && fd >= 0) ? StreamTarget::to_fd(fd) : StreamTarget::captured();
  request.err = StreamTarget::captured();
  SpawnResult result = run_process(request);

  // Tcl appends stderr and the abnormal-exit note to the captured output,
  // then drops one trailing newline from the whole thing.
  std::string value;
  if (inherit_stdout) {
    if (fd < 0) interp.out().write(result.out);
  } else {
    value = std::move(result.out);
  }
  const bool failed = result.exit_code != 0 || !result.err.empty();
  value += result.err;
  if (result.exit_code != 0 && result.err.empty()) value += "child process exited abnormally";
  if (!value.empty() && value.back() == '\n') value.pop_back();
  if (failed) throw Error(Errc::child_failure, value);
  return {Code::ok, value};
}

}  // namespace

void install_standard_builtins(Interp& interp) {
  interp.register_builtin("set", cmd_set);
  interp.register_builtin("puts", cmd_puts);
  interp.register_builtin("proc", cmd_proc);
  interp.register_builtin("namespace", cmd_namespace);
  interp.register_builtin("if", cmd_if);
  interp.register_builtin("expr", cmd_expr);
  interp.register_builtin("return", cmd_return);
  interp.register_builtin("error", cmd_error);
  interp.register_builtin("catch", cmd_catch);
  interp.register_builtin("eval", cmd_eval);
  interp.register_builtin("exec", cmd_exec);
  interp.register_builtin("foreach", cmd_foreach);
  interp.register_builtin("list", cmd_list);
  interp.register_builtin("llength", cmd_llength);
  interp.register_builtin("lindex", cmd_lindex);
  interp.register_builtin("string", cmd_string);
}

}  // namespace hbs::tclish
