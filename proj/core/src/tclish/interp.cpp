#include "hbs/tclish/interp.hpp"

#include <unistd.h>

#include <fstream>
#include <sstream>

#include "hbs/error.hpp"
#include "hbs/tclish/list.hpp"
#include "hbs/tclish/parser.hpp"

namespace hbs::tclish {

namespace {

constexpr int kMaxDepth = 1000;

std::string join_ns(std::string_view ns, std::string_view name) {
  if (ns.empty()) return std::string(name);
  std::string out(ns);
  out += "::";
  out += name;
  return out;
}

// Splits `a::b::c` into (`a::b`, `c`). Leading `::` is kept on the namespace
// part so the caller can tell absolute names apart.
std::pair<std::string_view, std::string_view> split_qualified(std::string_view name) {
  const auto pos = name.rfind("::");
  if (pos == std::string_view::npos) return {std::string_view{}, name};
  std::size_t ns_end = pos;
  while (ns_end > 0 && name[ns_end - 1] == ':') --ns_end;
  return {name.substr(0, ns_end), name.substr(pos + 2)};
}

bool is_absolute(std::string_view name) { return name.size() >= 2 && name.substr(0, 2) == "::"; }

std::string strip_absolute(std::string_view name) {
  while (!name.empty() && name.front() == ':') name.remove_prefix(1);
  return std::string(name);
}

}  // namespace

struct Interp::Frame {
  enum class Kind { global, ns, proc };
  Kind kind = Kind::global;
  std::string ns;
  VarTable locals;
  const ProcDef* proc = nullptr;
  std::string doc;
  std::string file;
};

void FdSink::write(std::string_view text) {
  while (!text.empty()) {
    const ssize_t n = ::write(out_, text.data(), text.size());
    if (n <= 0) return;
    text.remove_prefix(static_cast<std::size_t>(n));
  }
}

void FdSink::write_err(std::string_view text) {
  while (!text.empty()) {
    const ssize_t n = ::write(err_, text.data(), text.size());
    if (n <= 0) return;
    text.remove_prefix(static_cast<std::size_t>(n));
  }
}

std::string_view ProcDef::name() const { return split_qualified(fq_name).second; }

std::string ProcDef::usage(std::string_view invoked_as) const {
  std::string text(invoked_as);
  for (const auto& p : params) {
    text += ' ';
    if (p.default_value) {
      text += '?' + p.name + '?';
    } else {
      text += p.name;
    }
  }
  if (has_rest) text += " ?arg ...?";
  return text;
}

Interp::Interp(OutputSink& out) : out_(&out) {
  namespaces_.emplace("", VarTable{});
  frames_.push_back(std::make_unique<Frame>());
  install_standard_builtins(*this);
}

Interp::~Interp() = default;

void Interp::register_builtin(std::string name, NativeFn fn) {
  name = strip_absolute(name);
  if (builtins_.contains(name)) {
    throw Error(Errc::duplicate_builtin, "builtin \"" + name + "\" is already registered");
  }
  const auto [ns, tail] = split_qualified(name);
  if (!ns.empty()) ensure_namespace(ns);
  builtins_.emplace(std::move(name), std::move(fn));
}

bool Interp::has_builtin(std::string_view name) const {
  return builtins_.find(strip_absolute(name)) != builtins_.end();
}

// ---------------------------------------------------------------------------
// Evaluation

std::string Interp::eval(std::string_view source, int first_line) {
  const Script script = parse_script(source, first_line);
  Result r = eval_script(script);
  if (r.code == Code::brk || r.code == Code::cont) {
    throw Error(Errc::user_error, std::string("invoked \"") +
                                      (r.code == Code::brk ? "break" : "continue") +
                                      "\" outside of a loop");
  }
  return std::move(r.value);
}

Result Interp::eval_cached(std::string_view source, int first_line) {
  std::string key(source);
  key += '\0';
  key += std::to_string(first_line);
  auto it = script_cache_.find(key);
  if (it == script_cache_.end()) {
    auto script = std::make_shared<const Script>(parse_script(source, first_line));
    it = script_cache_.emplace(std::move(key), std::move(script)).first;
  }
  // Keep the script alive even if the cache is modified during evaluation.
  const auto script = it->second;
  return eval_script(*script);
}

Result Interp::eval_script(const Script& script) {
  Result last;
  for (const auto& node : script) {
    last = eval_node(node);
    if (last.code != Code::ok) return last;
  }
  return last;
}

std::string Interp::source_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "couldn't read file \"" + file.string() + "\"");
  std::ostringstream text;
  text << in.rdbuf();

  Frame& global = *frames_.front();
  std::string saved = std::move(global.file);
  global.file = file.string();
  struct Restore {
    Frame& frame;
    std::string& saved;
    ~Restore() { frame.file = std::move(saved); }
  } restore{global, saved};

  const std::string source = text.str();
  const Script script = parse_script(source, 1);
  Result r = eval_script(script);
  return std::move(r.value);
}

Result Interp::eval_node(const ScriptNode& node) {
  if (depth_ >= kMaxDepth) {
    throw Error(Errc::nesting_limit, "too many nested evaluations (infinite loop?)");
  }
  ++depth_;
  const ScriptNode* saved_node = current_node_;
  current_node_ = &node;
  struct Guard {
    Interp& self;
    const ScriptNode* saved;
    ~Guard() {
      --self.depth_;
      self.current_node_ = saved;
    }
  } guard{*this, saved_node};

  try {
    std::string name = substitute(node.words.front());
    const auto fq = resolve_command(name);
    if (!fq) {
      if (unknown_) return unknown_(*this, node);
      for (std::size_t i = 1; i < node.words.size(); ++i) substitute(node.words[i]);
      throw Error(Errc::unknown_command, "invalid command name \"" + name + "\"");
    }
    std::vector<std::string> argv;
    argv.reserve(node.words.size());
    argv.push_back(std::move(name));
    for (std::size_t i = 1; i < node.words.size(); ++i) argv.push_back(substitute(node.words[i]));
    current_node_ = &node;
    return dispatch(*fq, argv);
  } catch (Error& e) {
    if (e.where().empty()) {
      const std::string& file = current_file();
      e.set_where((file.empty() ? std::string("line ") : file + ":") + std::to_string(node.line));
    }
    throw;
  }
}

Result Interp::dispatch(const std::string& fq, std::span<const std::string> argv) {
  if (const auto it = procs_.find(fq); it != procs_.end()) {
    return Result{Code::ok, call_proc_impl(*it->second, argv)};
  }
  const auto it = builtins_.find(fq);
  // Copy: a builtin may register further builtins while running.
  const NativeFn fn = it->second;
  return fn(*this, argv);
}

std::string Interp::substitute(const Word& word) {
  if (word.parts.size() == 1) {
    if (const auto* lit = std::get_if<Literal>(&word.parts.front())) return lit->text;
    if (const auto* br = std::get_if<Braced>(&word.parts.front())) return br->text;
  }
  std::string out;
  for (const auto& part : word.parts) {
    if (const auto* lit = std::get_if<Literal>(&part)) {
      out += lit->text;
    } else if (const auto* var = std::get_if<VarRef>(&part)) {
      out += get_var(var->name);
    } else if (const auto* sub = std::get_if<CmdSub>(&part)) {
      out += eval_script(*sub->script).value;
    } else {
      out += std::get<Braced>(part).text;
    }
  }
  return out;
}

std::optional<std::string> Interp::resolve_command(std::string_view name) const {
  const auto lookup = [&](const std::string& fq) {
    return procs_.find(fq) != procs_.end() || builtins_.find(fq) != builtins_.end();
  };
  if (is_absolute(name)) {
    std::string fq = strip_absolute(name);
    if (lookup(fq)) return fq;
    return std::nullopt;
  }
  const std::string& ns = current_namespace();
  if (!ns.empty()) {
    std::string fq = join_ns(ns, name);
    if (lookup(fq)) return fq;
  }
  std::string fq(name);
  if (lookup(fq)) return fq;
  return std::nullopt;
}

std::string Interp::call_proc(std::string_view fq_name, std::span<const std::string> args) {
  const auto it = procs_.find(strip_absolute(fq_name));
  if (it == procs_.end()) {
    throw Error(Errc::unknown_command, "invalid command name \"" + std::string(fq_name) + "\"");
  }
  std::vector<std::string> argv;
  argv.reserve(args.size() + 1);
  argv.emplace_back(fq_name);
  argv.insert(argv.end(), args.begin(), args.end());
  return call_proc_impl(*it->second, argv);
}

std::string Interp::invoke(std::span<const std::string> words) {
  if (words.empty()) throw Error(Errc::usage, "empty command");
  const auto fq = resolve_command(words.front());
  if (!fq) throw Error(Errc::unknown_command, "invalid command name \"" + words.front() + "\"");
  Result r = dispatch(*fq, words);
  return std::move(r.value);
}

std::string Interp::call_proc_impl(const ProcDef& proc, std::span<const std::string> argv) {
  const std::size_t given = argv.size() - 1;
  auto frame = std::make_unique<Frame>();
  frame->kind = Frame::Kind::proc;
  frame->ns = proc.ns;
  frame->proc = &proc;
  frame->file = proc.defining_file;

  const auto arity_error = [&] {
    return Error(Errc::arity, "wrong # args: should be \"" + proc.usage(argv.front()) + "\"");
  };
  const std::size_t fixed = proc.params.size();
  if (given > fixed && !proc.has_rest) throw arity_error();
  for (std::size_t i = 0; i < fixed; ++i) {
    const Param& p = proc.params[i];
    if (i < given) {
      frame->locals.insert_or_assign(p.name, argv[i + 1]);
    } else if (p.default_value) {
      frame->locals.insert_or_assign(p.name, *p.default_value);
    } else {
      throw arity_error();
    }
  }
  if (proc.has_rest) {
    std::vector<std::string> rest;
    for (std::size_t i = fixed; i < given; ++i) rest.push_back(argv[i + 1]);
    frame->locals.insert_or_assign("args", make_list(rest));
  }

  if (!proc.compiled_) {
    proc.compiled_ = std::make_shared<const Script>(parse_script(proc.body, proc.body_line));
  }
  const auto body = proc.compiled_;

  frames_.push_back(std::move(frame));
  struct Pop {
    Interp& self;
    const ProcDef& proc;
    std::span<const std::string> args;
    bool hooked = false;
    ~Pop() {
      if (hooked && self.call_hook_) self.call_hook_(proc, args, false);
      self.frames_.pop_back();
    }
  } pop{*this, proc, argv.subspan(1)};
  if (call_hook_) {
    call_hook_(proc, pop.args, true);
    pop.hooked = true;
  }

  try {
    Result r = eval_script(*body);
    if (r.code == Code::brk || r.code == Code::cont) {
      throw Error(Errc::user_error, std::string("invoked \"") +
                                        (r.code == Code::brk ? "break" : "continue") +
                                        "\" outside of a loop");
    }
    return std::move(r.value);
  } catch (Error& e) {
    e.add_trace("(procedure \"" + proc.fq_name + "\")");
    throw;
  }
}

void Interp::define_proc(std::string_view name, std::string_view params, std::string body,
                         int body_line, std::string doc) {
  auto proc = std::make_unique<ProcDef>();
  proc->fq_name = is_absolute(name) ? strip_absolute(name) : join_ns(current_namespace(), name);
  proc->ns = std::string(split_qualified(proc->fq_name).first);
  ensure_namespace(proc->ns);

  const auto specs = split_list(params);
  bool seen_default = false;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto fields = split_list(specs[i]);
    if (fields.empty() || fields.size() > 2) {
      throw Error(Errc::user_error, (fields.empty() ? "argument with no name"
                                                    : "too many fields in argument specifier \"" +
                                                          specs[i] + "\""));
    }
    if (i + 1 == specs.size() && fields[0] == "args" && fields.size() == 1) {
      proc->has_rest = true;
      break;
    }
    Param p{fields[0], std::nullopt};
    if (fields.size() == 2) {
      p.default_value = fields[1];
      seen_default = true;
    } else if (seen_default) {
      throw Error(Errc::arity, "procedure \"" + proc->fq_name + "\": parameter \"" + p.name +
                                   "\" without default follows a defaulted parameter");
    }
    proc->params.push_back(std::move(p));
  }
  proc->body = std::move(body);
  proc->body_line = body_line;
  proc->defining_file = current_file();
  proc->doc = std::move(doc);
  auto& slot = procs_[proc->fq_name];
  if (slot) replaced_procs_.push_back(std::move(slot));
  slot = std::move(proc);
}

Result Interp::eval_in_namespace(std::string_view ns, std::string_view script, int first_line,
                                 std::string doc) {
  const std::string fq = is_absolute(ns) ? strip_absolute(ns) : join_ns(current_namespace(), ns);
  ensure_namespace(fq);
  auto frame = std::make_unique<Frame>();
  frame->kind = Frame::Kind::ns;
  frame->ns = fq;
  frame->doc = std::move(doc);
  frame->file = current_file();
  frame->proc = current_proc();
  frames_.push_back(std::move(frame));
  struct Pop {
    Interp& self;
    ~Pop() { self.frames_.pop_back(); }
  } pop{*this};
  return eval_cached(script, first_line);
}

// ---------------------------------------------------------------------------
// Variables

const std::string* Interp::lookup_var(std::string_view name) const {
  const auto find_in = [&](std::string_view ns, std::string_view tail) -> const std::string* {
    const auto table = namespaces_.find(ns);
    if (table == namespaces_.end()) return nullptr;
    const auto it = table->second.find(tail);
    return it == table->second.end() ? nullptr : &it->second;
  };

  const auto [ns_part, tail] = split_qualified(name);
  if (name.find("::") != std::string_view::npos) {
    if (is_absolute(name)) return find_in(strip_absolute(ns_part), tail);
    const std::string& cur = current_namespace();
    if (!cur.empty()) {
      if (const auto* v = find_in(join_ns(cur, ns_part), tail)) return v;
    }
    return find_in(ns_part, tail);
  }

  const Frame& frame = *frames_.back();
  if (frame.kind == Frame::Kind::proc) {
    const auto it = frame.locals.find(name);
    return it == frame.locals.end() ? nullptr : &it->second;
  }
  if (const auto* v = find_in(frame.ns, name)) return v;
  if (!frame.ns.empty()) return find_in("", name);
  return nullptr;
}

Interp::VarTable& Interp::table_for_write(std::string_view name, std::string& key) {
  const auto [ns_part, tail] = split_qualified(name);
  key = std::string(tail);
  if (name.find("::") != std::string_view::npos) {
    if (is_absolute(name)) {
      const auto it = namespaces_.find(strip_absolute(ns_part));
      if (it != namespaces_.end()) return it->second;
    } else {
      const std::string& cur = current_namespace();
      if (!cur.empty()) {
        const auto it = namespaces_.find(join_ns(cur, ns_part));
        if (it != namespaces_.end()) return it->second;
      }
      const auto it = namespaces_.find(ns_part);
      if (it != namespaces_.end()) return it->second;
    }
    throw Error(Errc::undefined_variable,
                "can't set \"" + std::string(name) + "\": parent namespace doesn't exist");
  }

  Frame& frame = *frames_.back();
  if (frame.kind == Frame::Kind::proc) return frame.locals;
  auto& own = namespaces_.find(frame.ns)->second;
  if (!frame.ns.empty() && !own.contains(key)) {
    auto& global = namespaces_.find("")->second;
    if (global.contains(key)) return global;
  }
  return own;
}

std::string Interp::get_var(std::string_view name) const {
  if (const auto* v = lookup_var(name)) return *v;
  throw Error(Errc::undefined_variable, "can't read \"" + std::string(name) + "\": no such variable");
}

std::optional<std::string> Interp::find_var(std::string_view name) const {
  if (const auto* v = lookup_var(name)) return *v;
  return std::nullopt;
}

void Interp::set_var(std::string_view name, std::string value) {
  std::string key;
  VarTable& table = table_for_write(name, key);
  table.insert_or_assign(std::move(key), std::move(value));
}

// ---------------------------------------------------------------------------
// Namespaces and introspection

const std::string& Interp::current_namespace() const { return frames_.back()->ns; }

bool Interp::namespace_exists(std::string_view ns) const {
  return namespaces_.find(strip_absolute(ns)) != namespaces_.end();
}

void Interp::ensure_namespace(std::string_view ns) {
  std::string path = strip_absolute(ns);
  while (!path.empty() && !namespaces_.contains(path)) {
    namespaces_.emplace(path, VarTable{});
    const auto [parent, tail] = split_qualified(path);
    path = std::string(parent);
  }
}

const std::string& Interp::namespace_doc() const {
  for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
    if ((*it)->kind == Frame::Kind::ns) return (*it)->doc;
  }
  return frames_.front()->doc;
}

std::vector<const ProcDef*> Interp::procs_in(std::string_view ns) const {
  std::vector<const ProcDef*> out;
  const std::string key = strip_absolute(ns);
  for (const auto& [name, proc] : procs_) {
    if (proc->ns == key) out.push_back(proc.get());
  }
  return out;
}

const ProcDef* Interp::find_proc(std::string_view fq_name) const {
  const auto it = procs_.find(strip_absolute(fq_name));
  return it == procs_.end() ? nullptr : it->second.get();
}

const ProcDef* Interp::current_proc() const {
  for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
    if ((*it)->kind == Frame::Kind::proc) return (*it)->proc;
  }
  return nullptr;
}

const std::string& Interp::current_file() const { return frames_.back()->file; }

}  // namespace hbs::tclish
