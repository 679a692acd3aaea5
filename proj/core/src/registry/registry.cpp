#include "hbs/registry/registry.hpp"

#include <algorithm>

#include "hbs/error.hpp"
#include "hbs/glob.hpp"

namespace hbs::registry {

namespace fs = std::filesystem;

namespace {

std::string_view strip_absolute(std::string_view name) {
  while (name.starts_with("::")) name.remove_prefix(2);
  return name;
}

bool matches(std::optional<std::string_view> pattern, std::string_view text) {
  return !pattern || glob_match(*pattern, text);
}

Target make_target(const tclish::ProcDef& proc) {
  Target t;
  t.name = std::string(proc.name());
  t.params = proc.params;
  t.has_rest = proc.has_rest;
  t.doc = proc.doc;
  t.testbench = classify_tb(t.name);
  return t;
}

}  // namespace

bool classify_tb(std::string_view name) {
  return name == "tb" || name.starts_with("tb-") || name.starts_with("tb_") ||
         name.ends_with("-tb") || name.ends_with("_tb");
}

const Core* Registry::find_core(std::string_view path) const {
  const auto it = cores_.find(strip_absolute(path));
  return it == cores_.end() ? nullptr : &it->second;
}

const Target* Registry::find_target(std::string_view target_path, const Core** core) const {
  target_path = strip_absolute(target_path);
  const auto pos = target_path.rfind("::");
  if (pos == std::string_view::npos) return nullptr;
  const Core* c = find_core(target_path.substr(0, pos));
  if (!c) return nullptr;
  const auto it = c->targets.find(target_path.substr(pos + 2));
  if (it == c->targets.end()) return nullptr;
  if (core) *core = c;
  return &it->second;
}

std::vector<std::string> Registry::list_cores(std::optional<std::string_view> pattern) const {
  std::vector<std::string> out;
  for (const auto& [path, core] : cores_) {
    if (matches(pattern, path)) out.push_back(path);
  }
  return out;
}

std::vector<std::string> Registry::list_targets(std::string_view core_path) const {
  const Core* core = find_core(core_path);
  if (!core) throw Error(Errc::unknown_core, "unknown core \"" + std::string(core_path) + "\"");
  std::vector<std::string> out;
  for (const auto& [name, target] : core->targets) out.push_back(name);
  return out;
}

std::vector<std::string> Registry::list_tb(std::optional<std::string_view> pattern) const {
  std::vector<std::string> out;
  for (const auto& [path, core] : cores_) {
    for (const auto& [name, target] : core.targets) {
      if (!target.testbench) continue;
      std::string full = path + "::" + name;
      if (matches(pattern, full)) out.push_back(std::move(full));
    }
  }
  // `a::b::tb` and `a::b-c::tb` interleave differently than their cores do.
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<std::string, std::string>> Registry::where(std::string_view pattern) const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [path, core] : cores_) {
    if (glob_match(pattern, path)) out.emplace_back(path, core.defining_file);
  }
  return out;
}

void RegistryBuilder::install(tclish::Interp& interp) {
  interp.register_builtin(
      "hbs::Register", [this](tclish::Interp& in, std::span<const std::string> argv) {
        if (argv.size() != 1) {
          throw Error(Errc::arity, "wrong # args: should be \"hbs::Register\"");
        }
        const std::string& ns = in.current_namespace();
        if (ns.empty()) {
          throw Error(Errc::register_outside_namespace,
                      "hbs::Register must be called inside a namespace eval");
        }
        if (const auto it = records_.find(ns); it != records_.end()) {
          throw Error(Errc::duplicate_core, "core \"" + ns + "\" is already registered in " +
                                                it->second.file);
        }
        std::string file = current_file_.empty() ? in.current_file() : current_file_;
        records_.emplace(ns, Record{std::move(file), in.namespace_doc()});
        return tclish::Result{};
      });
}

Registry RegistryBuilder::build(const tclish::Interp& interp) const {
  std::map<std::string, Core, std::less<>> cores;
  for (const auto& [path, record] : records_) {
    Core core;
    core.path = path;
    core.defining_file = record.file;
    core.doc = record.doc;
    for (const tclish::ProcDef* proc : interp.procs_in(path)) {
      Target t = make_target(*proc);
      auto& into = t.name.starts_with('_') ? core.utility_procs : core.targets;
      std::string key = t.name;
      into.emplace(std::move(key), std::move(t));
    }
    cores.emplace(path, std::move(core));
  }
  return Registry(std::move(cores));
}

Registry source_all(const DiscoveryList& list, tclish::Interp& interp, RegistryBuilder& builder) {
  for (std::size_t i = 0; i < list.files.size(); ++i) {
    builder.set_current_file(list.files[i].generic_string());
    interp.source_file(fs::absolute(list.absolute(i)).lexically_normal());
  }
  builder.set_current_file({});
  return builder.build(interp);
}

}  // namespace hbs::registry
