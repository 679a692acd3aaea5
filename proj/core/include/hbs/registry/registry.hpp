#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hbs/registry/discovery.hpp"
#include "hbs/tclish/interp.hpp"

namespace hbs::registry {

struct Target {
  std::string name;
  std::vector<tclish::Param> params;
  bool has_rest = false;
  std::string doc;
  bool testbench = false;
};

struct Core {
  std::string path;
  std::string defining_file;  // relative to the discovery root when known
  std::string doc;
  std::map<std::string, Target, std::less<>> targets;
  std::map<std::string, Target, std::less<>> utility_procs;  // names starting with `_`
};

/// `tb-*`, `tb_*`, `*-tb`, `*_tb` or exactly `tb`.
bool classify_tb(std::string_view target_name);

/// Immutable snapshot of the registered cores.
class Registry {
 public:
  Registry() = default;
  explicit Registry(std::map<std::string, Core, std::less<>> cores) : cores_(std::move(cores)) {}

  const std::map<std::string, Core, std::less<>>& cores() const { return cores_; }
  const Core* find_core(std::string_view path) const;
  /// Looks up `core::name`. Returns null when either part is unknown.
  const Target* find_target(std::string_view target_path, const Core** core = nullptr) const;

  std::vector<std::string> list_cores(std::optional<std::string_view> pattern = {}) const;
  /// Throws Error(unknown_core).
  std::vector<std::string> list_targets(std::string_view core_path) const;
  std::vector<std::string> list_tb(std::optional<std::string_view> pattern = {}) const;
  std::vector<std::pair<std::string, std::string>> where(std::string_view pattern) const;

 private:
  std::map<std::string, Core, std::less<>> cores_;
};

/// Owns the `hbs::Register` builtin and the core records it collects.
class RegistryBuilder {
 public:
  void install(tclish::Interp& interp);

  /// File name recorded for cores registered from now on.
  void set_current_file(std::string relative) { current_file_ = std::move(relative); }
  bool is_core(std::string_view path) const { return records_.find(path) != records_.end(); }

  /// Enumerates targets now, so procs defined after `hbs::Register` count.
  Registry build(const tclish::Interp& interp) const;

 private:
  struct Record {
    std::string file;
    std::string doc;
  };
  std::map<std::string, Record, std::less<>> records_;
  std::string current_file_;
};

/// Sources the files in order into `interp` and returns the snapshot.
/// Evaluation errors propagate with file and line attached.
Registry source_all(const DiscoveryList& list, tclish::Interp& interp, RegistryBuilder& builder);

}  // namespace hbs::registry
