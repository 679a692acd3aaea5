#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hbs::flow {

enum class FileKind { vhdl, verilog, systemverilog, constraint_xdc, constraint_sdc, tcl, other };

/// Kind by extension, case-insensitive.
FileKind file_kind(const std::filesystem::path& path);
std::string_view file_kind_name(FileKind kind);

struct FileEntry {
  std::filesystem::path path;  // absolute
  FileKind kind = FileKind::other;
  std::string lib;  // empty: default library
  std::string std;  // standard in effect when added
};

enum class Phase { pre, post };
std::string_view phase_name(Phase phase);

struct Callback {
  std::string command;  // fully qualified (`::ns::proc`) when it resolved at registration
  std::vector<std::string> args;
};

/// A target invocation: target path plus its exact argument words.
struct DepNode {
  std::string target;
  std::vector<std::string> argv;

  /// Target path, followed by the arguments as a Tcl list when there are any.
  std::string label() const;
  friend auto operator<=>(const DepNode&, const DepNode&) = default;
  friend bool operator==(const DepNode&, const DepNode&) = default;
};

/// Nodes and edges in first-seen order; duplicate edges collapse.
class DepGraph {
 public:
  std::size_t add_node(const DepNode& node);
  void add_edge(const DepNode& from, const DepNode& to);

  const std::vector<DepNode>& nodes() const { return nodes_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const { return edges_; }
  std::optional<std::size_t> find(const DepNode& node) const;
  bool has_edge(const DepNode& from, const DepNode& to) const;

  friend bool operator==(const DepGraph& a, const DepGraph& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<DepNode> nodes_;
  std::map<DepNode, std::size_t> index_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
  std::set<std::pair<std::size_t, std::size_t>> edge_set_;
};

std::string emit_dot(const DepGraph& graph);

/// A command passed through to a script-gen tool, with the number of files
/// added before it.
struct UnknownEntry {
  std::string text;
  std::size_t files_before = 0;
};

/// Flow state of one build. Thread-confined.
struct RunContext {
  std::string tool;
  std::string top;
  std::string device;
  std::string lib;
  std::string std = "2008";
  std::vector<FileEntry> files;
  std::map<std::string, std::string> generics;
  std::string arg_prefix;
  std::string arg_suffix;
  std::string exit_severity;  // empty until set
  std::map<std::pair<std::string, Phase>, std::vector<Callback>> callbacks;
  std::filesystem::path build_dir;
  std::set<DepNode> memo;
  DepGraph graph;
  bool dry_run = false;
  std::string root_target;
  std::string this_core_path;
  std::string this_target_path;
  std::vector<UnknownEntry> unknown_log;
  bool tool_locked = false;  // set by the first AddFile or Run
  std::map<std::string, std::string> mock_commands;  // stage -> command line

  const std::vector<Callback>& callbacks_for(std::string_view stage, Phase phase) const;
};

}  // namespace hbs::flow
