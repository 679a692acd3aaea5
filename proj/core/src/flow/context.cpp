#include "hbs/flow/context.hpp"

#include <algorithm>
#include <cctype>

#include "hbs/tclish/list.hpp"

namespace hbs::flow {

FileKind file_kind(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".vhd" || ext == ".vhdl") return FileKind::vhdl;
  if (ext == ".v" || ext == ".vh") return FileKind::verilog;
  if (ext == ".sv" || ext == ".svh") return FileKind::systemverilog;
  if (ext == ".xdc") return FileKind::constraint_xdc;
  if (ext == ".sdc") return FileKind::constraint_sdc;
  if (ext == ".tcl") return FileKind::tcl;
  return FileKind::other;
}

std::string_view file_kind_name(FileKind kind) {
  switch (kind) {
    case FileKind::vhdl: return "vhdl";
    case FileKind::verilog: return "verilog";
    case FileKind::systemverilog: return "systemverilog";
    case FileKind::constraint_xdc: return "constraint-xdc";
    case FileKind::constraint_sdc: return "constraint-sdc";
    case FileKind::tcl: return "tcl";
    case FileKind::other: return "other";
  }
  return "other";
}

std::string_view phase_name(Phase phase) { return phase == Phase::pre ? "pre" : "post"; }

std::string DepNode::label() const {
  if (argv.empty()) return target;
  return target + " " + tclish::make_list(argv);
}

std::size_t DepGraph::add_node(const DepNode& node) {
  const auto [it, inserted] = index_.emplace(node, nodes_.size());
  if (inserted) nodes_.push_back(node);
  return it->second;
}

void DepGraph::add_edge(const DepNode& from, const DepNode& to) {
  const std::pair<std::size_t, std::size_t> e{add_node(from), add_node(to)};
  if (edge_set_.insert(e).second) edges_.push_back(e);
}

std::optional<std::size_t> DepGraph::find(const DepNode& node) const {
  const auto it = index_.find(node);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool DepGraph::has_edge(const DepNode& from, const DepNode& to) const {
  const auto a = find(from);
  const auto b = find(to);
  return a && b && edge_set_.contains({*a, *b});
}

namespace {

std::string dot_string(std::string_view text) {
  std::string out = "\"";
  for (const char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string emit_dot(const DepGraph& graph) {
  std::string out = "digraph deps {\n";
  for (const auto& node : graph.nodes()) out += "  " + dot_string(node.label()) + ";\n";
  for (const auto& [from, to] : graph.edges()) {
    out += "  " + dot_string(graph.nodes()[from].label()) + " -> " +
           dot_string(graph.nodes()[to].label()) + ";\n";
  }
  out += "}\n";
  return out;
}

const std::vector<Callback>& RunContext::callbacks_for(std::string_view stage, Phase phase) const {
  static const std::vector<Callback> none;
  const auto it = callbacks.find({std::string(stage), phase});
  return it == callbacks.end() ? none : it->second;
}

}  // namespace hbs::flow
