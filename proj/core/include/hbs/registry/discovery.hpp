#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace hbs::registry {

/// `.hbs` files under a root, in sourcing order: shallower paths first, ties
/// broken lexicographically on the relative path.
struct DiscoveryList {
  std::filesystem::path root;
  std::vector<std::filesystem::path> files;  // relative to root
  std::vector<std::string> warnings;         // skipped symlink cycles

  std::filesystem::path absolute(std::size_t i) const { return root / files[i]; }
};

/// Number of separators in a relative path.
std::size_t path_depth(const std::filesystem::path& relative);

/// Sourcing-order comparison on relative paths.
bool sources_before(const std::filesystem::path& a, const std::filesystem::path& b);

/// Walks `root`, following directory symlinks and skipping hidden
/// directories. Throws Error(io_error) for unreadable directories.
DiscoveryList discover(const std::filesystem::path& root);

}  // namespace hbs::registry
