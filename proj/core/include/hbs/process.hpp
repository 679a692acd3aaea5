#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace hbs {

/// Where a child's stdout or stderr goes.
struct StreamTarget {
  enum class Kind { capture, fd };
  Kind kind = Kind::capture;
  int fd = -1;

  static StreamTarget captured() { return {}; }
  static StreamTarget to_fd(int fd) { return {Kind::fd, fd}; }
};

struct SpawnRequest {
  std::vector<std::string> argv;
  std::filesystem::path cwd;  // empty: inherit
  StreamTarget out;
  StreamTarget err;
};

struct SpawnResult {
  int exit_code = 0;  // 128 + signal number for signalled children
  std::string out;
  std::string err;
};

/// Runs a program to completion. Throws Error(spawn_failure) when the
/// program cannot be started; a non-zero exit is not an error here.
SpawnResult run_process(const SpawnRequest& request);

/// Number of child processes started by this process so far.
std::uint64_t spawn_count() noexcept;

}  // namespace hbs
