#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hbs::testrunner {

struct TestResult {
  enum class Status { pass, fail, error };
  std::string target;
  Status status = Status::pass;
  double duration = 0;  // seconds, wall clock
  std::filesystem::path output_file;
  std::string message;  // first line of the failure, empty on success
};

struct RunOptions {
  std::filesystem::path root = ".";
  std::filesystem::path work_dir = ".";
  unsigned workers = 1;
  std::optional<std::string> pattern;
  std::string tool_cmd;
};

struct Summary {
  std::vector<TestResult> results;         // sorted by target path
  std::vector<std::string> dispatch_order;  // order tests were handed to workers
  int exit_code = 0;                        // 0 iff every test passed
};

/// Runs every matching testbench once, each in its own Session. Throws
/// Error(no_tests_matched) when the pattern selects nothing.
/// `on_done` sees results in completion order, on the calling thread.
Summary run_tests(const RunOptions& options,
                  const std::function<void(const TestResult&)>& on_done = {});

/// Per-test lines, failed tests with their logs, then the totals.
std::string report(const std::vector<TestResult>& results);

/// `a::b::tb-x` -> `a.b.tb-x`; anything outside [A-Za-z0-9._-] becomes `_`.
std::string sanitize(std::string_view target);

/// `flag`, else $HBS_WORKERS, else the number of logical processors.
/// Throws Error(usage) for a zero or malformed value.
unsigned resolve_workers(std::optional<long> flag);

}  // namespace hbs::testrunner
