#include "hbs/testrunner/testrunner.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <mutex>
#include <thread>

#include "hbs/error.hpp"
#include "hbs/flow/session.hpp"
#include "hbs/registry/discovery.hpp"
#include "hbs/tclish/output.hpp"

namespace hbs::testrunner {

namespace fs = std::filesystem;

namespace {

class Fd {
 public:
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  int get() const { return fd_; }

 private:
  int fd_;
};

TestResult run_one(const RunOptions& options, const registry::DiscoveryList& list,
                   const std::string& target) {
  TestResult result;
  result.target = target;
  result.output_file = options.work_dir / "build" / "test-logs" / (sanitize(target) + ".log");
  const auto start = std::chrono::steady_clock::now();

  Fd fd(::open(result.output_file.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644));
  if (fd.get() < 0) {
    result.status = TestResult::Status::error;
    result.message = "cannot open " + result.output_file.string();
    return result;
  }
  tclish::FdSink sink(fd.get(), fd.get());
  try {
    flow::Session session({options.root, options.work_dir, false, options.tool_cmd}, sink);
    session.load(list);
    session.run(target, {});
  } catch (const Error& e) {
    const Errc c = e.code();
    const bool failed = c == Errc::stage_failure || c == Errc::mock_stage_failure ||
                        c == Errc::panic || c == Errc::child_failure;
    result.status = failed ? TestResult::Status::fail : TestResult::Status::error;
    result.message = e.what();
    sink.write_err("error: " + e.describe() + "\n");
  } catch (const std::exception& e) {
    result.status = TestResult::Status::error;
    result.message = e.what();
    sink.write_err(std::string("error: ") + e.what() + "\n");
  }
  result.duration =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace

std::string sanitize(std::string_view target) {
  std::string out;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const char c = target[i];
    if (c == ':' && i + 1 < target.size() && target[i + 1] == ':') {
      out += '.';
      ++i;
    } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-') {
      out += c;
    } else {
      out += '_';
    }
  }
  return out;
}

unsigned resolve_workers(std::optional<long> flag) {
  long n = 0;
  if (flag) {
    n = *flag;
  } else if (const char* env = std::getenv("HBS_WORKERS"); env && *env) {
    char* end = nullptr;
    n = std::strtol(env, &end, 10);
    if (*end != '\0') throw Error(Errc::usage, "HBS_WORKERS must be a positive integer");
  } else {
    n = static_cast<long>(std::max(1u, std::thread::hardware_concurrency()));
  }
  if (n < 1) throw Error(Errc::usage, "worker count must be at least 1");
  return static_cast<unsigned>(n);
}

Summary run_tests(const RunOptions& options,
                  const std::function<void(const TestResult&)>& on_done) {
  const registry::DiscoveryList list = registry::discover(options.root);
  std::vector<std::string> tests;
  {
    tclish::NullSink null;
    flow::Session probe({options.root, options.work_dir, true, {}}, null);
    probe.load(list);
    tests = probe.registry().list_tb(options.pattern);
  }
  if (tests.empty()) {
    throw Error(Errc::no_tests_matched,
                options.pattern ? "no testbench targets match \"" + *options.pattern + "\""
                                : std::string("no testbench targets found"));
  }
  fs::create_directories(options.work_dir / "build" / "test-logs");

  Summary summary;
  std::mutex mu;
  std::condition_variable cv;
  std::deque<TestResult> done;
  std::size_t next = 0;

  const auto worker = [&] {
    for (;;) {
      std::string target;
      {
        std::lock_guard lock(mu);
        if (next == tests.size()) return;
        target = tests[next++];
        summary.dispatch_order.push_back(target);
      }
      TestResult r = run_one(options, list, target);
      {
        std::lock_guard lock(mu);
        done.push_back(std::move(r));
      }
      cv.notify_one();
    }
  };

  const unsigned n = std::min<std::size_t>(std::max(1u, options.workers), tests.size());
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);

  for (std::size_t received = 0; received < tests.size(); ++received) {
    std::unique_lock lock(mu);
    cv.wait(lock, [&] { return !done.empty(); });
    TestResult r = std::move(done.front());
    done.pop_front();
    lock.unlock();
    if (on_done) on_done(r);
    summary.results.push_back(std::move(r));
  }
  for (auto& t : pool) t.join();

  std::sort(summary.results.begin(), summary.results.end(),
            [](const TestResult& a, const TestResult& b) { return a.target < b.target; });
  const bool all_pass = std::all_of(summary.results.begin(), summary.results.end(), [](auto& r) {
    return r.status == TestResult::Status::pass;
  });
  summary.exit_code = all_pass ? 0 : 1;
  return summary;
}

std::string report(const std::vector<TestResult>& results) {
  std::string out;
  std::size_t passed = 0;
  char duration[32];
  for (const auto& r : results) {
    const bool pass = r.status == TestResult::Status::pass;
    passed += pass;
    std::snprintf(duration, sizeof duration, "%.2fs", r.duration);
    out += std::string(pass ? "PASS" : "FAIL") + "  " + r.target + "  " + duration + "\n";
  }
  if (passed != results.size()) {
    out += "\nFailed:\n";
    for (const auto& r : results) {
      if (r.status == TestResult::Status::pass) continue;
      out += "  " + r.target + "  (log: " + r.output_file.string() + ")\n";
    }
  }
  out += "\n" + std::to_string(results.size()) + " total, " + std::to_string(passed) +
         " passed, " + std::to_string(results.size() - passed) + " failed\n";
  return out;
}

}  // namespace hbs::testrunner
