#include "hbs/process.hpp"

#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cctype>
#include <cerrno>
#include <cstring>
#include <optional>

#include "hbs/error.hpp"

extern char** environ;

namespace hbs {

namespace {

std::atomic<std::uint64_t> g_spawned{0};

class Pipe {
 public:
  Pipe() {
    if (::pipe2(fds_, O_CLOEXEC) != 0) {
      throw Error(Errc::spawn_failure, std::string("pipe failed: ") + std::strerror(errno));
    }
  }
  ~Pipe() {
    close_read();
    close_write();
  }
  Pipe(const Pipe&) = delete;
  Pipe& operator=(const Pipe&) = delete;

  int read_end() const { return fds_[0]; }
  int write_end() const { return fds_[1]; }
  void close_read() {
    if (fds_[0] >= 0) ::close(fds_[0]);
    fds_[0] = -1;
  }
  void close_write() {
    if (fds_[1] >= 0) ::close(fds_[1]);
    fds_[1] = -1;
  }

 private:
  int fds_[2] = {-1, -1};
};

class FileActions {
 public:
  FileActions() { posix_spawn_file_actions_init(&actions_); }
  ~FileActions() { posix_spawn_file_actions_destroy(&actions_); }
  FileActions(const FileActions&) = delete;
  FileActions& operator=(const FileActions&) = delete;
  posix_spawn_file_actions_t* get() { return &actions_; }

 private:
  posix_spawn_file_actions_t actions_;
};

std::string posix_message(int err) {
  std::string text = std::strerror(err);
  if (!text.empty()) text[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(text[0])));
  return text;
}

void drain(Pipe* out_pipe, std::string& out, Pipe* err_pipe, std::string& err) {
  char buffer[4096];
  while (true) {
    pollfd fds[2];
    nfds_t count = 0;
    std::string* sinks[2];
    Pipe* pipes[2];
    if (out_pipe && out_pipe->read_end() >= 0) {
      fds[count] = {out_pipe->read_end(), POLLIN, 0};
      sinks[count] = &out;
      pipes[count++] = out_pipe;
    }
    if (err_pipe && err_pipe->read_end() >= 0) {
      fds[count] = {err_pipe->read_end(), POLLIN, 0};
      sinks[count] = &err;
      pipes[count++] = err_pipe;
    }
    if (count == 0) return;
    if (::poll(fds, count, -1) < 0) {
      if (errno == EINTR) continue;
      return;
    }
    for (nfds_t i = 0; i < count; ++i) {
      if (fds[i].revents == 0) continue;
      const ssize_t n = ::read(fds[i].fd, buffer, sizeof buffer);
      if (n > 0) {
        sinks[i]->append(buffer, static_cast<std::size_t>(n));
      } else if (n == 0 || errno != EINTR) {
        pipes[i]->close_read();
      }
    }
  }
}

}  // namespace

std::uint64_t spawn_count() noexcept { return g_spawned.load(); }

SpawnResult run_process(const SpawnRequest& request) {
  if (request.argv.empty()) throw Error(Errc::bad_exec, "empty command");

  std::optional<Pipe> out_pipe, err_pipe;
  FileActions actions;
  if (request.out.kind == StreamTarget::Kind::capture) {
    out_pipe.emplace();
    posix_spawn_file_actions_adddup2(actions.get(), out_pipe->write_end(), STDOUT_FILENO);
  } else if (request.out.fd != STDOUT_FILENO) {
    posix_spawn_file_actions_adddup2(actions.get(), request.out.fd, STDOUT_FILENO);
  }
  if (request.err.kind == StreamTarget::Kind::capture) {
    err_pipe.emplace();
    posix_spawn_file_actions_adddup2(actions.get(), err_pipe->write_end(), STDERR_FILENO);
  } else if (request.err.fd != STDERR_FILENO) {
    posix_spawn_file_actions_adddup2(actions.get(), request.err.fd, STDERR_FILENO);
  }
  const std::string cwd = request.cwd.string();
  if (!cwd.empty()) posix_spawn_file_actions_addchdir_np(actions.get(), cwd.c_str());

  std::vector<char*> argv;
  argv.reserve(request.argv.size() + 1);
  for (const auto& arg : request.argv) argv.push_back(const_cast<char*>(arg.c_str()));
  argv.push_back(nullptr);

  pid_t pid = 0;
  const int rc = ::posix_spawnp(&pid, argv[0], actions.get(), nullptr, argv.data(), environ);
  if (rc != 0) {
    throw Error(Errc::spawn_failure,
                "couldn't execute \"" + request.argv[0] + "\": " + posix_message(rc));
  }
  g_spawned.fetch_add(1);

  SpawnResult result;
  if (out_pipe) out_pipe->close_write();
  if (err_pipe) err_pipe->close_write();
  drain(out_pipe ? &*out_pipe : nullptr, result.out, err_pipe ? &*err_pipe : nullptr, result.err);

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0) {
    if (errno != EINTR) {
      result.exit_code = 127;
      return result;
    }
  }
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.exit_code = 128 + WTERMSIG(status);
  }
  return result;
}

}  // namespace hbs
