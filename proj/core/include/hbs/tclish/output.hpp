#pragma once

#include <string>
#include <string_view>

namespace hbs::tclish {

/// Destination for `puts` and for the output of child processes that
/// inherit the interpreter's standard output.
class OutputSink {
 public:
  virtual ~OutputSink() = default;

  virtual void write(std::string_view text) = 0;
  virtual void write_err(std::string_view text) = 0;

  /// Descriptor a child process may write to directly, or -1 when child
  /// output has to be piped back through write().
  virtual int stdout_fd() const { return -1; }
  virtual int stderr_fd() const { return -1; }
};

/// Unbuffered writes to a pair of descriptors (stdout/stderr, or one log file
/// for both). Does not own the descriptors.
class FdSink final : public OutputSink {
 public:
  FdSink(int out_fd, int err_fd) : out_(out_fd), err_(err_fd) {}

  void write(std::string_view text) override;
  void write_err(std::string_view text) override;
  int stdout_fd() const override { return out_; }
  int stderr_fd() const override { return err_; }

 private:
  int out_;
  int err_;
};

class StringSink final : public OutputSink {
 public:
  void write(std::string_view text) override { out_ += text; }
  void write_err(std::string_view text) override { err_ += text; }

  const std::string& out() const { return out_; }
  const std::string& err() const { return err_; }
  void clear() {
    out_.clear();
    err_.clear();
  }

 private:
  std::string out_;
  std::string err_;
};

class NullSink final : public OutputSink {
 public:
  void write(std::string_view) override {}
  void write_err(std::string_view) override {}
};

}  // namespace hbs::tclish
