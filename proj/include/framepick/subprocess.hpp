#pragma once

#include <chrono>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <sys/types.h>

namespace framepick {

/// Splits a command line into words: whitespace separated, with single
/// quotes, double quotes and backslash escapes handled like a POSIX shell
/// (no expansion). Throws ConfigError on unterminated quotes.
std::vector<std::string> split_command(std::string_view command);

/// A child process with optional pipes to its stdin/stdout/stderr.
/// The child is killed and reaped on destruction if still running.
class Subprocess {
 public:
  struct Options {
    bool pipe_stdin = false;
    bool pipe_stdout = false;
    bool pipe_stderr = false;
  };

  /// execvp(argv[0], argv). Throws IoError with the errno text when the
  /// program cannot be executed.
  Subprocess(const std::vector<std::string>& argv, Options options);
  ~Subprocess();

  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;

  pid_t pid() const noexcept { return pid_; }
  int stdin_fd() const noexcept { return stdin_fd_; }
  int stdout_fd() const noexcept { return stdout_fd_; }
  int stderr_fd() const noexcept { return stderr_fd_; }

  void close_stdin();
  /// Blocks until exit; returns the exit status, or 128 + signal. wait, poll
  /// and kill may be called from different threads.
  int wait();
  /// Non-blocking; the exit status once the child has exited.
  std::optional<int> poll();
  void kill();

 private:
  pid_t pid_ = -1;
  int stdin_fd_ = -1;
  int stdout_fd_ = -1;
  int stderr_fd_ = -1;
  std::optional<int> status_;
  std::mutex status_mutex_;
};

struct ProcessResult {
  int exit_code = 0;
  std::string out;
  std::string err;
};

/// Runs to completion, capturing stdout and stderr.
ProcessResult run_process(const std::vector<std::string>& argv);

/// Writes all bytes, retrying on EINTR and short writes. Returns false when
/// the reader has gone away.
bool write_all(int fd, std::string_view data);

}  // namespace framepick
