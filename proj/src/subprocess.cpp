#include "framepick/subprocess.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include "framepick/error.hpp"

namespace framepick {

std::vector<std::string> split_command(std::string_view command) {
  std::vector<std::string> words;
  std::string current;
  bool in_word = false;
  for (std::size_t i = 0; i < command.size(); ++i) {
    const char c = command[i];
    if (c == '\'') {
      const std::size_t end = command.find('\'', i + 1);
      if (end == std::string_view::npos) throw ConfigError("unterminated single quote in command");
      current.append(command.substr(i + 1, end - i - 1));
      i = end;
      in_word = true;
    } else if (c == '"') {
      std::size_t j = i + 1;
      for (; j < command.size() && command[j] != '"'; ++j) {
        if (command[j] == '\\' && j + 1 < command.size() &&
            std::strchr("\"\\$`", command[j + 1]) != nullptr) {
          ++j;
        }
        current.push_back(command[j]);
      }
      if (j >= command.size()) throw ConfigError("unterminated double quote in command");
      i = j;
      in_word = true;
    } else if (c == '\\' && i + 1 < command.size()) {
      current.push_back(command[++i]);
      in_word = true;
    } else if (c == ' ' || c == '\t' || c == '\n') {
      if (in_word) words.push_back(std::move(current));
      current.clear();
      in_word = false;
    } else {
      current.push_back(c);
      in_word = true;
    }
  }
  if (in_word) words.push_back(std::move(current));
  return words;
}

namespace {

struct Pipe {
  int read = -1;
  int write = -1;
};

Pipe make_pipe() {
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) {
    throw IoError(std::string("pipe: ") + std::strerror(errno));
  }
  return {fds[0], fds[1]};
}

void close_fd(int& fd) {
  if (fd >= 0) {
    ::close(fd);
    fd = -1;
  }
}

int decode_status(int status) {
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  if (WIFSIGNALED(status)) return 128 + WTERMSIG(status);
  return -1;
}

}  // namespace

Subprocess::Subprocess(const std::vector<std::string>& argv, Options options) {
  if (argv.empty()) throw ConfigError("empty command");
  Pipe in, out, err;
  Pipe report = make_pipe();  // carries execvp's errno back to the parent
  try {
    if (options.pipe_stdin) in = make_pipe();
    if (options.pipe_stdout) out = make_pipe();
    if (options.pipe_stderr) err = make_pipe();
  } catch (...) {
    for (int fd : {in.read, in.write, out.read, out.write, err.read, err.write, report.read,
                   report.write}) {
      if (fd >= 0) ::close(fd);
    }
    throw;
  }

  std::vector<char*> args;
  args.reserve(argv.size() + 1);
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  pid_ = ::fork();
  if (pid_ < 0) throw IoError(std::string("fork: ") + std::strerror(errno));
  if (pid_ == 0) {
    if (in.read >= 0) ::dup2(in.read, STDIN_FILENO);
    if (out.write >= 0) ::dup2(out.write, STDOUT_FILENO);
    if (err.write >= 0) ::dup2(err.write, STDERR_FILENO);
    ::signal(SIGPIPE, SIG_DFL);
    ::execvp(args[0], args.data());
    const int code = errno;
    [[maybe_unused]] auto n = ::write(report.write, &code, sizeof(code));
    ::_exit(127);
  }

  ::close(report.write);
  for (int* fd : {&in.read, &out.write, &err.write}) close_fd(*fd);
  stdin_fd_ = in.write;
  stdout_fd_ = out.read;
  stderr_fd_ = err.read;

  int child_errno = 0;
  ssize_t got;
  do {
    got = ::read(report.read, &child_errno, sizeof(child_errno));
  } while (got < 0 && errno == EINTR);
  ::close(report.read);
  if (got == sizeof(child_errno)) {
    wait();
    close_fd(stdin_fd_);
    close_fd(stdout_fd_);
    close_fd(stderr_fd_);
    throw IoError("cannot execute '" + argv[0] + "': " + std::strerror(child_errno));
  }
}

Subprocess::~Subprocess() {
  close_fd(stdin_fd_);
  if (pid_ > 0 && !poll()) {
    kill();
    wait();
  }
  close_fd(stdout_fd_);
  close_fd(stderr_fd_);
}

void Subprocess::close_stdin() { close_fd(stdin_fd_); }

int Subprocess::wait() {
  std::lock_guard lock(status_mutex_);
  if (status_) return *status_;
  int status = 0;
  pid_t r;
  do {
    r = ::waitpid(pid_, &status, 0);
  } while (r < 0 && errno == EINTR);
  status_ = r < 0 ? -1 : decode_status(status);
  return *status_;
}

std::optional<int> Subprocess::poll() {
  std::lock_guard lock(status_mutex_);
  if (status_) return status_;
  int status = 0;
  const pid_t r = ::waitpid(pid_, &status, WNOHANG);
  if (r == pid_) status_ = decode_status(status);
  return status_;
}

void Subprocess::kill() {
  std::lock_guard lock(status_mutex_);
  if (!status_ && pid_ > 0) ::kill(pid_, SIGKILL);
}

ProcessResult run_process(const std::vector<std::string>& argv) {
  Subprocess proc(argv, {.pipe_stdin = false, .pipe_stdout = true, .pipe_stderr = true});
  ProcessResult result;
  pollfd fds[2] = {{proc.stdout_fd(), POLLIN, 0}, {proc.stderr_fd(), POLLIN, 0}};
  std::string* sinks[2] = {&result.out, &result.err};
  int open = 2;
  char buf[4096];
  while (open > 0) {
    if (::poll(fds, 2, -1) < 0) {
      if (errno == EINTR) continue;
      throw IoError(std::string("poll: ") + std::strerror(errno));
    }
    for (int k = 0; k < 2; ++k) {
      if (fds[k].fd < 0 || fds[k].revents == 0) continue;
      const ssize_t n = ::read(fds[k].fd, buf, sizeof(buf));
      if (n > 0) {
        sinks[k]->append(buf, static_cast<std::size_t>(n));
      } else if (n == 0 || errno != EINTR) {
        fds[k].fd = -1;
        --open;
      }
    }
  }
  result.exit_code = proc.wait();
  return result;
}

bool write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

}  // namespace framepick
