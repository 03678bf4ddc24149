#include "framepick/eval/adapter.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>

#include <poll.h>
#include <unistd.h>

#include <json.hpp>

#include "framepick/subprocess.hpp"

namespace framepick::eval {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr std::size_t kStderrTailBytes = 4096;
constexpr int kPollMs = 100;

std::string snippet(std::string_view line) {
  constexpr std::size_t kMax = 200;
  if (line.size() <= kMax) return std::string(line);
  return std::string(line.substr(0, kMax)) + "...";
}

std::string dump(const ordered_json& doc) {
  return doc.dump(-1, ' ', false, json::error_handler_t::replace);
}

/// Reads newline-terminated lines from fd, polling so `stop` is honoured.
/// Calls on_line for each complete line; returns at EOF, error or stop.
template <typename OnLine>
void read_lines(int fd, const std::atomic<bool>& stop, OnLine on_line) {
  std::string buffer;
  char chunk[4096];
  while (!stop.load()) {
    pollfd p{fd, POLLIN, 0};
    const int r = ::poll(&p, 1, kPollMs);
    if (r < 0 && errno != EINTR) return;
    if (r <= 0) continue;
    const ssize_t n = ::read(fd, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      return;
    }
    if (n == 0) {
      if (!buffer.empty()) on_line(buffer);
      return;
    }
    buffer.append(chunk, static_cast<std::size_t>(n));
    std::size_t start = 0;
    for (std::size_t nl; (nl = buffer.find('\n', start)) != std::string::npos; start = nl + 1) {
      if (!on_line(std::string_view(buffer).substr(start, nl - start))) return;
    }
    buffer.erase(0, start);
  }
}

}  // namespace

std::string encode_request(const AdapterRequest& request) {
  ordered_json doc;
  doc["id"] = request.id;
  doc["prompt"] = request.prompt;
  doc["images"] = request.images;
  return dump(doc);
}

std::string encode_response(const std::string& id, const std::string& text) {
  ordered_json doc;
  doc["id"] = id;
  doc["text"] = text;
  return dump(doc);
}

std::pair<std::string, std::string> decode_response(std::string_view line) {
  json doc;
  try {
    doc = json::parse(line.begin(), line.end());
  } catch (const json::parse_error&) {
    throw ProtocolError("adapter response is not JSON: " + snippet(line));
  }
  if (!doc.is_object()) throw ProtocolError("adapter response is not an object: " + snippet(line));
  const auto id = doc.find("id");
  const auto text = doc.find("text");
  if (id == doc.end() || !id->is_string()) {
    throw ProtocolError("adapter response lacks a string \"id\": " + snippet(line));
  }
  if (text == doc.end() || !text->is_string()) {
    throw ProtocolError("adapter response lacks a string \"text\": " + snippet(line));
  }
  return {id->get<std::string>(), text->get<std::string>()};
}

AdapterRequest decode_request(std::string_view line) {
  json doc;
  try {
    doc = json::parse(line.begin(), line.end());
  } catch (const json::parse_error&) {
    throw ProtocolError("request is not JSON: " + snippet(line));
  }
  if (!doc.is_object()) throw ProtocolError("request is not an object");
  AdapterRequest req;
  const auto id = doc.find("id");
  const auto prompt = doc.find("prompt");
  const auto images = doc.find("images");
  if (id == doc.end() || !id->is_string()) throw ProtocolError("request lacks a string \"id\"");
  req.id = id->get<std::string>();
  if (prompt == doc.end() || !prompt->is_string()) {
    throw ProtocolError("request lacks a string \"prompt\"");
  }
  req.prompt = prompt->get<std::string>();
  if (images == doc.end() || !images->is_array()) throw ProtocolError("request lacks \"images\"");
  for (const auto& img : *images) {
    if (!img.is_string()) throw ProtocolError("request images must be strings");
    req.images.push_back(img.get<std::string>());
  }
  return req;
}

ProcessAdapter::ProcessAdapter(const std::string& command, std::size_t max_in_flight)
    : max_in_flight_(std::max<std::size_t>(1, max_in_flight)) {
  // A dead adapter must surface as a failed write, not kill the harness.
  static std::once_flag ignore_sigpipe;
  std::call_once(ignore_sigpipe, [] { std::signal(SIGPIPE, SIG_IGN); });

  std::vector<std::string> argv;
  try {
    argv = split_command(command);
  } catch (const Error& e) {
    throw AdapterError(std::string("bad adapter command: ") + e.what());
  }
  if (argv.empty()) throw AdapterError("adapter command is empty");
  try {
    proc_ = std::make_unique<Subprocess>(
        argv, Subprocess::Options{.pipe_stdin = true, .pipe_stdout = true, .pipe_stderr = true});
  } catch (const Error& e) {
    throw AdapterError(std::string("cannot start adapter: ") + e.what());
  }
  reader_ = std::thread([this] { read_loop(); });
  stderr_reader_ = std::thread([this] { drain_stderr(); });
}

ProcessAdapter::~ProcessAdapter() {
  {
    std::lock_guard lock(mutex_);
    closing_ = true;
  }
  {
    std::lock_guard lock(write_mutex_);
    proc_->close_stdin();
  }
  // Adapters must exit on closed input; give them a moment before killing.
  for (int i = 0; i < 50 && !proc_->poll(); ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  proc_->kill();
  proc_->wait();
  stop_ = true;
  if (reader_.joinable()) reader_.join();
  if (stderr_reader_.joinable()) stderr_reader_.join();
}

void ProcessAdapter::fail(ErrorKind kind, const std::string& message) {
  std::lock_guard lock(mutex_);
  if (!failure_) {
    std::string full = message;
    if (!stderr_tail_.empty()) full += "\nadapter stderr:\n" + stderr_tail_;
    failure_.emplace(kind, std::move(full));
  }
  cv_.notify_all();
}

void ProcessAdapter::rethrow_failure() const {
  if (failure_->first == ErrorKind::Protocol) throw ProtocolError(failure_->second);
  throw AdapterError(failure_->second);
}

void ProcessAdapter::read_loop() {
  read_lines(proc_->stdout_fd(), stop_, [this](std::string_view line) {
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) return true;
    std::pair<std::string, std::string> response;
    try {
      response = decode_response(line);
    } catch (const ProtocolError& e) {
      fail(ErrorKind::Protocol, e.what());
      return false;
    }
    std::unique_lock lock(mutex_);
    if (auto it = pending_.find(response.first); it != pending_.end()) {
      it->second->done = true;
      it->second->text = std::move(response.second);
      pending_.erase(it);
      cv_.notify_all();
      return true;
    }
    if (abandoned_.erase(response.first) > 0) return true;  // late answer to a timed-out request
    lock.unlock();
    fail(ErrorKind::Protocol, "adapter answered unknown request id \"" + response.first + "\"");
    return false;
  });
  std::unique_lock lock(mutex_);
  if (!closing_ && !failure_) {
    // The child usually exits right after closing stdout; give it a moment
    // so the status and the rest of its stderr make it into the message.
    cv_.wait_for(lock, std::chrono::seconds(1), [this] { return stderr_done_ || closing_; });
    lock.unlock();
    std::optional<int> status;
    for (int i = 0; i < 50 && !(status = proc_->poll()); ++i) {
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    lock.lock();
  }
  if (!closing_ && !failure_) {
    std::string msg = "adapter closed its output";
    if (auto status = proc_->poll()) msg += " (exit status " + std::to_string(*status) + ")";
    if (!stderr_tail_.empty()) msg += "\nadapter stderr:\n" + stderr_tail_;
    failure_.emplace(ErrorKind::Adapter, std::move(msg));
  }
  cv_.notify_all();
}

void ProcessAdapter::drain_stderr() {
  read_lines(proc_->stderr_fd(), stop_, [this](std::string_view line) {
    std::lock_guard lock(mutex_);
    stderr_tail_.append(line);
    stderr_tail_.push_back('\n');
    if (stderr_tail_.size() > kStderrTailBytes) {
      stderr_tail_.erase(0, stderr_tail_.size() - kStderrTailBytes);
    }
    return true;
  });
  std::lock_guard lock(mutex_);
  stderr_done_ = true;
  cv_.notify_all();
}

std::string ProcessAdapter::stderr_tail() const {
  std::lock_guard lock(mutex_);
  return stderr_tail_;
}

QueryOutcome ProcessAdapter::query(const std::string& prompt,
                                   const std::vector<std::string>& images,
                                   std::chrono::milliseconds timeout) {
  auto pending = std::make_shared<Pending>();
  AdapterRequest request{"", prompt, images};
  {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return in_flight_ < max_in_flight_ || failure_; });
    if (failure_) rethrow_failure();
    ++in_flight_;
    request.id = "q" + std::to_string(next_id_++);
    pending_[request.id] = pending;
  }
  auto release = [&](std::unique_lock<std::mutex>&) {
    --in_flight_;
    cv_.notify_all();
  };

  bool written;
  {
    const std::string line = encode_request(request) + "\n";
    std::lock_guard lock(write_mutex_);
    written = proc_->stdin_fd() >= 0 && write_all(proc_->stdin_fd(), line);
  }
  if (!written) fail(ErrorKind::Adapter, "adapter stopped reading its input");

  const auto deadline = std::chrono::steady_clock::now() + timeout;
  std::unique_lock lock(mutex_);
  cv_.wait_until(lock, deadline, [&] { return pending->done || failure_.has_value(); });
  if (pending->done) {
    release(lock);
    return {std::move(pending->text), false};
  }
  pending_.erase(request.id);
  release(lock);
  if (failure_) rethrow_failure();
  abandoned_.insert(request.id);
  return {"", true};
}

MockAdapter::MockAdapter(Responder responder, Latency latency)
    : responder_(std::move(responder)), latency_(std::move(latency)) {}

QueryOutcome MockAdapter::query(const std::string& prompt, const std::vector<std::string>& images,
                                std::chrono::milliseconds timeout) {
  AdapterRequest request{"", prompt, images};
  {
    std::lock_guard lock(mutex_);
    request.id = "m" + std::to_string(next_id_++);
  }
  if (latency_ && latency_(request) > timeout) return {"", true};
  return {responder_(request), false};
}

std::size_t MockAdapter::calls() const {
  std::lock_guard lock(mutex_);
  return static_cast<std::size_t>(next_id_);
}

}  // namespace framepick::eval
