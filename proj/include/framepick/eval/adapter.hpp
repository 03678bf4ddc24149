#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "framepick/error.hpp"

namespace framepick {
class Subprocess;
}

namespace framepick::eval {

/// The adapter process could not be started or went away.
class AdapterError : public Error {
 public:
  explicit AdapterError(const std::string& message) : Error(ErrorKind::Adapter, message) {}
};

/// The adapter wrote something that is not a valid response line.
class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& message) : Error(ErrorKind::Protocol, message) {}
};

struct AdapterRequest {
  std::string id;
  std::string prompt;
  std::vector<std::string> images;
};

struct QueryOutcome {
  std::string text;
  bool timed_out = false;
};

/// A model reachable through prompt + frame images. Implementations must
/// accept concurrent query() calls.
class ModelAdapter {
 public:
  virtual ~ModelAdapter() = default;
  virtual QueryOutcome query(const std::string& prompt, const std::vector<std::string>& images,
                             std::chrono::milliseconds timeout) = 0;
};

/// Wire encoding, one compact JSON document per line (no trailing newline):
///   request  {"id": string, "prompt": string, "images": [string, ...]}
///   response {"id": string, "text": string}
std::string encode_request(const AdapterRequest& request);
std::string encode_response(const std::string& id, const std::string& text);
/// Throws ProtocolError unless `line` is a response object.
std::pair<std::string, std::string> decode_response(std::string_view line);
/// Throws ProtocolError unless `line` is a request object.
AdapterRequest decode_request(std::string_view line);

/// Speaks the wire protocol with a child process over its stdin/stdout.
///
/// Requests are tagged with unique ids and matched to responses by id, so the
/// adapter may answer in any order. At most `max_in_flight` requests are
/// outstanding; further callers block. A request that times out yields
/// timed_out = true, and its late response is discarded. Any malformed line,
/// unknown id or premature exit poisons the channel: pending and later queries
/// throw.
class ProcessAdapter final : public ModelAdapter {
 public:
  /// `command` is split like a shell command line and executed directly.
  /// Throws AdapterError when the program cannot be started.
  ProcessAdapter(const std::string& command, std::size_t max_in_flight = 4);
  ~ProcessAdapter() override;

  QueryOutcome query(const std::string& prompt, const std::vector<std::string>& images,
                     std::chrono::milliseconds timeout) override;

  /// Last few KB the adapter wrote to stderr.
  std::string stderr_tail() const;

 private:
  struct Pending {
    bool done = false;
    std::string text;
  };

  void read_loop();
  void drain_stderr();
  void fail(ErrorKind kind, const std::string& message);
  /// Requires mutex_ held and failure_ set.
  [[noreturn]] void rethrow_failure() const;

  std::unique_ptr<Subprocess> proc_;
  std::size_t max_in_flight_;

  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::map<std::string, std::shared_ptr<Pending>> pending_;
  std::set<std::string> abandoned_;
  std::size_t in_flight_ = 0;
  std::uint64_t next_id_ = 0;
  std::optional<std::pair<ErrorKind, std::string>> failure_;
  bool closing_ = false;
  bool stderr_done_ = false;
  std::string stderr_tail_;

  std::atomic<bool> stop_{false};
  std::mutex write_mutex_;
  std::thread reader_;
  std::thread stderr_reader_;
};

/// In-process adapter driven by a callback; for tests and dry runs.
class MockAdapter final : public ModelAdapter {
 public:
  using Responder = std::function<std::string(const AdapterRequest&)>;
  /// Simulated latency; a latency above the timeout yields a timeout outcome
  /// without sleeping.
  using Latency = std::function<std::chrono::milliseconds(const AdapterRequest&)>;

  explicit MockAdapter(Responder responder, Latency latency = {});

  QueryOutcome query(const std::string& prompt, const std::vector<std::string>& images,
                     std::chrono::milliseconds timeout) override;

  std::size_t calls() const;

 private:
  Responder responder_;
  Latency latency_;
  mutable std::mutex mutex_;
  std::uint64_t next_id_ = 0;
};

}  // namespace framepick::eval
