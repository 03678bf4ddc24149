// Test adapter speaking the harness wire protocol on stdin/stdout.
//
//   echo       answer every request with --letter
//   threshold  answer --letter when at least --min-frames images arrive,
//              otherwise refuse
//   reverse    collect requests until input goes idle, answer newest first
//   garbage    answer with a line that is not JSON
//   unknown-id answer with an id that was never sent
//   exit       exit with status 7 on the first request, after a stderr note
//
// --echo-prompt replaces --letter with the request's prompt text, which lets
// tests tell the answers apart.
// --slow-first-ms answers the first request late, in the background, so tests
// can exercise a timeout followed by a stray response.

#include <poll.h>
#include <unistd.h>

#include <chrono>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "framepick/eval/adapter.hpp"
#include "framepick/subprocess.hpp"

namespace {

using framepick::eval::AdapterRequest;

std::mutex out_mutex;
bool echo_prompt = false;

void send(const std::string& line) {
  const std::string out = line + "\n";
  std::lock_guard lock(out_mutex);
  framepick::write_all(STDOUT_FILENO, out);
}

void answer(const std::string& id, const std::string& text) {
  send(framepick::eval::encode_response(id, text));
}

/// Reads one line from stdin; returns false at EOF. With idle_ms >= 0,
/// also returns false (and sets idle) when nothing arrives in time.
bool read_line(std::string& buffer, std::string& line, int idle_ms, bool& idle) {
  idle = false;
  for (;;) {
    if (const auto nl = buffer.find('\n'); nl != std::string::npos) {
      line = buffer.substr(0, nl);
      buffer.erase(0, nl + 1);
      return true;
    }
    if (idle_ms >= 0) {
      pollfd p{STDIN_FILENO, POLLIN, 0};
      if (::poll(&p, 1, idle_ms) == 0) {
        idle = true;
        return false;
      }
    }
    char chunk[4096];
    const ssize_t n = ::read(STDIN_FILENO, chunk, sizeof(chunk));
    if (n <= 0) {
      if (buffer.empty()) return false;
      line.swap(buffer);
      buffer.clear();
      return true;
    }
    buffer.append(chunk, static_cast<std::size_t>(n));
  }
}

/// Malformed requests get an empty answer under whatever id can be found.
std::optional<AdapterRequest> decode_or_reject(const std::string& line) {
  try {
    return framepick::eval::decode_request(line);
  } catch (const framepick::Error&) {
    const auto doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_object() && doc.contains("id") && doc["id"].is_string()) {
      answer(doc["id"].get<std::string>(), "");
    }
    return std::nullopt;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wire-protocol test adapter"};
  std::string mode = "echo";
  std::string letter = "A";
  std::size_t min_frames = 1;
  int slow_first_ms = 0;
  int idle_ms = 50;
  app.add_option("--mode", mode)
      ->check(CLI::IsMember({"echo", "threshold", "reverse", "garbage", "unknown-id", "exit"}));
  app.add_option("--letter", letter);
  app.add_option("--min-frames", min_frames);
  app.add_option("--slow-first-ms", slow_first_ms);
  app.add_option("--idle-ms", idle_ms);
  app.add_flag("--echo-prompt", echo_prompt);
  CLI11_PARSE(app, argc, argv);

  std::string buffer, line;
  bool idle = false;
  bool first = true;
  std::vector<std::jthread> slow;

  if (mode == "reverse") {
    std::vector<AdapterRequest> held;
    for (;;) {
      const bool got = read_line(buffer, line, idle_ms, idle);
      if (got) {
        if (auto req = decode_or_reject(line)) held.push_back(std::move(*req));
        continue;
      }
      for (auto it = held.rbegin(); it != held.rend(); ++it) {
        answer(it->id, echo_prompt ? it->prompt : letter);
      }
      held.clear();
      if (!idle) return 0;
    }
  }

  while (read_line(buffer, line, -1, idle)) {
    auto req = decode_or_reject(line);
    if (!req) continue;
    if (first && slow_first_ms > 0) {
      first = false;
      // Answered late in the background while later requests proceed.
      slow.emplace_back([id = req->id, text = echo_prompt ? req->prompt : letter, slow_first_ms] {
        std::this_thread::sleep_for(std::chrono::milliseconds(slow_first_ms));
        answer(id, text);
      });
      continue;
    }
    first = false;
    const std::string reply = echo_prompt ? req->prompt : letter;
    if (mode == "echo") {
      answer(req->id, reply);
    } else if (mode == "threshold") {
      answer(req->id, req->images.size() >= min_frames ? reply : "I cannot tell.");
    } else if (mode == "garbage") {
      send("this is not json");
    } else if (mode == "unknown-id") {
      answer("not-" + req->id, reply);
    } else if (mode == "exit") {
      std::cerr << "mock adapter: exiting on purpose" << std::endl;
      return 7;
    }
  }
  return 0;
}
