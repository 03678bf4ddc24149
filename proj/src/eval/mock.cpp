#include "framepick/eval/mock.hpp"

#include <charconv>
#include <filesystem>
#include <map>

#include "framepick/error.hpp"
#include "framepick/eval/prompt.hpp"

namespace framepick::eval {

namespace {

std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 1469598103934665603ull) {
  for (const char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

/// Number of "X. " option lines in a canonical prompt.
std::size_t count_options(std::string_view prompt) {
  std::size_t n = 0;
  std::size_t pos = 0;
  while ((pos = prompt.find('\n', pos)) != std::string_view::npos) {
    ++pos;
    if (pos + 2 < prompt.size() && prompt[pos] == option_label(n) && prompt[pos + 1] == '.' &&
        prompt[pos + 2] == ' ') {
      ++n;
    }
  }
  return std::max<std::size_t>(n, 1);
}

std::string oracle_key(std::string_view prompt, std::string_view video_id) {
  std::string key(video_id);
  key += '\x1f';
  key += prompt;
  return key;
}

std::shared_ptr<const std::map<std::string, char>> answer_table(const std::vector<QaItem>& items) {
  auto table = std::make_shared<std::map<std::string, char>>();
  for (const QaItem& item : items) {
    const auto [it, inserted] =
        table->emplace(oracle_key(build_prompt(item), item.video_id), item.answer_label);
    if (!inserted && it->second != item.answer_label) {
      throw ConfigError("oracle mock cannot tell item '" + item.item_id +
                        "' apart from another item with the same question and video");
    }
  }
  return table;
}

std::string oracle_answer(const std::map<std::string, char>& table, const AdapterRequest& req) {
  if (req.images.empty()) return std::string(kRefusal);
  const auto it = table.find(oracle_key(req.prompt, video_id_from_image(req.images.front())));
  if (it == table.end()) return std::string(kRefusal);
  return std::string(1, it->second);
}

}  // namespace

std::string video_id_from_image(std::string_view path) {
  const std::string stem = std::filesystem::path(std::string(path)).stem().string();
  const auto us = stem.rfind('_');
  return us == std::string::npos ? stem : stem.substr(0, us);
}

std::unique_ptr<MockAdapter> make_builtin_mock(std::string_view spec,
                                               const std::vector<QaItem>& items) {
  const auto colon = spec.find(':');
  const std::string_view mode = spec.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? "" : spec.substr(colon + 1);

  if (mode == "constant") {
    if (arg.size() != 1 || arg[0] < 'A' || arg[0] > 'Z') {
      throw ConfigError("mock 'constant' takes one capital letter, e.g. constant:A");
    }
    const std::string letter(arg);
    return std::make_unique<MockAdapter>([letter](const AdapterRequest&) { return letter; });
  }
  if (mode == "hash" && arg.empty()) {
    return std::make_unique<MockAdapter>([](const AdapterRequest& req) {
      std::uint64_t h = fnv1a(req.prompt);
      for (const auto& img : req.images) h = fnv1a(img, fnv1a("\n", h));
      return std::string(1, option_label(h % count_options(req.prompt)));
    });
  }
  if (mode == "oracle" && arg.empty()) {
    auto table = answer_table(items);
    return std::make_unique<MockAdapter>(
        [table](const AdapterRequest& req) { return oracle_answer(*table, req); });
  }
  if (mode == "oracle-min") {
    std::size_t k = 0;
    const auto [end, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), k);
    if (ec != std::errc() || end != arg.data() + arg.size() || k == 0) {
      throw ConfigError("mock 'oracle-min' takes a positive frame count, e.g. oracle-min:64");
    }
    auto table = answer_table(items);
    return std::make_unique<MockAdapter>([table, k](const AdapterRequest& req) {
      if (req.images.size() < k) return std::string(kRefusal);
      return oracle_answer(*table, req);
    });
  }
  throw ConfigError("unknown mock '" + std::string(spec) +
                    "' (expected constant:X, hash, oracle or oracle-min:K)");
}

}  // namespace framepick::eval
