#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace framepick::eval {

inline constexpr std::size_t kMinOptions = 2;
inline constexpr std::size_t kMaxOptions = 6;

/// One multiple-choice question. Option i carries label 'A' + i.
struct QaItem {
  std::string item_id;
  std::string video_id;
  std::string question;
  std::vector<std::string> options;
  char answer_label = 'A';
  std::string task_tag;

  std::size_t option_count() const noexcept { return options.size(); }
};

/// 'A' + index
inline char option_label(std::size_t index) noexcept { return static_cast<char>('A' + index); }

/// Parses a JSON-lines dataset. Each non-blank line is an object with
/// item_id, video_id, question, options, answer_label and task_tag; options
/// is either an array of strings or an array of {"label", "text"} objects
/// labelled A, B, ... in order. Unknown keys are ignored. Errors carry the
/// 1-based line number.
std::vector<QaItem> parse_dataset(std::string_view text);
std::vector<QaItem> load_dataset(const std::filesystem::path& path);

}  // namespace framepick::eval
