#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "framepick/eval/dataset.hpp"

namespace framepick::eval {

inline constexpr std::string_view kAnswerInstruction = "Answer with the option's letter only.";

/// The canonical prompt used for every dataset:
///
///   <question>
///   A. <option A>
///   B. <option B>
///   ...
///   Answer with the option's letter only.
///
/// Lines are joined with '\n', with no trailing newline. Option text is
/// emitted verbatim, embedded newlines included.
std::string build_prompt(const QaItem& item);

/// Maps a free-text response to an option label, or nullopt (Unparsed).
///
/// Rules are tried in order and the first hit wins; matching ignores case and
/// only letters within A..label(n_options) count:
///   1. the response opens with a standalone letter: after leading
///      whitespace and opening punctuation, a letter followed by the end,
///      whitespace or punctuation ("B", "c.", "(D) because", "**A**");
///   2. "answer is X" (also "answer: X", "answer is option X",
///      "answer is (X)"), X standalone;
///   3. the first parenthesised letter "(X)".
std::optional<char> parse_answer(std::string_view raw, std::size_t n_options);

}  // namespace framepick::eval
