#include "framepick/eval/prompt.hpp"

#include <cctype>
#include <regex>

namespace framepick::eval {

std::string build_prompt(const QaItem& item) {
  std::string out = item.question;
  for (std::size_t i = 0; i < item.options.size(); ++i) {
    out += '\n';
    out += option_label(i);
    out += ". ";
    out += item.options[i];
  }
  out += '\n';
  out += kAnswerInstruction;
  return out;
}

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

std::optional<char> in_range(char c, std::size_t n_options) {
  const char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper >= 'A' && upper < static_cast<char>('A' + n_options)) return upper;
  return std::nullopt;
}

std::optional<char> leading_letter(std::string_view raw, std::size_t n_options) {
  std::size_t i = 0;
  while (i < raw.size() && (is_space(raw[i]) || is_punct(raw[i]))) ++i;
  if (i >= raw.size()) return std::nullopt;
  if (i + 1 < raw.size() && !is_space(raw[i + 1]) && !is_punct(raw[i + 1])) return std::nullopt;
  return in_range(raw[i], n_options);
}

std::optional<char> first_in_range(const std::string& text, const std::regex& re,
                                   std::size_t n_options) {
  for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator();
       ++it) {
    if (auto label = in_range((*it)[1].str()[0], n_options)) return label;
  }
  return std::nullopt;
}

}  // namespace

std::optional<char> parse_answer(std::string_view raw, std::size_t n_options) {
  static const std::regex answer_is(
      R"(answer\s*(?:is\s*:?|:)\s*(?:option\s*)?[(\[]?([a-z])(?=$|[^a-z0-9]))",
      std::regex::ECMAScript | std::regex::icase);
  static const std::regex parenthesised(R"(\(([a-z])\))", std::regex::ECMAScript | std::regex::icase);

  if (auto label = leading_letter(raw, n_options)) return label;
  const std::string text(raw);
  if (auto label = first_in_range(text, answer_is, n_options)) return label;
  return first_in_range(text, parenthesised, n_options);
}

}  // namespace framepick::eval
