#include <fstream>

#include <doctest.h>
#include <json.hpp>

#include "framepick/error.hpp"
#include "framepick/eval/dataset.hpp"
#include "framepick/eval/prompt.hpp"

using namespace framepick;
using namespace framepick::eval;

namespace {

const std::filesystem::path kData = FRAMEPICK_TEST_DATA;

std::string line(const std::string& item_id, const std::string& answer, int n_options) {
  nlohmann::json o = {{"item_id", item_id}, {"video_id", "v"}, {"question", "Q?"},
                      {"answer_label", answer}, {"task_tag", "t"}};
  o["options"] = nlohmann::json::array();
  for (int i = 0; i < n_options; ++i) o["options"].push_back("opt" + std::to_string(i));
  return o.dump() + "\n";
}

std::string error_of(const std::string& text) {
  try {
    parse_dataset(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("three-line fixture") {
  const auto items = load_dataset(kData / "dataset_small.jsonl");
  REQUIRE(items.size() == 3);
  CHECK(items[0].item_id == "q1");
  CHECK(items[0].answer_label == 'B');
  CHECK(items[0].option_count() == 4);
  CHECK(items[1].options == std::vector<std::string>{"He sits", "He stands"});
  CHECK(items[2].task_tag == "action recognition");
  CHECK(items[2].video_id == "clip-2");
}

TEST_CASE("dataset schema errors") {
  CHECK(parse_dataset(line("a", "D", 4) + "\n  \n" + line("b", "A", 2)).size() == 2);
  SUBCASE("answer outside the options") {
    const auto msg = error_of(line("a", "A", 4) + line("b", "E", 4));
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("'E'") != std::string::npos);
  }
  SUBCASE("duplicate item ids") {
    CHECK(error_of(line("a", "A", 4) + line("a", "A", 4)).find("duplicate") != std::string::npos);
  }
  SUBCASE("option counts") {
    CHECK_THROWS_AS(parse_dataset(line("a", "A", 1)), ValidationError);
    CHECK_THROWS_AS(parse_dataset(line("a", "A", 7)), ValidationError);
    CHECK_NOTHROW(parse_dataset(line("a", "F", 6)));
  }
  SUBCASE("labelled options must be contiguous from A") {
    const std::string bad =
        R"({"item_id":"a","video_id":"v","question":"q","options":[{"label":"A","text":"x"},{"label":"C","text":"y"}],"answer_label":"A","task_tag":"t"})";
    CHECK_THROWS_AS(parse_dataset(bad), ValidationError);
  }
  SUBCASE("missing fields and bad JSON") {
    CHECK_THROWS_AS(parse_dataset(R"({"item_id":"a"})"), ValidationError);
    CHECK_THROWS_AS(parse_dataset("{oops\n"), ParseError);
    CHECK_THROWS_AS(parse_dataset("[1,2]\n"), ValidationError);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_dataset(kData / "missing.jsonl"), IoError); }
}

TEST_CASE("prompt golden text") {
  QaItem two{"i", "v", "Is the door open?", {"Yes", "No"}, 'A', "t"};
  CHECK(build_prompt(two) == "Is the door open?\nA. Yes\nB. No\nAnswer with the option's letter only.");

  QaItem six{"i", "v", "Pick one.", {"one", "two", "three", "four", "five", "six"}, 'F', "t"};
  CHECK(build_prompt(six) ==
        "Pick one.\nA. one\nB. two\nC. three\nD. four\nE. five\nF. six\n"
        "Answer with the option's letter only.");

  QaItem multiline{"i", "v", "Which caption?", {"first line\nsecond line", "other"}, 'A', "t"};
  CHECK(build_prompt(multiline) ==
        "Which caption?\nA. first line\nsecond line\nB. other\nAnswer with the option's letter only.");
}

TEST_CASE("parse_answer examples") {
  CHECK(parse_answer("A", 4) == 'A');
  CHECK(parse_answer("The answer is (c) because the ball drops", 4) == 'C');
  CHECK_FALSE(parse_answer("I cannot tell.", 4).has_value());
}

TEST_CASE("adjudicator corpus") {
  std::ifstream in(kData / "adjudicator_corpus.jsonl");
  REQUIRE(in);
  std::string text;
  std::size_t count = 0;
  while (std::getline(in, text)) {
    const auto row = nlohmann::json::parse(text);
    const auto raw = row["raw"].get<std::string>();
    const auto n = row["n_options"].get<std::size_t>();
    const std::optional<char> expected =
        row["expected"].is_null() ? std::nullopt
                                  : std::optional<char>(row["expected"].get<std::string>()[0]);
    CAPTURE(raw);
    CHECK(parse_answer(raw, n) == expected);
    ++count;
  }
  CHECK(count >= 30);
}

TEST_CASE("parse_answer is pure and range-bounded") {
  const char* samples[] = {"A", "f", "(e)", "answer is D", "xyz", "B) or (C)"};
  for (const char* s : samples) {
    for (std::size_t n = kMinOptions; n <= kMaxOptions; ++n) {
      const auto a = parse_answer(s, n);
      CHECK(a == parse_answer(s, n));
      if (a) {
        CHECK(*a >= 'A');
        CHECK(*a < static_cast<char>('A' + n));
      }
    }
  }
}
