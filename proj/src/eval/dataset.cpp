#include "framepick/eval/dataset.hpp"

#include <set>

#include <json.hpp>

#include "framepick/error.hpp"
#include "framepick/manifest.hpp"

namespace framepick::eval {

namespace {

using json = nlohmann::json;

std::string required_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(std::string("missing field '") + key + "'");
  if (!it->is_string()) throw ValidationError(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::vector<std::string> parse_options(const json& obj) {
  auto it = obj.find("options");
  if (it == obj.end()) throw ValidationError("missing field 'options'");
  if (!it->is_array()) throw ValidationError("field 'options' must be an array");
  const json& arr = *it;
  if (arr.size() < kMinOptions || arr.size() > kMaxOptions) {
    throw ValidationError("expected 2 to 6 options, got " + std::to_string(arr.size()));
  }
  std::vector<std::string> options;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const json& o = arr[i];
    if (o.is_string()) {
      options.push_back(o.get<std::string>());
      continue;
    }
    if (!o.is_object()) throw ValidationError("option " + std::to_string(i) + " must be a string or object");
    const std::string label = required_string(o, "label");
    if (label.size() != 1 || label[0] != option_label(i)) {
      throw ValidationError("option labels must run A, B, C... in order; option " +
                            std::to_string(i) + " is labelled '" + label + "'");
    }
    options.push_back(required_string(o, "text"));
  }
  return options;
}

}  // namespace

std::vector<QaItem> parse_dataset(std::string_view text) {
  std::vector<QaItem> items;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = "dataset line " + std::to_string(line_no) + ": ";
    json obj;
    try {
      obj = json::parse(line.begin(), line.end());
    } catch (const json::parse_error& e) {
      throw ParseError(where + "malformed JSON (" + e.what() + ")");
    }
    try {
      if (!obj.is_object()) throw ValidationError("expected a JSON object");
      QaItem item;
      item.item_id = required_string(obj, "item_id");
      item.video_id = required_string(obj, "video_id");
      item.question = required_string(obj, "question");
      item.options = parse_options(obj);
      item.task_tag = required_string(obj, "task_tag");
      const std::string answer = required_string(obj, "answer_label");
      if (answer.size() != 1 || answer[0] < 'A' ||
          answer[0] >= option_label(item.options.size())) {
        throw ValidationError("answer_label '" + answer + "' is not one of the " +
                              std::to_string(item.options.size()) + " option labels");
      }
      item.answer_label = answer[0];
      if (item.item_id.empty()) throw ValidationError("item_id must not be empty");
      if (!seen.insert(item.item_id).second) {
        throw ValidationError("duplicate item_id '" + item.item_id + "'");
      }
      items.push_back(std::move(item));
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    } catch (const json::exception& e) {
      throw ValidationError(where + e.what());
    }
  }
  return items;
}

std::vector<QaItem> load_dataset(const std::filesystem::path& path) {
  try {
    return parse_dataset(read_text_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace framepick::eval
