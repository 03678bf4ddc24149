#include "framepick/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "framepick/error.hpp"

namespace framepick {

namespace {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

constexpr std::string_view kManifestFormat = "framepick/selection-manifest";
constexpr int kManifestVersion = 1;

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // byte is 1-based and points just past the offending character
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    throw ParseError(std::string(what) + ": malformed JSON at " + line_col(text, byte));
  }
}

/// Field accessors with path-qualified diagnostics.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail("", "expected an object");
  }

  [[noreturn]] void fail(std::string_view key, std::string_view msg) const {
    std::string where = path_;
    if (!key.empty()) where += (where.empty() ? "" : ".") + std::string(key);
    throw ParseError("field '" + where + "': " + std::string(msg));
  }

  const json& get(std::string_view key) const {
    auto it = node_.find(key);
    if (it == node_.end()) fail(key, "missing");
    return *it;
  }

  bool has(std::string_view key) const { return node_.contains(key); }

  std::int64_t integer(std::string_view key) const {
    const json& v = get(key);
    if (!v.is_number_integer()) fail(key, "expected integer");
    return v.get<std::int64_t>();
  }

  double number(std::string_view key) const {
    const json& v = get(key);
    if (!v.is_number()) fail(key, "expected number");
    return v.get<double>();
  }

  std::string string(std::string_view key) const {
    const json& v = get(key);
    if (!v.is_string()) fail(key, "expected string");
    return v.get<std::string>();
  }

  bool boolean(std::string_view key) const {
    const json& v = get(key);
    if (!v.is_boolean()) fail(key, "expected boolean");
    return v.get<bool>();
  }

  std::vector<std::int64_t> int_list(std::string_view key) const {
    const json& v = get(key);
    if (!v.is_array()) fail(key, "expected array");
    std::vector<std::int64_t> out;
    out.reserve(v.size());
    for (const json& e : v) {
      if (!e.is_number_integer()) fail(key, "expected array of integers");
      out.push_back(e.get<std::int64_t>());
    }
    return out;
  }

  Reader child(std::string_view key) const {
    return Reader(get(key), path_.empty() ? std::string(key) : path_ + "." + std::string(key));
  }

  void only(std::initializer_list<std::string_view> keys) const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) {
        fail(it.key(), "unknown field");
      }
    }
  }

 private:
  const json& node_;
  std::string path_;
};

ordered_json config_to_json(const SamplingConfig& c) {
  ordered_json p;
  p["rate_r"] = c.rate_r;
  p["n_min"] = c.n_min;
  p["n_max"] = c.n_max;
  p["pool_n"] = c.pool_n;
  p["svd_energy"] = c.svd_energy;
  p["maxvol_delta"] = c.maxvol_delta;
  p["rect_growth_delta"] = c.rect_growth_delta;
  p["rect_cap_factor"] = c.rect_cap_factor;
  p["score_fraction"] = c.score_fraction;
  return p;
}

SamplingConfig config_from_json(const Reader& r, Strategy strategy) {
  r.only({"rate_r", "n_min", "n_max", "pool_n", "svd_energy", "maxvol_delta",
          "rect_growth_delta", "rect_cap_factor", "score_fraction"});
  SamplingConfig c;
  c.strategy = strategy;
  c.rate_r = r.number("rate_r");
  c.n_min = r.integer("n_min");
  c.n_max = r.integer("n_max");
  c.pool_n = r.integer("pool_n");
  c.svd_energy = r.number("svd_energy");
  c.maxvol_delta = r.number("maxvol_delta");
  c.rect_growth_delta = r.number("rect_growth_delta");
  c.rect_cap_factor = r.integer("rect_cap_factor");
  c.score_fraction = r.number("score_fraction");
  return c;
}

Rational fps_from_json(const Reader& r, std::string_view key) {
  const json& v = r.get(key);
  try {
    if (v.is_string()) return Rational::parse(v.get<std::string>());
    if (v.is_number()) return Rational::from_double(v.get<double>());
  } catch (const Error& e) {
    r.fail(key, e.what());
  }
  r.fail(key, "expected number or \"num/den\" string");
}

}  // namespace

std::string serialize_manifest(const SelectionManifest& m) {
  ordered_json video;
  video["video_id"] = m.meta().video_id();
  video["frame_count"] = m.meta().frame_count();
  video["native_fps"] = m.meta().native_fps().to_string();
  video["duration_s"] = m.meta().duration_s();
  video["path"] = m.meta().path();

  ordered_json doc;
  doc["format"] = kManifestFormat;
  doc["version"] = kManifestVersion;
  doc["video"] = std::move(video);
  doc["strategy"] = strategy_name(m.strategy());
  doc["params"] = config_to_json(m.config());
  doc["fallback"] = m.fallback();
  doc["frame_indices"] = m.frame_indices();
  doc["timestamps_ms"] = m.timestamps_ms();
  return doc.dump();
}

SelectionManifest parse_manifest(std::string_view text) {
  const json doc = parse_json(text, "manifest");
  const Reader r(doc, "");
  r.only({"format", "version", "video", "strategy", "params", "fallback", "frame_indices",
          "timestamps_ms"});
  if (r.string("format") != kManifestFormat) r.fail("format", "unexpected format tag");
  if (r.integer("version") != kManifestVersion) r.fail("version", "unsupported version");

  const Reader v = r.child("video");
  v.only({"video_id", "frame_count", "native_fps", "duration_s", "path"});

  Strategy strategy{};
  try {
    strategy = parse_strategy(r.string("strategy"));
  } catch (const ValidationError& e) {
    r.fail("strategy", e.what());
  }

  try {
    VideoMeta meta(v.string("video_id"), v.integer("frame_count"), fps_from_json(v, "native_fps"),
                   v.number("duration_s"), v.string("path"));
    SelectionManifest m(std::move(meta), config_from_json(r.child("params"), strategy),
                        r.int_list("frame_indices"), r.boolean("fallback"));
    if (r.int_list("timestamps_ms") != m.timestamps_ms()) {
      r.fail("timestamps_ms", "does not match frame_indices and native_fps");
    }
    return m;
  } catch (const ValidationError& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
}

std::filesystem::path manifest_path(const std::filesystem::path& dir, std::string_view video_id) {
  return dir / (std::string(video_id) + ".manifest.json");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "'");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

void write_manifest_file(const std::filesystem::path& path, const SelectionManifest& manifest) {
  write_text_file(path, serialize_manifest(manifest) + "\n");
}

SelectionManifest read_manifest_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return parse_manifest(text);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::vector<SelectionManifest> read_manifest_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw IoError("manifest directory '" + dir.string() + "' does not exist");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.ends_with(".manifest.json")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<SelectionManifest> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(read_manifest_file(f));
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.video_id() < b.video_id(); });
  return out;
}

std::vector<VideoMeta> parse_video_list(std::string_view text) {
  std::vector<VideoMeta> out;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = "video list line " + std::to_string(line_no);
    try {
      const json doc = parse_json(line, where);
      const Reader r(doc, "");
      r.only({"video_id", "frame_count", "native_fps", "duration_s", "path"});
      PartialVideoMeta p;
      p.video_id = r.string("video_id");
      if (r.has("frame_count")) p.frame_count = r.integer("frame_count");
      if (r.has("native_fps")) p.native_fps = fps_from_json(r, "native_fps");
      if (r.has("duration_s")) p.duration_s = r.number("duration_s");
      if (r.has("path")) p.path = r.string("path");
      if (!seen.insert(p.video_id).second) {
        throw ValidationError("duplicate video_id '" + p.video_id + "'");
      }
      out.push_back(derive_frame_count(p));
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  return out;
}

std::vector<VideoMeta> load_video_list(const std::filesystem::path& path) {
  return parse_video_list(read_text_file(path));
}

}  // namespace framepick
