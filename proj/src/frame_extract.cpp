#include "framepick/frame_extract.hpp"

#include <atomic>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>

#include <unistd.h>

#include "framepick/parallel.hpp"
#include "framepick/subprocess.hpp"

namespace framepick {

namespace {

constexpr std::string_view kRequired[] = {"{video}", "{index}", "{out}"};

std::string replace_all(std::string text, std::string_view from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

/// One mutex per output path, shared by every extraction in this process.
std::shared_ptr<std::mutex> path_lock(const std::filesystem::path& path) {
  static std::mutex registry_mutex;
  static std::map<std::string, std::weak_ptr<std::mutex>> registry;
  std::lock_guard guard(registry_mutex);
  auto& slot = registry[path.string()];
  auto lock = slot.lock();
  if (!lock) {
    lock = std::make_shared<std::mutex>();
    slot = lock;
  }
  return lock;
}

std::string format_seconds(FrameIndex index, const Rational& fps) {
  const std::int64_t ms = timestamp_ms(index, fps);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld.%03lld", static_cast<long long>(ms / 1000),
                static_cast<long long>(ms % 1000));
  return buf;
}

void extract_one(const VideoMeta& meta, FrameIndex index, const std::vector<std::string>& words,
                 const std::filesystem::path& target) {
  const auto lock = path_lock(target);
  std::lock_guard guard(*lock);
  std::error_code ec;
  if (std::filesystem::exists(target, ec)) return;

  static std::atomic<unsigned long> counter{0};
  const std::filesystem::path temp =
      target.parent_path() / (target.stem().string() + ".part-" + std::to_string(::getpid()) +
                              "-" + std::to_string(counter++) + target.extension().string());

  std::vector<std::string> argv;
  argv.reserve(words.size());
  for (const auto& w : words) {
    std::string a = replace_all(w, "{video}", meta.path());
    a = replace_all(std::move(a), "{index}", std::to_string(index));
    a = replace_all(std::move(a), "{out}", temp.string());
    a = replace_all(std::move(a), "{video_id}", meta.video_id());
    a = replace_all(std::move(a), "{time}", format_seconds(index, meta.native_fps()));
    argv.push_back(std::move(a));
  }

  ProcessResult result;
  try {
    result = run_process(argv);
  } catch (const IoError& e) {
    throw DecoderError("decoder failed to start for frame " + std::to_string(index) + " of '" +
                           meta.video_id() + "': " + e.what(),
                       e.what());
  }
  if (result.exit_code != 0) {
    std::filesystem::remove(temp, ec);
    throw DecoderError("decoder exited with status " + std::to_string(result.exit_code) +
                           " for frame " + std::to_string(index) + " of '" + meta.video_id() +
                           "'",
                       result.err);
  }
  if (!std::filesystem::exists(temp, ec)) {
    throw DecoderError("decoder produced no output for frame " + std::to_string(index) + " of '" +
                           meta.video_id() + "' (expected " + temp.string() + ")",
                       result.err);
  }
  std::filesystem::rename(temp, target, ec);
  if (ec) {
    std::filesystem::remove(temp, ec);
    throw IoError("cannot move decoded frame into '" + target.string() + "'");
  }
}

}  // namespace

void validate_decoder_template(const std::string& command_template) {
  if (split_command(command_template).empty()) throw ConfigError("decoder command is empty");
  for (const auto placeholder : kRequired) {
    if (command_template.find(placeholder) == std::string::npos) {
      throw ConfigError("decoder command template is missing the " + std::string(placeholder) +
                        " placeholder");
    }
  }
}

std::filesystem::path frame_image_path(const std::filesystem::path& work_dir,
                                       std::string_view video_id, FrameIndex index) {
  return work_dir / (std::string(video_id) + "_" + std::to_string(index) + ".png");
}

std::vector<std::filesystem::path> extract_frames(const VideoMeta& meta,
                                                  std::span<const FrameIndex> indices,
                                                  const DecoderConfig& config) {
  validate_decoder_template(config.command_template);
  if (meta.path().empty()) {
    throw ConfigError("video '" + meta.video_id() + "' has no source path to decode from");
  }
  for (const FrameIndex idx : indices) {
    if (idx < 0 || idx >= meta.frame_count()) {
      throw ValidationError("frame " + std::to_string(idx) + " is outside video '" +
                            meta.video_id() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::create_directories(config.work_dir, ec);
  if (ec) throw IoError("cannot create frame directory '" + config.work_dir.string() + "'");

  const std::vector<std::string> words = split_command(config.command_template);
  std::vector<std::filesystem::path> outputs;
  outputs.reserve(indices.size());
  for (const FrameIndex idx : indices) {
    outputs.push_back(frame_image_path(config.work_dir, meta.video_id(), idx));
  }

  parallel_for(indices.size(), config.jobs,
               [&](std::size_t i) { extract_one(meta, indices[i], words, outputs[i]); });
  return outputs;
}

}  // namespace framepick
