#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "framepick/error.hpp"
#include "framepick/types.hpp"

namespace framepick {

/// External decoder invocation.
///
/// The template is split into words like a shell command line (quotes and
/// backslashes honoured, no expansion) and each word has its placeholders
/// substituted: {video} source path, {index} frame index, {out} output image,
/// plus the optional {video_id} and {time} (seconds, millisecond precision).
/// {video}, {index} and {out} are mandatory.
struct DecoderConfig {
  std::string command_template;
  std::filesystem::path work_dir;
  std::size_t jobs = 1;  // concurrent decoder processes
};

/// Throws ConfigError when a mandatory placeholder is missing.
void validate_decoder_template(const std::string& command_template);

/// `<work_dir>/<video_id>_<index>.png`
std::filesystem::path frame_image_path(const std::filesystem::path& work_dir,
                                       std::string_view video_id, FrameIndex index);

/// Decoder exited nonzero or produced no file.
class DecoderError : public Error {
 public:
  DecoderError(const std::string& message, std::string diagnostics)
      : Error(ErrorKind::Io, message), diagnostics_(std::move(diagnostics)) {}
  const std::string& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::string diagnostics_;
};

/// Materializes one image per index, in index order. Existing outputs are
/// reused without invoking the decoder. Each decoder writes to a private
/// temporary name that is renamed into place, so concurrent runs never expose
/// partial files.
std::vector<std::filesystem::path> extract_frames(const VideoMeta& meta,
                                                  std::span<const FrameIndex> indices,
                                                  const DecoderConfig& config);

}  // namespace framepick
