#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace framepick {

/// 0-based position of a frame in the decoded stream.
using FrameIndex = std::int64_t;

/// Exact frame rate, e.g. 30000/1001 for NTSC.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double to_double() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }

  /// "30" or "30000/1001"; always reduced.
  std::string to_string() const;

  /// Accepts "30", "29.97", "30000/1001". Decimals are converted exactly.
  static Rational parse(std::string_view text);
  /// Smallest power-of-ten denominator (up to 1e9) that represents `value`.
  static Rational from_double(double value);

  friend bool operator==(const Rational&, const Rational&) = default;
};

Rational reduced(Rational r);

/// Round-half-up to the nearest integer.
std::int64_t round_half_up(double value) noexcept;

enum class Strategy { UniformFps, SingleFirst, SingleCenter, MaxInfo, Scored };

/// CLI/file name: fps, first, center, maxinfo, scored.
std::string_view strategy_name(Strategy s) noexcept;
/// Report column label: FPS, First, Center, MaxInfo, CSTA.
std::string_view strategy_label(Strategy s) noexcept;
Strategy parse_strategy(std::string_view name);

class VideoMeta {
 public:
  /// Validates frame_count >= 1, fps > 0, duration > 0 and the +-1 frame
  /// consistency rule.
  VideoMeta(std::string video_id, std::int64_t frame_count, Rational native_fps,
            double duration_s, std::string path = {});

  const std::string& video_id() const noexcept { return video_id_; }
  std::int64_t frame_count() const noexcept { return frame_count_; }
  const Rational& native_fps() const noexcept { return native_fps_; }
  double duration_s() const noexcept { return duration_s_; }
  /// Location of the source video, if known. Only used to materialize frames.
  const std::string& path() const noexcept { return path_; }

  friend bool operator==(const VideoMeta&, const VideoMeta&) = default;

 private:
  std::string video_id_;
  std::int64_t frame_count_;
  Rational native_fps_;
  double duration_s_;
  std::string path_;
};

/// VideoMeta with any of the three timeline fields possibly missing.
struct PartialVideoMeta {
  std::string video_id;
  std::optional<std::int64_t> frame_count;
  std::optional<Rational> native_fps;
  std::optional<double> duration_s;
  std::string path;
};

/// Fills in the missing field from the other two. Throws ValidationError when
/// fewer than two are present or when all three disagree by more than a frame.
VideoMeta derive_frame_count(const PartialVideoMeta& partial);

struct SamplingConfig {
  Strategy strategy = Strategy::UniformFps;
  double rate_r = 2.0;
  std::int64_t n_min = 4;
  std::int64_t n_max = 96;
  std::int64_t pool_n = 1000;
  double svd_energy = 0.90;
  double maxvol_delta = 0.01;
  double rect_growth_delta = 0.05;
  std::int64_t rect_cap_factor = 2;
  double score_fraction = 0.15;

  /// Throws ValidationError on out-of-range fields.
  void validate() const;

  friend bool operator==(const SamplingConfig&, const SamplingConfig&) = default;
};

/// round-half-up(1000 * index / fps), computed in exact integer arithmetic.
std::int64_t timestamp_ms(FrameIndex index, const Rational& fps);

class SelectionManifest {
 public:
  /// Timestamps are derived from the indices. Throws ValidationError unless
  /// indices are strictly increasing, in bounds, and 1 <= count <= n_max.
  SelectionManifest(VideoMeta meta, SamplingConfig config, std::vector<FrameIndex> frame_indices,
                    bool fallback = false);

  const VideoMeta& meta() const noexcept { return meta_; }
  const std::string& video_id() const noexcept { return meta_.video_id(); }
  const SamplingConfig& config() const noexcept { return config_; }
  Strategy strategy() const noexcept { return config_.strategy; }
  /// True when an adaptive strategy fell back to uniform-FPS.
  bool fallback() const noexcept { return fallback_; }
  const std::vector<FrameIndex>& frame_indices() const noexcept { return frame_indices_; }
  const std::vector<std::int64_t>& timestamps_ms() const noexcept { return timestamps_ms_; }

  friend bool operator==(const SelectionManifest&, const SelectionManifest&) = default;

 private:
  VideoMeta meta_;
  SamplingConfig config_;
  bool fallback_;
  std::vector<FrameIndex> frame_indices_;
  std::vector<std::int64_t> timestamps_ms_;
};

/// n x d row-major feature matrix; row i belongs to frame source_indices[i].
class EmbeddingMatrix {
 public:
  EmbeddingMatrix(std::vector<FrameIndex> source_indices, std::size_t dim, std::vector<float> data);

  std::size_t rows() const noexcept { return source_indices_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<FrameIndex>& source_indices() const noexcept { return source_indices_; }
  const std::vector<float>& data() const noexcept { return data_; }
  std::span<const float> row(std::size_t i) const noexcept {
    return {data_.data() + i * dim_, dim_};
  }

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

 private:
  std::vector<FrameIndex> source_indices_;
  std::size_t dim_;
  std::vector<float> data_;
};

/// Per-frame importance scores aligned with source_indices.
class ScoreVector {
 public:
  ScoreVector(std::vector<FrameIndex> source_indices, std::vector<float> scores);

  std::size_t size() const noexcept { return scores_.size(); }
  const std::vector<FrameIndex>& source_indices() const noexcept { return source_indices_; }
  const std::vector<float>& scores() const noexcept { return scores_; }

  friend bool operator==(const ScoreVector&, const ScoreVector&) = default;

 private:
  std::vector<FrameIndex> source_indices_;
  std::vector<float> scores_;
};

}  // namespace framepick
