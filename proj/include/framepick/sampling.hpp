#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "framepick/error.hpp"
#include "framepick/maxinfo.hpp"
#include "framepick/types.hpp"

namespace framepick {

struct SampleFailure {
  std::string video_id;
  ErrorKind kind;
  std::string message;
};

struct SampleBatch {
  std::vector<SelectionManifest> manifests;  // in video-list order
  std::vector<SampleFailure> failures;
};

/// Whether a strategy reads FEMB inputs.
bool is_adaptive(Strategy s) noexcept;

/// Samples a list of videos under one strategy, for one or more n_max
/// budgets. The budget-independent work (FEMB loading, MaxVol, top-score
/// ranking) runs once per video and is reused by every manifests_for call.
/// Per-video errors are collected, never thrown.
class SamplingPlan {
 public:
  /// Adaptive strategies read `<femb_dir>/<video_id>.femb`; a missing
  /// femb_dir for them is a ConfigError. Throws ValidationError on a bad config.
  SamplingPlan(std::vector<VideoMeta> videos, SamplingConfig config,
               std::filesystem::path femb_dir = {}, std::size_t jobs = 1);

  const SamplingConfig& config() const noexcept { return config_; }
  const std::vector<VideoMeta>& videos() const noexcept { return videos_; }

  SampleBatch manifests_for(std::int64_t n_max);
  SampleBatch manifests() { return manifests_for(config_.n_max); }

 private:
  struct Prepared {
    std::optional<MaxInfoCandidates> maxinfo;
    std::vector<FrameIndex> top_scored;
    std::optional<SampleFailure> failure;
  };

  void prepare();
  SelectionManifest finalize(std::size_t video, const SamplingConfig& cfg) const;

  std::vector<VideoMeta> videos_;
  SamplingConfig config_;
  std::filesystem::path femb_dir_;
  std::size_t jobs_;
  std::vector<Prepared> prepared_;
  bool ready_ = false;
};

}  // namespace framepick
