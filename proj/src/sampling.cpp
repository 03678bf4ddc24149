#include "framepick/sampling.hpp"

#include "framepick/femb.hpp"
#include "framepick/parallel.hpp"
#include "framepick/scored.hpp"
#include "framepick/std_sampler.hpp"

namespace framepick {

bool is_adaptive(Strategy s) noexcept { return s == Strategy::MaxInfo || s == Strategy::Scored; }

SamplingPlan::SamplingPlan(std::vector<VideoMeta> videos, SamplingConfig config,
                           std::filesystem::path femb_dir, std::size_t jobs)
    : videos_(std::move(videos)),
      config_(config),
      femb_dir_(std::move(femb_dir)),
      jobs_(std::max<std::size_t>(1, jobs)) {
  config_.validate();
  if (is_adaptive(config_.strategy) && femb_dir_.empty()) {
    throw ConfigError(std::string("strategy '") + std::string(strategy_name(config_.strategy)) +
                      "' needs a FEMB directory");
  }
}

void SamplingPlan::prepare() {
  if (ready_) return;
  prepared_.assign(videos_.size(), {});
  if (is_adaptive(config_.strategy)) {
    parallel_for(videos_.size(), jobs_, [&](std::size_t i) {
      const VideoMeta& meta = videos_[i];
      Prepared& p = prepared_[i];
      try {
        const auto path = femb_path(femb_dir_, meta.video_id());
        if (config_.strategy == Strategy::MaxInfo) {
          p.maxinfo = maxinfo_candidates(meta, read_embeddings(path), config_);
        } else {
          const ScoreVector scores = read_scores(path);
          require_uniform_pool(meta, config_.pool_n, scores.source_indices());
          p.top_scored = top_scored_frames(scores, config_.score_fraction);
        }
      } catch (const Error& e) {
        p.failure = SampleFailure{meta.video_id(), e.kind(), e.what()};
      }
    });
  }
  ready_ = true;
}

SelectionManifest SamplingPlan::finalize(std::size_t video, const SamplingConfig& cfg) const {
  const VideoMeta& meta = videos_[video];
  switch (cfg.strategy) {
    case Strategy::UniformFps: return sample_uniform_fps(meta, cfg);
    case Strategy::SingleFirst: return sample_single(meta, SingleFrame::First, cfg);
    case Strategy::SingleCenter: return sample_single(meta, SingleFrame::Center, cfg);
    case Strategy::MaxInfo: return finalize_maxinfo(meta, *prepared_[video].maxinfo, cfg);
    case Strategy::Scored: return finalize_scored(meta, prepared_[video].top_scored, cfg);
  }
  throw ValidationError("unknown strategy");
}

SampleBatch SamplingPlan::manifests_for(std::int64_t n_max) {
  SamplingConfig cfg = config_;
  cfg.n_max = n_max;
  cfg.validate();
  prepare();
  SampleBatch batch;
  for (std::size_t i = 0; i < videos_.size(); ++i) {
    if (prepared_[i].failure) {
      batch.failures.push_back(*prepared_[i].failure);
      continue;
    }
    try {
      batch.manifests.push_back(finalize(i, cfg));
    } catch (const Error& e) {
      batch.failures.push_back({videos_[i].video_id(), e.kind(), e.what()});
    }
  }
  return batch;
}

}  // namespace framepick
