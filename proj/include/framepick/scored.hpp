#pragma once

#include <cstdint>
#include <vector>

#include "framepick/types.hpp"

namespace framepick {

/// max(1, round-half-up(fraction * pool_size)).
std::int64_t top_fraction_count(std::size_t pool_size, double fraction);

/// The top-scoring pool frames, ascending by frame index. Equal scores rank
/// the lower frame index first. Independent of n_max.
std::vector<FrameIndex> top_scored_frames(const ScoreVector& scores, double fraction);

/// Applies the n_max cap to a top-scored set.
SelectionManifest finalize_scored(const VideoMeta& meta, const std::vector<FrameIndex>& top,
                                  const SamplingConfig& cfg);

/// Keeps the top score_fraction of the pool, then center-of-bin subsamples
/// down to n_max if needed. The scores must cover the uniform pool.
SelectionManifest sample_scored(const VideoMeta& meta, const ScoreVector& scores,
                                const SamplingConfig& cfg);

}  // namespace framepick
