#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "framepick/types.hpp"

namespace framepick {

/// Center-of-bin positions floor((i + 0.5) * count / k) for i in [0, k).
/// Requires 1 <= k <= count; the result is strictly increasing.
std::vector<std::int64_t> center_of_bin(std::int64_t count, std::int64_t k);

/// Picks k elements of a sorted list at center-of-bin positions.
std::vector<FrameIndex> uniform_subsample(std::span<const FrameIndex> sorted, std::int64_t k);

/// Number of frames uniform-FPS sampling yields:
/// min(clamp(round(duration * r), n_min, n_max), frame_count).
std::int64_t uniform_fps_count(const VideoMeta& meta, const SamplingConfig& cfg);

/// Uniform-FPS sampling. Accepts any cfg.strategy so adaptive samplers can
/// reuse it for their fallback; the manifest records cfg verbatim.
SelectionManifest sample_uniform_fps(const VideoMeta& meta, const SamplingConfig& cfg);

enum class SingleFrame { First, Center };

/// First -> frame 0; Center -> frame floor(frame_count / 2).
SelectionManifest sample_single(const VideoMeta& meta, SingleFrame which,
                                const SamplingConfig& cfg = {});

/// min(pool_n, frame_count) center-of-bin indices over the whole video.
std::vector<FrameIndex> sample_uniform_pool(const VideoMeta& meta, std::int64_t pool_n);

}  // namespace framepick
