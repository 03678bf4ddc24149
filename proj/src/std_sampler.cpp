#include "framepick/std_sampler.hpp"

#include <algorithm>

#include "framepick/error.hpp"

namespace framepick {

std::vector<std::int64_t> center_of_bin(std::int64_t count, std::int64_t k) {
  if (k < 1 || k > count) {
    throw ValidationError("center_of_bin: need 1 <= k <= count (k=" + std::to_string(k) +
                          ", count=" + std::to_string(count) + ")");
  }
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(k));
  // floor((2i + 1) * count / (2k)) in integers; bins are >= 1 wide so no duplicates.
  for (std::int64_t i = 0; i < k; ++i) {
    const __int128 num = static_cast<__int128>(2 * i + 1) * count;
    out.push_back(static_cast<std::int64_t>(num / (2 * k)));
  }
  return out;
}

std::vector<FrameIndex> uniform_subsample(std::span<const FrameIndex> sorted, std::int64_t k) {
  const auto positions = center_of_bin(static_cast<std::int64_t>(sorted.size()), k);
  std::vector<FrameIndex> out;
  out.reserve(positions.size());
  for (const auto p : positions) out.push_back(sorted[static_cast<std::size_t>(p)]);
  return out;
}

std::int64_t uniform_fps_count(const VideoMeta& meta, const SamplingConfig& cfg) {
  const std::int64_t target = round_half_up(meta.duration_s() * cfg.rate_r);
  return std::min(std::clamp(target, cfg.n_min, cfg.n_max), meta.frame_count());
}

SelectionManifest sample_uniform_fps(const VideoMeta& meta, const SamplingConfig& cfg) {
  cfg.validate();
  const std::int64_t k = uniform_fps_count(meta, cfg);
  return SelectionManifest(meta, cfg, center_of_bin(meta.frame_count(), k));
}

SelectionManifest sample_single(const VideoMeta& meta, SingleFrame which,
                                const SamplingConfig& cfg) {
  SamplingConfig c = cfg;
  c.strategy = which == SingleFrame::First ? Strategy::SingleFirst : Strategy::SingleCenter;
  const FrameIndex index = which == SingleFrame::First ? 0 : meta.frame_count() / 2;
  return SelectionManifest(meta, c, {index});
}

std::vector<FrameIndex> sample_uniform_pool(const VideoMeta& meta, std::int64_t pool_n) {
  if (pool_n < 1) throw ValidationError("pool size must be >= 1");
  return center_of_bin(meta.frame_count(), std::min(pool_n, meta.frame_count()));
}

}  // namespace framepick
