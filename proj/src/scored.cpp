#include "framepick/scored.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "framepick/error.hpp"
#include "framepick/maxinfo.hpp"
#include "framepick/std_sampler.hpp"

namespace framepick {

std::int64_t top_fraction_count(std::size_t pool_size, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ValidationError("score fraction must be in (0, 1]");
  }
  // 1e-9 keeps exact halves such as 0.15 * 10 from rounding down through
  // binary representation error.
  const double raw = fraction * static_cast<double>(pool_size);
  const auto k = static_cast<std::int64_t>(std::floor(raw + 0.5 + 1e-9));
  return std::clamp<std::int64_t>(k, 1, static_cast<std::int64_t>(pool_size));
}

std::vector<FrameIndex> top_scored_frames(const ScoreVector& scores, double fraction) {
  const std::size_t n = scores.size();
  const auto k = static_cast<std::size_t>(top_fraction_count(n, fraction));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& s = scores.scores();
  // Source indices are increasing, so position order is frame order.
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (s[a] != s[b]) return s[a] > s[b];
                      return a < b;
                    });
  std::vector<FrameIndex> top;
  top.reserve(k);
  for (std::size_t i = 0; i < k; ++i) top.push_back(scores.source_indices()[order[i]]);
  std::sort(top.begin(), top.end());
  return top;
}

SelectionManifest finalize_scored(const VideoMeta& meta, const std::vector<FrameIndex>& top,
                                  const SamplingConfig& cfg) {
  SamplingConfig c = cfg;
  c.strategy = Strategy::Scored;
  if (static_cast<std::int64_t>(top.size()) > c.n_max) {
    return SelectionManifest(meta, c, uniform_subsample(top, c.n_max));
  }
  return SelectionManifest(meta, c, top);
}

SelectionManifest sample_scored(const VideoMeta& meta, const ScoreVector& scores,
                                const SamplingConfig& cfg) {
  cfg.validate();
  require_uniform_pool(meta, cfg.pool_n, scores.source_indices());
  return finalize_scored(meta, top_scored_frames(scores, cfg.score_fraction), cfg);
}

}  // namespace framepick
