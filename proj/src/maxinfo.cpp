#include "framepick/maxinfo.hpp"

#include "framepick/error.hpp"
#include "framepick/linalg/maxvol.hpp"
#include "framepick/linalg/svd.hpp"
#include "framepick/std_sampler.hpp"

namespace framepick {

linalg::Matrix to_matrix(const EmbeddingMatrix& emb) {
  linalg::Matrix q(emb.rows(), emb.dim());
  for (std::size_t i = 0; i < emb.rows(); ++i) {
    const auto r = emb.row(i);
    for (std::size_t j = 0; j < emb.dim(); ++j) q(i, j) = r[j];
  }
  return q;
}

void require_uniform_pool(const VideoMeta& meta, std::int64_t pool_n,
                          const std::vector<FrameIndex>& indices) {
  if (indices != sample_uniform_pool(meta, pool_n)) {
    throw ValidationError("video '" + meta.video_id() + "': source indices are not the uniform pool of " +
                          std::to_string(pool_n) + " frames over " +
                          std::to_string(meta.frame_count()) + " frames");
  }
}

MaxInfoRows maxinfo_rows(const linalg::Matrix& q, const SamplingConfig& cfg) {
  const linalg::SvdResult svd = linalg::truncated_svd(q, cfg.svd_energy);
  const std::size_t s = svd.rank();
  const double top = svd.singular_values.front();
  if (!(svd.singular_values.back() > linalg::kRankTolerance * top)) {
    throw DegenerateInputError("embeddings are rank deficient at s = " + std::to_string(s));
  }
  // Q * V_s rather than U_s * diag(sigma): same matrix, but identical
  // embedding rows map to bit-identical reduced rows, so ties stay exact.
  const linalg::Matrix reduced = q * svd.right;
  const auto cap = static_cast<std::size_t>(cfg.rect_cap_factor) * s;
  const linalg::MaxVolSelection sel =
      linalg::maxvol_rect(reduced, cfg.maxvol_delta, cfg.rect_growth_delta, cap);
  return {sel.row_indices, s, sel.coefficient_max, sel.converged};
}

MaxInfoCandidates maxinfo_candidates(const VideoMeta& meta, const EmbeddingMatrix& emb,
                                     const SamplingConfig& cfg) {
  cfg.validate();
  require_uniform_pool(meta, cfg.pool_n, emb.source_indices());
  MaxInfoCandidates out;
  try {
    const MaxInfoRows sel = maxinfo_rows(to_matrix(emb), cfg);
    out.frames.reserve(sel.rows.size());
    for (const std::size_t r : sel.rows) out.frames.push_back(emb.source_indices()[r]);
    out.rank = sel.rank;
    out.coefficient_max = sel.coefficient_max;
    out.converged = sel.converged;
  } catch (const DegenerateInputError& e) {
    out.degenerate = true;
    out.degenerate_reason = e.what();
  }
  return out;
}

SelectionManifest finalize_maxinfo(const VideoMeta& meta, const MaxInfoCandidates& candidates,
                                   const SamplingConfig& cfg) {
  SamplingConfig c = cfg;
  c.strategy = Strategy::MaxInfo;
  if (candidates.degenerate) {
    const SelectionManifest uniform = sample_uniform_fps(meta, c);
    return SelectionManifest(meta, c, uniform.frame_indices(), /*fallback=*/true);
  }
  const auto count = static_cast<std::int64_t>(candidates.frames.size());
  if (count > c.n_max) {
    return SelectionManifest(meta, c, uniform_subsample(candidates.frames, c.n_max));
  }
  return SelectionManifest(meta, c, candidates.frames);
}

SelectionManifest sample_maxinfo(const VideoMeta& meta, const EmbeddingMatrix& emb,
                                 const SamplingConfig& cfg) {
  return finalize_maxinfo(meta, maxinfo_candidates(meta, emb, cfg), cfg);
}

}  // namespace framepick
