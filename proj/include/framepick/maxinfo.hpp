#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "framepick/linalg/matrix.hpp"
#include "framepick/types.hpp"

namespace framepick {

/// Row selection over an embedding matrix, before the n_max cap.
struct MaxInfoRows {
  std::vector<std::size_t> rows;  // ascending
  std::size_t rank = 0;           // s, the truncated SVD rank
  double coefficient_max = 0.0;
  bool converged = true;
};

/// Truncated SVD of q, Q_s = q * V_s (equal to U_s * diag(sigma)), then
/// rectangular MaxVol with cap rect_cap_factor * s. Throws
/// DegenerateInputError on all-zero or rank-deficient embeddings.
MaxInfoRows maxinfo_rows(const linalg::Matrix& q, const SamplingConfig& cfg);

/// The n_max-independent part of MaxInfo sampling, cacheable across budgets.
struct MaxInfoCandidates {
  std::vector<FrameIndex> frames;  // selected pool frames, ascending; empty on fallback
  bool degenerate = false;
  std::string degenerate_reason;
  std::size_t rank = 0;
  double coefficient_max = 0.0;
  bool converged = true;
};

/// Checks that the embedding rows are the uniform pool for (meta, pool_n) and
/// runs maxinfo_rows. Degenerate embeddings are reported, not thrown.
MaxInfoCandidates maxinfo_candidates(const VideoMeta& meta, const EmbeddingMatrix& emb,
                                     const SamplingConfig& cfg);

/// Applies the n_max cap (center-of-bin subsample) or, for degenerate input,
/// the uniform-FPS fallback with fallback = true.
SelectionManifest finalize_maxinfo(const VideoMeta& meta, const MaxInfoCandidates& candidates,
                                   const SamplingConfig& cfg);

SelectionManifest sample_maxinfo(const VideoMeta& meta, const EmbeddingMatrix& emb,
                                 const SamplingConfig& cfg);

/// Embedding matrix widened to double precision.
linalg::Matrix to_matrix(const EmbeddingMatrix& emb);

/// Throws ValidationError unless `indices` equal sample_uniform_pool(meta, pool_n).
void require_uniform_pool(const VideoMeta& meta, std::int64_t pool_n,
                          const std::vector<FrameIndex>& indices);

}  // namespace framepick
