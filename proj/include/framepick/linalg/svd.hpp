#pragma once

#include <cstddef>
#include <vector>

#include "framepick/linalg/matrix.hpp"

namespace framepick::linalg {

/// A = left * diag(singular_values) * right^T, truncated to s components.
struct SvdResult {
  std::vector<double> singular_values;  // non-increasing, >= 0
  Matrix left;                          // n x s, orthonormal columns
  Matrix right;                         // d x s, orthonormal columns

  std::size_t rank() const noexcept { return singular_values.size(); }
};

/// Thin SVD with min(n, d) components.
///
/// Householder QR with column pivoting reduces the problem to a square
/// triangular factor R; one-sided (Hestenes) Jacobi rotations then
/// orthogonalize the columns of R^T. Singular values come out to high
/// relative accuracy, including the small ones. Columns belonging to exactly
/// zero singular values are completed to an orthonormal basis so both factors
/// stay orthonormal.
SvdResult full_svd(const Matrix& a);

/// Smallest s whose leading singular values carry `energy` of the total
/// squared spectrum, clamped to [min(2, k), k] with k = spectrum.size().
std::size_t energy_rank(const std::vector<double>& spectrum, double energy);

/// Keeps the leading `s` components of a thin SVD.
SvdResult truncate(const SvdResult& full, std::size_t s);

/// full_svd followed by energy_rank truncation. Throws DegenerateInputError on
/// an all-zero or empty matrix, ValidationError on non-finite input or energy
/// outside (0, 1].
SvdResult truncated_svd(const Matrix& a, double energy);

}  // namespace framepick::linalg
