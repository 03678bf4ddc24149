#pragma once

#include <cstddef>
#include <vector>

#include "framepick/linalg/matrix.hpp"

namespace framepick::linalg {

struct MaxVolSelection {
  /// Selected rows, ascending.
  std::vector<std::size_t> row_indices;
  /// Selected rows in the order they entered the basis: the s square-phase
  /// rows (column order of the coefficient matrix) followed by appended rows.
  std::vector<std::size_t> selection_order;
  /// Square phase: max |C_ij| of C = Qs * A^-1. Rect phase: max row 2-norm of
  /// C = Qs * pinv(Qs[rows]) at termination.
  double coefficient_max = 0.0;
  /// False when the square phase hit its iteration cap before dominance.
  bool converged = true;
  std::size_t swaps = 0;
};

/// Relative threshold below which sigma_s / sigma_1 counts as rank deficient.
inline constexpr double kRankTolerance = 1e-10;

/// Square maximum-volume row selection.
///
/// Rows are seeded by Gaussian elimination with partial (row) pivoting, then
/// the row pair with the largest |C_ij| is swapped until every coefficient of
/// C = Qs * Qs[rows]^-1 satisfies |C_ij| <= 1 + delta, or 10 * n swaps have
/// been made (converged = false). Argmax ties go to the lowest row index, then
/// the lowest column. Throws DegenerateInputError when Qs is rank deficient.
MaxVolSelection maxvol_square(const Matrix& qs, double delta);

/// Rectangular extension: starting from maxvol_square, keeps appending the
/// row with the largest coefficient norm ||c_i||_2 while it exceeds
/// 1 + growth_delta and fewer than `cap` rows are selected. The coefficient
/// matrix is maintained with the rank-1 pseudo-inverse update.
MaxVolSelection maxvol_rect(const Matrix& qs, double delta, double growth_delta, std::size_t cap);

/// sqrt(det(A^T A)) for the rows of `qs` listed in `rows`.
double submatrix_volume(const Matrix& qs, const std::vector<std::size_t>& rows);

}  // namespace framepick::linalg
