#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "framepick/linalg/matrix.hpp"

namespace testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_file(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

/// Entries drawn from N(0, 1) with a fixed-seed engine.
framepick::linalg::Matrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed);

// Oracles. These deliberately share no code with the library.

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations in long
/// double, sorted descending.
std::vector<long double> symmetric_eigenvalues(std::vector<std::vector<long double>> a);

/// Singular values of `m` as square roots of the eigenvalues of the smaller
/// Gram matrix, sorted descending; min(rows, cols) values.
std::vector<double> oracle_singular_values(const framepick::linalg::Matrix& m);

/// Determinant by Gaussian elimination with partial pivoting, long double.
long double oracle_det(const std::vector<std::vector<long double>>& a);

/// |det| of the square submatrix of `m` on `rows`.
double oracle_abs_det(const framepick::linalg::Matrix& m, const std::vector<std::size_t>& rows);

struct BestSubset {
  std::vector<std::size_t> rows;
  double abs_det = 0.0;
};

/// Exhaustive search over every s-row subset, s = m.cols().
BestSubset brute_force_maxvol(const framepick::linalg::Matrix& m);

/// Every k-subset of [0, n) in lexicographic order.
std::vector<std::vector<std::size_t>> combinations(std::size_t n, std::size_t k);

}  // namespace testing
