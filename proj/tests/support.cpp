#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <stdlib.h>

namespace testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  std::string tmpl = (fs::temp_directory_path() / "framepick-test-XXXXXX").string();
  if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_file(const fs::path& path, const std::string& contents) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << contents;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

framepick::linalg::Matrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  framepick::linalg::Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = normal(rng);
  }
  return m;
}

std::vector<long double> symmetric_eigenvalues(std::vector<std::vector<long double>> a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    long double off = 0, diag = 0;
    for (std::size_t i = 0; i < n; ++i) {
      diag += a[i][i] * a[i][i];
      for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
    }
    if (off <= 1e-36L * diag || off == 0) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0) continue;
        // Rotation zeroing a[p][q] (Golub & Van Loan, sym.schur2).
        const long double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const long double t = (theta >= 0 ? 1 : -1) / (std::fabs(theta) + std::sqrt(theta * theta + 1));
        const long double c = 1 / std::sqrt(t * t + 1);
        const long double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const long double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const long double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<long double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

std::vector<double> oracle_singular_values(const framepick::linalg::Matrix& m) {
  const bool tall = m.rows() >= m.cols();
  const std::size_t k = tall ? m.cols() : m.rows();
  const std::size_t inner = tall ? m.rows() : m.cols();
  std::vector<std::vector<long double>> g(k, std::vector<long double>(k, 0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      long double sum = 0;
      for (std::size_t r = 0; r < inner; ++r) {
        const long double x = tall ? m(r, i) : m(i, r);
        const long double y = tall ? m(r, j) : m(j, r);
        sum += x * y;
      }
      g[i][j] = g[j][i] = sum;
    }
  }
  std::vector<double> sv;
  for (const long double e : symmetric_eigenvalues(g)) {
    sv.push_back(static_cast<double>(std::sqrt(std::max<long double>(e, 0))));
  }
  return sv;
}

long double oracle_det(const std::vector<std::vector<long double>>& input) {
  auto a = input;
  const std::size_t n = a.size();
  long double det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    }
    if (a[piv][c] == 0) return 0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const long double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

double oracle_abs_det(const framepick::linalg::Matrix& m, const std::vector<std::size_t>& rows) {
  std::vector<std::vector<long double>> a;
  for (const std::size_t r : rows) {
    std::vector<long double> row;
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(r, j));
    a.push_back(std::move(row));
  }
  return static_cast<double>(std::fabs(oracle_det(a)));
}

std::vector<std::vector<std::size_t>> combinations(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur(k);
  for (std::size_t i = 0; i < k; ++i) cur[i] = i;
  if (k > n) return out;
  for (;;) {
    out.push_back(cur);
    std::size_t i = k;
    while (i > 0 && cur[i - 1] == n - k + i - 1) --i;
    if (i == 0) return out;
    ++cur[i - 1];
    for (std::size_t j = i; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
}

BestSubset brute_force_maxvol(const framepick::linalg::Matrix& m) {
  BestSubset best;
  for (const auto& rows : combinations(m.rows(), m.cols())) {
    const double v = oracle_abs_det(m, rows);
    if (v > best.abs_det) best = {rows, v};
  }
  return best;
}

}  // namespace testing
