#include "framepick/linalg/maxvol.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "framepick/error.hpp"
#include "framepick/linalg/svd.hpp"

namespace framepick::linalg {

namespace {

struct SquareState {
  std::vector<std::size_t> basis;  // basis[j] is the row paired with column j of coeffs
  Matrix coeffs;                   // n x s, Qs * Qs[basis]^-1
  bool converged = false;
  std::size_t swaps = 0;
};

void check_full_rank(const Matrix& qs) {
  if (qs.rows() < qs.cols() || qs.cols() == 0) {
    throw ValidationError("maxvol: need n >= s >= 1 (got " + std::to_string(qs.rows()) + "x" +
                          std::to_string(qs.cols()) + ")");
  }
  if (!all_finite(qs)) throw ValidationError("maxvol: non-finite input");
  const SvdResult svd = full_svd(qs);
  const double top = svd.singular_values.front();
  const double last = svd.singular_values.back();
  if (!(top > 0.0) || !(last > kRankTolerance * top)) {
    throw DegenerateInputError("maxvol: input is rank deficient (sigma_s/sigma_1 = " +
                               std::to_string(top > 0.0 ? last / top : 0.0) + ")");
  }
}

/// Rows chosen as pivots by Gaussian elimination with partial pivoting.
std::vector<std::size_t> pivot_rows(const Matrix& qs) {
  Matrix work = qs;
  const std::size_t n = qs.rows();
  const std::size_t s = qs.cols();
  std::vector<bool> used(n, false);
  std::vector<std::size_t> pivots;
  pivots.reserve(s);
  for (std::size_t j = 0; j < s; ++j) {
    std::size_t piv = n;
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!used[i] && std::abs(work(i, j)) > best) {
        best = std::abs(work(i, j));
        piv = i;
      }
    }
    if (piv == n) throw DegenerateInputError("maxvol: zero pivot during elimination");
    used[piv] = true;
    pivots.push_back(piv);
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      const double factor = work(i, j) / work(piv, j);
      if (factor == 0.0) continue;
      for (std::size_t l = j; l < s; ++l) work(i, l) -= factor * work(piv, l);
    }
  }
  return pivots;
}

Matrix coefficients(const Matrix& qs, const std::vector<std::size_t>& basis) {
  return qs * inverse(qs.select_rows(basis));
}

struct Argmax {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = -1.0;
};

Argmax abs_argmax(const Matrix& c) {
  Argmax best;
  for (std::size_t i = 0; i < c.rows(); ++i) {
    for (std::size_t j = 0; j < c.cols(); ++j) {
      const double v = std::abs(c(i, j));
      if (v > best.value) best = {i, j, v};
    }
  }
  return best;
}

SquareState square_phase(const Matrix& qs, double delta) {
  if (!(delta > 0.0)) throw ValidationError("maxvol: delta must be > 0");
  check_full_rank(qs);

  const std::size_t n = qs.rows();
  const std::size_t s = qs.cols();
  SquareState st;
  st.basis = pivot_rows(qs);
  st.coeffs = coefficients(qs, st.basis);

  const double bound = 1.0 + delta;
  const std::size_t max_swaps = 10 * n;
  std::vector<double> col(n);
  std::vector<double> row(s);
  while (true) {
    Argmax m = abs_argmax(st.coeffs);
    if (m.value <= bound) {
      // The rank-1 updates drift; confirm dominance on a fresh C.
      st.coeffs = coefficients(qs, st.basis);
      m = abs_argmax(st.coeffs);
      if (m.value <= bound) {
        st.converged = true;
        return st;
      }
    }
    if (st.swaps >= max_swaps) {
      st.coeffs = coefficients(qs, st.basis);
      st.converged = false;
      return st;
    }

    // Row m.row replaces basis[m.col]; |det| grows by |C_ij|.
    const double pivot = st.coeffs(m.row, m.col);
    for (std::size_t k = 0; k < n; ++k) col[k] = st.coeffs(k, m.col);
    for (std::size_t l = 0; l < s; ++l) row[l] = st.coeffs(m.row, l);
    row[m.col] -= 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double f = col[k] / pivot;
      if (f == 0.0) continue;
      for (std::size_t l = 0; l < s; ++l) st.coeffs(k, l) -= f * row[l];
    }
    st.basis[m.col] = m.row;
    ++st.swaps;
  }
}

std::vector<std::size_t> sorted(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

MaxVolSelection maxvol_square(const Matrix& qs, double delta) {
  SquareState st = square_phase(qs, delta);
  MaxVolSelection out;
  out.row_indices = sorted(st.basis);
  out.selection_order = st.basis;
  out.coefficient_max = max_abs(st.coeffs);
  out.converged = st.converged;
  out.swaps = st.swaps;
  return out;
}

MaxVolSelection maxvol_rect(const Matrix& qs, double delta, double growth_delta,
                            std::size_t cap) {
  if (cap < qs.cols()) throw ValidationError("maxvol_rect: cap must be >= s");
  if (!(growth_delta >= 0.0)) throw ValidationError("maxvol_rect: growth_delta must be >= 0");
  SquareState st = square_phase(qs, delta);

  const std::size_t n = qs.rows();
  const std::size_t s = qs.cols();
  const std::size_t limit = std::min(cap, n);

  // Coefficients live in the first p columns of an n x limit buffer.
  Matrix c(n, limit);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < s; ++j) c(i, j) = st.coeffs(i, j);
  }
  std::size_t p = s;
  std::vector<std::size_t> basis = st.basis;

  std::vector<double> norms2(n);
  auto refresh_norms = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < p; ++j) acc += c(i, j) * c(i, j);
      norms2[i] = acc;
    }
  };
  auto argmax_norm = [&] {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (norms2[i] > norms2[best]) best = i;
    }
    return best;
  };

  refresh_norms();
  const double bound = 1.0 + growth_delta;
  std::vector<double> ci(limit);
  std::vector<double> projected(n);
  while (p < limit) {
    const std::size_t i = argmax_norm();
    if (std::sqrt(norms2[i]) <= bound) break;

    // Appending row i: C' = [C - (C c_i^T) c_i / (1 + l_i), (C c_i^T) / (1 + l_i)].
    const double li = norms2[i];
    for (std::size_t j = 0; j < p; ++j) ci[j] = c(i, j);
    for (std::size_t k = 0; k < n; ++k) {
      double acc = 0.0;
      for (std::size_t j = 0; j < p; ++j) acc += c(k, j) * ci[j];
      projected[k] = acc;
    }
    const double scale = 1.0 / (1.0 + li);
    for (std::size_t k = 0; k < n; ++k) {
      const double f = projected[k] * scale;
      for (std::size_t j = 0; j < p; ++j) c(k, j) -= f * ci[j];
      c(k, p) = f;
    }
    basis.push_back(i);
    ++p;
    refresh_norms();
  }

  MaxVolSelection out;
  out.row_indices = sorted(basis);
  out.selection_order = basis;
  out.coefficient_max = std::sqrt(norms2[argmax_norm()]);
  out.converged = st.converged;
  out.swaps = st.swaps;
  return out;
}

double submatrix_volume(const Matrix& qs, const std::vector<std::size_t>& rows) {
  const Matrix a = qs.select_rows(rows);
  if (a.rows() == a.cols()) return std::abs(determinant(a));
  const double g = determinant(a.transpose() * a);
  return std::sqrt(std::max(g, 0.0));
}

}  // namespace framepick::linalg
