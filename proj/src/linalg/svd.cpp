#include "framepick/linalg/svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "framepick/error.hpp"

namespace framepick::linalg {

namespace {

using Column = std::vector<double>;

double dot(const Column& a, const Column& b) {
  // Four independent accumulators let the compiler vectorize without -ffast-math.
  const std::size_t n = a.size();
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

struct Reflector {
  Column v;  // acts on rows [k, n)
  double tau = 0.0;
};

/// Householder QR with column pivoting, in place on `cols` (column storage).
/// On return cols[j][i] for i <= j holds R; perm[j] is the source column of j.
std::vector<Reflector> pivoted_qr(std::vector<Column>& cols, std::vector<std::size_t>& perm) {
  const std::size_t d = cols.size();
  const std::size_t n = cols.front().size();
  std::vector<Reflector> reflectors(d);
  perm.resize(d);
  std::iota(perm.begin(), perm.end(), std::size_t{0});

  for (std::size_t k = 0; k < d; ++k) {
    std::size_t piv = k;
    double best = -1.0;
    for (std::size_t j = k; j < d; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < n; ++i) s += cols[j][i] * cols[j][i];
      if (s > best) {
        best = s;
        piv = j;
      }
    }
    if (piv != k) {
      std::swap(cols[k], cols[piv]);
      std::swap(perm[k], perm[piv]);
    }

    Column& x = cols[k];
    const double norm = std::sqrt(best);
    Reflector& h = reflectors[k];
    if (norm == 0.0) continue;  // identity reflector

    const double alpha = x[k] > 0.0 ? -norm : norm;
    h.v.assign(x.begin() + static_cast<std::ptrdiff_t>(k), x.end());
    h.v[0] -= alpha;
    const double vv = std::inner_product(h.v.begin(), h.v.end(), h.v.begin(), 0.0);
    h.tau = vv > 0.0 ? 2.0 / vv : 0.0;
    x[k] = alpha;
    std::fill(x.begin() + static_cast<std::ptrdiff_t>(k) + 1, x.end(), 0.0);

    for (std::size_t j = k + 1; j < d; ++j) {
      Column& c = cols[j];
      double w = 0.0;
      for (std::size_t i = 0; i < h.v.size(); ++i) w += h.v[i] * c[k + i];
      w *= h.tau;
      for (std::size_t i = 0; i < h.v.size(); ++i) c[k + i] -= w * h.v[i];
    }
  }
  return reflectors;
}

/// One-sided Jacobi: rotates column pairs of `x` until they are mutually
/// orthogonal, applying the same rotations to `v` (initially identity).
void hestenes_jacobi(std::vector<Column>& x, std::vector<Column>& v) {
  const std::size_t k = x.size();
  if (k < 2) return;
  const double tol =
      std::numeric_limits<double>::epsilon() * std::sqrt(static_cast<double>(x.front().size()));
  constexpr int kMaxSweeps = 80;

  std::vector<double> norms2(k);
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    // Squared norms are updated analytically inside a sweep and refreshed here.
    for (std::size_t i = 0; i < k; ++i) norms2[i] = dot(x[i], x[i]);
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < k; ++p) {
      for (std::size_t q = p + 1; q < k; ++q) {
        const double alpha = norms2[p];
        const double beta = norms2[q];
        if (alpha == 0.0 || beta == 0.0) continue;
        const double gamma = dot(x[p], x[q]);
        if (std::abs(gamma) <= tol * std::sqrt(alpha) * std::sqrt(beta)) continue;
        rotated = true;

        const double zeta = (beta - alpha) / (2.0 * gamma);
        double t;
        if (std::abs(zeta) > 1e150) {
          t = 1.0 / (2.0 * zeta);
        } else {
          t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;

        auto rotate = [c, s](Column& a, Column& b) {
          double* pa = a.data();
          double* pb = b.data();
          const std::size_t m = a.size();
          for (std::size_t i = 0; i < m; ++i) {
            const double ai = pa[i];
            const double bi = pb[i];
            pa[i] = c * ai - s * bi;
            pb[i] = s * ai + c * bi;
          }
        };
        rotate(x[p], x[q]);
        rotate(v[p], v[q]);
        norms2[p] = std::max(alpha - t * gamma, 0.0);
        norms2[q] = beta + t * gamma;
      }
    }
    if (!rotated) return;
  }
}

/// Replaces the listed columns of `m` (all others orthonormal) with unit
/// vectors orthogonal to every other column.
void complete_basis(Matrix& m, const std::vector<std::size_t>& missing) {
  const std::size_t n = m.rows();
  std::vector<bool> is_missing(m.cols(), false);
  for (auto j : missing) is_missing[j] = true;

  for (const std::size_t target : missing) {
    for (std::size_t e = 0; e < n; ++e) {
      Column cand(n, 0.0);
      cand[e] = 1.0;
      // Two passes of modified Gram-Schmidt.
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
          if (is_missing[j]) continue;
          double proj = 0.0;
          for (std::size_t i = 0; i < n; ++i) proj += m(i, j) * cand[i];
          for (std::size_t i = 0; i < n; ++i) cand[i] -= proj * m(i, j);
        }
      }
      const double norm = std::sqrt(dot(cand, cand));
      if (norm > 0.5) {
        for (std::size_t i = 0; i < n; ++i) m(i, target) = cand[i] / norm;
        is_missing[target] = false;
        break;
      }
    }
  }
}

/// Thin SVD of a matrix with rows >= cols.
SvdResult tall_svd(const Matrix& a) {
  const std::size_t n = a.rows();
  const std::size_t d = a.cols();

  std::vector<Column> cols(d, Column(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) cols[j][i] = a(i, j);
  }
  std::vector<std::size_t> perm;
  const std::vector<Reflector> reflectors = pivoted_qr(cols, perm);

  // X = R^T: column i of X is row i of R.
  std::vector<Column> x(d, Column(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) x[i][j] = cols[j][i];
  }
  std::vector<Column> vx(d, Column(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) vx[i][i] = 1.0;
  hestenes_jacobi(x, vx);

  std::vector<double> sigma(d);
  for (std::size_t i = 0; i < d; ++i) sigma[i] = std::sqrt(dot(x[i], x[i]));
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return sigma[l] > sigma[r]; });

  // Left factor: Q * [Vx; 0], applying Q = H_0 H_1 ... H_{d-1} column by column.
  std::vector<Column> left(d, Column(n, 0.0));
  for (std::size_t c = 0; c < d; ++c) {
    Column& col = left[c];
    std::copy(vx[c].begin(), vx[c].end(), col.begin());
    for (std::size_t kk = d; kk-- > 0;) {
      const Reflector& h = reflectors[kk];
      if (h.tau == 0.0) continue;
      double w = 0.0;
      for (std::size_t i = 0; i < h.v.size(); ++i) w += h.v[i] * col[kk + i];
      w *= h.tau;
      for (std::size_t i = 0; i < h.v.size(); ++i) col[kk + i] -= w * h.v[i];
    }
  }

  SvdResult out;
  out.singular_values.resize(d);
  out.left = Matrix(n, d);
  out.right = Matrix(d, d);
  std::vector<std::size_t> zero_columns;
  for (std::size_t c = 0; c < d; ++c) {
    const std::size_t src = order[c];
    out.singular_values[c] = sigma[src];
    for (std::size_t i = 0; i < n; ++i) out.left(i, c) = left[src][i];
    // Right factor: P * Ux, Ux = normalized columns of X.
    if (sigma[src] > 0.0) {
      for (std::size_t j = 0; j < d; ++j) out.right(perm[j], c) = x[src][j] / sigma[src];
    } else {
      zero_columns.push_back(c);
    }
  }

  if (!zero_columns.empty()) complete_basis(out.right, zero_columns);
  return out;
}

}  // namespace

SvdResult full_svd(const Matrix& a) {
  if (a.empty()) throw DegenerateInputError("SVD of an empty matrix");
  if (!all_finite(a)) throw ValidationError("SVD input contains non-finite entries");
  if (a.rows() >= a.cols()) return tall_svd(a);
  SvdResult t = tall_svd(a.transpose());
  std::swap(t.left, t.right);
  return t;
}

std::size_t energy_rank(const std::vector<double>& spectrum, double energy) {
  const std::size_t k = spectrum.size();
  if (k == 0) return 0;
  double total = 0.0;
  for (double s : spectrum) total += s * s;
  std::size_t s = k;
  double cum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    cum += spectrum[i] * spectrum[i];
    // Slack absorbs rounding in the running sum (e.g. energy 2/3 of I_3).
    if (cum >= energy * total - 1e-12 * total) {
      s = i + 1;
      break;
    }
  }
  return std::clamp(s, std::min<std::size_t>(2, k), k);
}

SvdResult truncate(const SvdResult& full, std::size_t s) {
  SvdResult out;
  out.singular_values.assign(full.singular_values.begin(),
                             full.singular_values.begin() + static_cast<std::ptrdiff_t>(s));
  out.left = full.left.leading_columns(s);
  out.right = full.right.leading_columns(s);
  return out;
}

SvdResult truncated_svd(const Matrix& a, double energy) {
  if (!(energy > 0.0 && energy <= 1.0)) {
    throw ValidationError("svd energy threshold must be in (0, 1]");
  }
  SvdResult full = full_svd(a);
  if (full.singular_values.front() == 0.0) {
    throw DegenerateInputError("SVD of an all-zero matrix");
  }
  return truncate(full, energy_rank(full.singular_values, energy));
}

}  // namespace framepick::linalg
