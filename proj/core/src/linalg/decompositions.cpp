#include "admmgmres/linalg/decompositions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace admmgmres::linalg {

Matrix checked_symmetric(const Matrix& m) {
  if (!m.is_square()) throw DimensionError("symmetric matrix must be square");
  const double asym = asymmetry(m);
  if (asym > kSymmetryTol * norm_inf(m)) throw NotSymmetric(asym);
  return symmetrized(m);
}

Cholesky::Cholesky(const Matrix& spd) : l_(checked_symmetric(spd)) {
  const std::size_t n = l_.rows();
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t j = 0; j < n; ++j) {
    double d = l_(j, j);
    // A pivot lost to cancellation (below n eps of the original diagonal) is
    // treated as zero.
    const double floor = static_cast<double>(n) * eps * std::abs(d);
    const auto lj = l_.row(j);
    for (std::size_t k = 0; k < j; ++k) d -= lj[k] * lj[k];
    if (!(d > floor)) throw NotPositiveDefinite(j);
    const double ljj = std::sqrt(d);
    l_(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      const auto li = l_.row(i);
      double s = li[j];
      for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
      li[j] = s / ljj;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) l_(i, j) = 0.0;
}

void Cholesky::solve_lower_in_place(std::span<double> b) const {
  const std::size_t n = l_.rows();
  assert(b.size() == n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* li = l_.row(i).data();
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= li[k] * b[k];
    b[i] = s / li[i];
  }
}

void Cholesky::solve_upper_in_place(std::span<double> b) const {
  const std::size_t n = l_.rows();
  assert(b.size() == n);
  // Column-oriented back substitution on L^T keeps row-major access.
  for (std::size_t ii = n; ii-- > 0;) {
    const double* li = l_.row(ii).data();
    b[ii] /= li[ii];
    const double bi = b[ii];
    for (std::size_t k = 0; k < ii; ++k) b[k] -= li[k] * bi;
  }
}

void Cholesky::solve_in_place(std::span<double> b) const {
  solve_lower_in_place(b);
  solve_upper_in_place(b);
}

Vector Cholesky::solve(std::span<const double> b) const {
  Vector x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

Matrix cholesky(const Matrix& spd) { return Cholesky(spd).lower(); }

QrDecomposition qr(const Matrix& m, bool require_full_rank) {
  const std::size_t rows = m.rows(), cols = m.cols();
  Matrix r = m;
  Matrix q = Matrix::identity(rows);
  const std::size_t steps = std::min(rows == 0 ? 0 : rows - 1, cols);
  Vector v(rows);
  for (std::size_t k = 0; k < steps; ++k) {
    double alpha = 0.0;
    {
      Vector col(rows - k);
      for (std::size_t i = k; i < rows; ++i) col[i - k] = r(i, k);
      alpha = norm2(col);
    }
    if (alpha == 0.0) continue;
    if (r(k, k) > 0.0) alpha = -alpha;
    // v = x - alpha e_1, normalized so H = I - 2 v v^T / (v^T v)
    std::fill(v.begin(), v.end(), 0.0);
    for (std::size_t i = k; i < rows; ++i) v[i] = r(i, k);
    v[k] -= alpha;
    double vtv = 0.0;
    for (std::size_t i = k; i < rows; ++i) vtv += v[i] * v[i];
    if (vtv == 0.0) continue;
    const double tau = 2.0 / vtv;
    // R <- H R
    for (std::size_t j = k; j < cols; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < rows; ++i) s += v[i] * r(i, j);
      s *= tau;
      for (std::size_t i = k; i < rows; ++i) r(i, j) -= s * v[i];
    }
    // Q <- Q H
    for (std::size_t i = 0; i < rows; ++i) {
      auto qi = q.row(i);
      double s = 0.0;
      for (std::size_t j = k; j < rows; ++j) s += qi[j] * v[j];
      s *= tau;
      for (std::size_t j = k; j < rows; ++j) qi[j] -= s * v[j];
    }
    for (std::size_t i = k + 1; i < rows; ++i) r(i, k) = 0.0;
  }
  // Fix signs so diag(R) >= 0; makes the factorization unique for full rank.
  for (std::size_t k = 0; k < std::min(rows, cols); ++k) {
    if (r(k, k) >= 0.0) continue;
    for (std::size_t j = k; j < cols; ++j) r(k, j) = -r(k, j);
    for (std::size_t i = 0; i < rows; ++i) q(i, k) = -q(i, k);
  }
  if (require_full_rank) {
    const double fro = norm2(std::span<const double>(m.values()));
    const double tol = static_cast<double>(std::max(rows, cols)) *
                       std::numeric_limits<double>::epsilon() * fro;
    for (std::size_t k = 0; k < std::min(rows, cols); ++k)
      if (std::abs(r(k, k)) <= tol) throw RankDeficient(k);
  }
  return {std::move(q), std::move(r)};
}

Lu::Lu(Matrix square) : lu_(std::move(square)), perm_(lu_.rows()) {
  if (!lu_.is_square()) throw DimensionError("LU requires a square matrix");
  const std::size_t n = lu_.rows();
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  const double scale = std::max(norm_inf(lu_), std::numeric_limits<double>::min());
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu_(i, k)) > best) best = std::abs(lu_(i, k)), piv = i;
    if (best <= std::numeric_limits<double>::epsilon() * scale * 1e-3) {
      throw Singular("zero pivot in LU at column " + std::to_string(k));
    }
    if (piv != k) {
      std::swap_ranges(lu_.row(k).begin(), lu_.row(k).end(), lu_.row(piv).begin());
      std::swap(perm_[k], perm_[piv]);
    }
    const double inv = 1.0 / lu_(k, k);
    const auto rk = lu_.row(k);
    for (std::size_t i = k + 1; i < n; ++i) {
      auto ri = lu_.row(i);
      const double f = ri[k] * inv;
      ri[k] = f;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= f * rk[j];
    }
  }
}

Vector Lu::solve(std::span<const double> b) const {
  const std::size_t n = lu_.rows();
  if (b.size() != n) throw DimensionError("LU solve: dimension mismatch");
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
  for (std::size_t i = 0; i < n; ++i) {
    const auto ri = lu_.row(i);
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= ri[k] * x[k];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    const auto ri = lu_.row(i);
    double s = x[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= ri[k] * x[k];
    x[i] = s / ri[i];
  }
  return x;
}

Matrix Lu::solve(const Matrix& b) const {
  Matrix x(b.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) x.set_column(j, solve(b.column(j)));
  return x;
}

Matrix Lu::inverse() const { return solve(Matrix::identity(dim())); }

Vector lu_solve(const Matrix& m, std::span<const double> b) { return Lu(m).solve(b); }

}  // namespace admmgmres::linalg
