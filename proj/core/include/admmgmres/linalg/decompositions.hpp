#pragma once

#include <span>

#include "admmgmres/linalg/matrix.hpp"

namespace admmgmres::linalg {

/// Relative symmetry tolerance: ||M - M^T||_inf <= kSymmetryTol * ||M||_inf.
inline constexpr double kSymmetryTol = 1e-10;

/// Throws NotSymmetric if `m` fails the repo-wide symmetry test, otherwise
/// returns (M + M^T)/2.
Matrix checked_symmetric(const Matrix& m);

/// Cholesky factorization M = L L^T of a symmetric positive-definite matrix.
class Cholesky {
 public:
  explicit Cholesky(const Matrix& spd);

  const Matrix& lower() const noexcept { return l_; }
  std::size_t dim() const noexcept { return l_.rows(); }

  /// b <- L^{-1} b
  void solve_lower_in_place(std::span<double> b) const;
  /// b <- L^{-T} b
  void solve_upper_in_place(std::span<double> b) const;
  /// b <- M^{-1} b
  void solve_in_place(std::span<double> b) const;
  Vector solve(std::span<const double> b) const;

 private:
  Matrix l_;
};

/// Lower-triangular Cholesky factor of `spd`.
Matrix cholesky(const Matrix& spd);

/// Full Householder QR: M = Q R with Q square orthogonal (rows x rows) and
/// R upper triangular (rows x cols).
struct QrDecomposition {
  Matrix q;
  Matrix r;

  /// First `k` columns of Q (the range of M when k = rank).
  Matrix leading(std::size_t k) const { return q.block(0, 0, q.rows(), k); }
  /// Remaining columns of Q (orthogonal complement).
  Matrix complement(std::size_t k) const {
    return q.block(0, k, q.rows(), q.cols() - k);
  }
};

/// Householder QR. With `require_full_rank`, a diagonal entry of R below
/// max(rows, cols) * eps * ||M||_F raises RankDeficient.
QrDecomposition qr(const Matrix& m, bool require_full_rank = true);

/// LU with partial pivoting; used for dense reference solves.
class Lu {
 public:
  explicit Lu(Matrix square);
  Vector solve(std::span<const double> b) const;
  Matrix solve(const Matrix& b) const;
  Matrix inverse() const;
  std::size_t dim() const noexcept { return lu_.rows(); }

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
};

/// Dense solve of M x = b via LU.
Vector lu_solve(const Matrix& m, std::span<const double> b);

}  // namespace admmgmres::linalg
