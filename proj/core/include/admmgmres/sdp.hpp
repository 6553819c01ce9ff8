#pragma once

#include <cstdint>

#include "admmgmres/admm.hpp"
#include "admmgmres/linalg/eigen.hpp"

namespace admmgmres {

/// Length n(n+1)/2 of svec for an n x n symmetric matrix.
constexpr std::size_t svec_dim(std::size_t n) { return n * (n + 1) / 2; }

/// Column-major lower triangle with off-diagonal entries scaled by sqrt2, so
/// <svec(S), svec(T)> = trace(S T). Throws NotSymmetric beyond the repo
/// symmetry tolerance.
Vector svec(const Matrix& s);
/// Inverse of svec. Throws DimensionError if v.size() is not triangular.
Matrix smat(std::span<const double> v);

/// Newton subproblem of a semidefinite program in svec coordinates:
///
///   minimize    1/2 s^T (W (x) W) s - xhat^T s - bhat^T y
///   subject to  s + Amat y = chat
///
/// where (W (x) W) s = svec(W smat(s) W).
struct SdpNewtonProblem {
  Matrix W;     // n x n SPD
  Matrix Amat;  // svec_dim(n) x m, full column rank
  Vector x_hat;
  Vector b_hat;
  Vector c_hat;

  std::size_t n() const noexcept { return W.rows(); }
  std::size_t m() const noexcept { return Amat.cols(); }
  std::size_t ns() const noexcept { return svec_dim(n()); }
  void check_dimensions() const;
};

/// svec(W smat(s) W)
Vector apply_sym_kron(const Matrix& W, std::span<const double> s);
/// Dense svec_dim(n) x svec_dim(n) matrix of s -> svec(W smat(s) W).
Matrix sym_kron_dense(const Matrix& W);

/// (beta^{-1} W (x) W + I)^{-1} applied to symmetric C by the Hadamard formula
/// V [beta / (lambda_i lambda_j + beta) o (V^T C V)] V^T, O(n^3).
Matrix kron_solve(const linalg::SymmetricEigenPairs& w_eig, double beta, const Matrix& C);

/// The same problem as an EcqpProblem: D = W (x) W on svec space, c = -xhat,
/// A = I, B = Amat, p = -bhat, d = chat.
EcqpProblem to_ecqp(const SdpNewtonProblem& prob);

/// ADMM iterate [s; y; xt] with xt = x / beta the scaled primal.
struct SdpAdmmState {
  Vector s;
  Vector y;
  Vector xt;
};

/// Specialized ADMM sweep
///
///   s  <- (beta^{-1} W (x) W + I)^{-1} (xhat / beta + chat - Amat y - xt)
///   y  <- (Amat^T Amat)^{-1} [bhat / beta - Amat^T (s + xt - chat)]
///   xt <- xt + s + Amat y - chat
///
/// as a fixed-point map on the stacked iterate [s; y; xt]. It coincides with
/// AdmmOperator on to_ecqp(prob).
class SdpAdmmOperator final : public FixedPointMap {
 public:
  SdpAdmmOperator(SdpNewtonProblem prob, double beta);
  /// beta defaults to lambda_min(W) lambda_max(W), i.e. sqrt(mu L).
  explicit SdpAdmmOperator(SdpNewtonProblem prob);

  std::size_t dim() const override { return 2 * prob_.ns() + prob_.m(); }
  using FixedPointMap::apply;
  void apply(std::span<const double> in, std::span<double> out) const override;
  double saddle_residual(std::span<const double> u) const override;

  SdpAdmmState step(const SdpAdmmState& st) const;
  Vector pack(const SdpAdmmState& st) const;
  SdpAdmmState unpack(std::span<const double> u) const;

  double beta() const noexcept { return beta_; }
  const SdpNewtonProblem& problem() const noexcept { return prob_; }
  const linalg::SymmetricEigenPairs& w_eig() const noexcept { return w_eig_; }
  /// cond(W)^2, the condition number of the equivalent ECQP.
  double kappa() const noexcept;

 private:
  SdpNewtonProblem prob_;
  linalg::SymmetricEigenPairs w_eig_;
  linalg::Cholesky chol_ata_;
  double beta_;
};

/// Random Newton subproblem with cond(W)^2 = kappa: W = V diag(lambda) V^T,
/// V Haar and lambda log-spaced in [kappa^{-1/4}, kappa^{1/4}]; Amat has
/// orthonormal columns obtained from random symmetric Gaussian A_i; right-hand
/// sides standard Gaussian. Requires m <= n(n+1)/2 and kappa >= 1.
SdpNewtonProblem synthetic_newton(std::size_t n, std::size_t m, double kappa, std::uint64_t seed);

}  // namespace admmgmres
