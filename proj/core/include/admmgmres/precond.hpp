#pragma once

#include <optional>
#include <string_view>
#include <utility>

#include "admmgmres/krylov.hpp"
#include "admmgmres/problem.hpp"

namespace admmgmres {

/// Elimination of x from the saddle system. With S = A D^{-1} A^T and
/// Dtilde = S^{-1}:
///
///   reduced:  [0  B^T; B  -S] [z; y] = [-p; d'],    d' = d + A D^{-1} c
///   Schur:    B^T Dtilde B z = -p',                  p' = p - B^T Dtilde d'
///   back:     y = Dtilde (B z - d'),  x = -D^{-1} (A^T y + c)
///
/// All products go through the cached factorizations, so each costs
/// O(n^2 + m^2 + m l).
class SaddleReduction {
 public:
  explicit SaddleReduction(EcqpProblem prob);

  const EcqpProblem& problem() const noexcept { return prob_; }
  const ProblemFactors& factors() const noexcept { return factors_; }
  std::size_t reduced_dim() const noexcept { return prob_.l() + prob_.m(); }

  struct Forward {
    Vector d_prime;
    Vector p_prime;
  };
  Forward forward_substitute() const;

  struct Back {
    Vector y;
    Vector x;
  };
  Back back_substitute(std::span<const double> z) const;
  /// x from y alone: -D^{-1} (A^T y + c)
  Vector recover_x(std::span<const double> y) const;

  /// Full saddle solution [x; z; y] from a reduced iterate [z; y].
  Vector expand_reduced(std::span<const double> zy) const;
  /// Full saddle solution [x; z; y] from a Schur iterate z.
  Vector expand_schur(std::span<const double> z) const;

  /// Right-hand side [-p; d'] of the reduced system.
  Vector reduced_rhs() const;
  /// Right-hand side -p' of the Schur system.
  Vector schur_rhs() const;

 private:
  EcqpProblem prob_;
  ProblemFactors factors_;
  Vector d_prime_;
};

/// [0  B^T; B  -S] acting on [z; y].
class ReducedOperator final : public LinearOperator {
 public:
  explicit ReducedOperator(const SaddleReduction& red) : red_(red) {}
  std::size_t dim() const override { return red_.reduced_dim(); }
  using LinearOperator::apply;
  void apply(std::span<const double> in, std::span<double> out) const override;

 private:
  const SaddleReduction& red_;
};

/// B^T Dtilde B acting on z.
class SchurOperator final : public LinearOperator {
 public:
  explicit SchurOperator(const SaddleReduction& red) : red_(red) {}
  std::size_t dim() const override { return red_.problem().l(); }
  using LinearOperator::apply;
  void apply(std::span<const double> in, std::span<double> out) const override;

 private:
  const SaddleReduction& red_;
};

/// Inverse of M1 = diag(beta B^T B, S). SPD; used with MINRES.
class BlockDiagonalPreconditioner final : public LinearOperator {
 public:
  BlockDiagonalPreconditioner(const SaddleReduction& red, double beta);
  std::size_t dim() const override { return red_.reduced_dim(); }
  using LinearOperator::apply;
  void apply(std::span<const double> in, std::span<double> out) const override;
  double beta() const noexcept { return beta_; }

 private:
  const SaddleReduction& red_;
  double beta_;
};

/// Inverse of M2 = [0  B^T; B  -beta I], applied through
///
///   M2 = [I  -B^T/beta; 0  I] diag(B^T B / beta, -beta I) [I  0; -B/beta  I]
///
/// using the Cholesky factor of B^T B. Used with GMRES.
class ConstraintPreconditioner final : public LinearOperator {
 public:
  ConstraintPreconditioner(const SaddleReduction& red, double beta);
  std::size_t dim() const override { return red_.reduced_dim(); }
  using LinearOperator::apply;
  void apply(std::span<const double> in, std::span<double> out) const override;
  double beta() const noexcept { return beta_; }

 private:
  const SaddleReduction& red_;
  double beta_;
};

/// Inverse of M3 = B^T B on the Schur system. SPD; used with conjugate
/// residuals.
class SchurPreconditioner final : public LinearOperator {
 public:
  explicit SchurPreconditioner(const SaddleReduction& red) : red_(red) {}
  std::size_t dim() const override { return red_.problem().l(); }
  using LinearOperator::apply;
  void apply(std::span<const double> in, std::span<double> out) const override;

 private:
  const SaddleReduction& red_;
};

/// Inverse of M4 = diag(alpha I, -(S + alpha I)) [alpha I  B^T; -B  alpha I].
/// The second factor is inverted through its Schur complement on the (1,1)
/// block, alpha^2 I + B^T B, factored once. Used with GMRES.
class HssPreconditioner final : public LinearOperator {
 public:
  HssPreconditioner(const SaddleReduction& red, double alpha);
  std::size_t dim() const override { return red_.reduced_dim(); }
  using LinearOperator::apply;
  void apply(std::span<const double> in, std::span<double> out) const override;
  double alpha() const noexcept { return alpha_; }

 private:
  const SaddleReduction& red_;
  double alpha_;
  linalg::Cholesky chol_;
  Vector shifted_weights_;  // 1 / (1/lambda_i + alpha)
};

enum class SaddleMethod { blkdiag, constr1, constr2, hss };

std::string_view to_string(SaddleMethod m);
std::optional<SaddleMethod> parse_saddle_method(std::string_view name);

/// Parameter overrides; unset values take the defaults
/// beta = L (Blk-Diag), beta = sqrt(mu L) (Constr I), alpha = 1/L (HSS).
struct PrecondParams {
  std::optional<double> blkdiag_beta;
  std::optional<double> constr1_beta;
  std::optional<double> hss_alpha;
};

/// Reduce, solve with the method's Krylov pairing (MINRES, GMRES, CR, GMRES),
/// and back-substitute. Convergence is gated on the relative residual of the
/// full saddle system; returns [x; z; y].
std::pair<Vector, SolveReport> solve_preconditioned(const SaddleReduction& red,
                                                    SaddleMethod method,
                                                    const KrylovConfig& cfg,
                                                    const PrecondParams& params = {});

}  // namespace admmgmres
