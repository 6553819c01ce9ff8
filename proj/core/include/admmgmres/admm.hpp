#pragma once

#include <cstddef>
#include <span>
#include <utility>

#include "admmgmres/problem.hpp"
#include "admmgmres/solve_report.hpp"

namespace admmgmres {

/// An affine fixed-point map u -> T(u) = G u + b together with the residual
/// used to decide convergence. Implementations are immutable and safe to
/// share across threads.
class FixedPointMap {
 public:
  virtual ~FixedPointMap() = default;
  virtual std::size_t dim() const = 0;
  /// out = T(in); `in` and `out` must not alias.
  virtual void apply(std::span<const double> in, std::span<double> out) const = 0;
  /// Relative residual of the underlying saddle-point system at u.
  virtual double saddle_residual(std::span<const double> u) const = 0;

  Vector apply(std::span<const double> in) const {
    Vector out(dim());
    apply(in, out);
    return out;
  }
};

/// How the x-update solves (beta^{-1} D + A^T A) x = r.
enum class XSolveRoute {
  /// Cached eigendecomposition of Dtilde; O(n^2 + m^2) per solve.
  eigen,
  /// Cholesky of beta^{-1} I + A D^{-1} A^T formed at construction.
  woodbury,
};

/// One ADMM sweep on the ECQP as an affine map on u = [x; z; y], where y is
/// the scaled multiplier (the true multiplier is beta * y):
///
///   x <- (beta^{-1} D + A^T A)^{-1} [A^T (d - B z - y) - beta^{-1} c]
///   z <- (B^T B)^{-1} [B^T (d - A x - y) - beta^{-1} p]
///   y <- y + A x + B z - d
class AdmmOperator final : public FixedPointMap {
 public:
  AdmmOperator(EcqpProblem prob, double beta, XSolveRoute route = XSolveRoute::eigen);
  /// beta defaults to sqrt(mu L).
  explicit AdmmOperator(EcqpProblem prob);

  std::size_t dim() const override { return prob_.dim(); }
  using FixedPointMap::apply;
  void apply(std::span<const double> in, std::span<double> out) const override;
  double saddle_residual(std::span<const double> u) const override;

  double beta() const noexcept { return beta_; }
  XSolveRoute route() const noexcept { return route_; }
  const EcqpProblem& problem() const noexcept { return prob_; }
  const ProblemFactors& factors() const noexcept { return factors_; }

  /// (beta^{-1} D + A^T A)^{-1} r through the selected route.
  Vector solve_x(std::span<const double> r) const;

  /// Converts an iterate [x; z; y_scaled] to a saddle solution [x; z; beta y].
  Vector to_saddle(std::span<const double> u) const;
  /// Inverse of to_saddle.
  Vector from_saddle(std::span<const double> w) const;

 private:
  Vector solve_x_eigen(std::span<const double> r) const;
  Vector solve_x_woodbury(std::span<const double> r) const;

  EcqpProblem prob_;
  ProblemFactors factors_;
  double beta_;
  XSolveRoute route_;
  /// beta lambda_i / (lambda_i + beta) = 1 / (beta^{-1} + 1/lambda_i)
  Vector woodbury_weights_;
  std::optional<linalg::Cholesky> woodbury_chol_;
};

/// ||u - T(u)||_2, the M-metric distance to the fixed point.
double residual_metric(const FixedPointMap& op, std::span<const double> u);

/// Plain fixed-point iteration u <- T(u) until the saddle residual is at most
/// tol or max_iters sweeps have run.
std::pair<Vector, SolveReport> solve_admm(const FixedPointMap& op,
                                          std::span<const double> u0, double tol,
                                          std::size_t max_iters);

/// Over-relaxed iteration: two plain sweeps, then u <- (1 - omega) u + omega T(u).
std::pair<Vector, SolveReport> solve_sor(const FixedPointMap& op,
                                         std::span<const double> u0, double omega,
                                         double tol, std::size_t max_iters);

/// sqrt(mu L): minimizes gamma(beta) = max(L / beta, beta / mu).
double optimal_beta(const SpectralConstants& sc);

/// max(L / beta, beta / mu)
double gamma_of(const SpectralConstants& sc, double beta);

}  // namespace admmgmres
