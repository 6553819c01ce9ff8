#include "admmgmres/admm.hpp"

#include <algorithm>
#include <cmath>

namespace admmgmres {

using namespace linalg;

namespace {

double checked_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ProblemError("beta must be positive");
  return beta;
}

}  // namespace

AdmmOperator::AdmmOperator(EcqpProblem prob, double beta, XSolveRoute route)
    : prob_(std::move(prob)), factors_(prob_), beta_(checked_beta(beta)), route_(route) {
  const Vector& lambda = factors_.lambda();
  woodbury_weights_.resize(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i)
    woodbury_weights_[i] = beta_ * lambda[i] / (lambda[i] + beta_);
  if (route_ == XSolveRoute::woodbury) {
    Matrix f = prob_.A;
    for (std::size_t i = 0; i < f.rows(); ++i) factors_.chol_D().solve_lower_in_place(f.row(i));
    Matrix s = mul_nt(f, f);
    for (std::size_t i = 0; i < s.rows(); ++i) s(i, i) += 1.0 / beta_;
    woodbury_chol_.emplace(symmetrized(s));
  }
}

AdmmOperator::AdmmOperator(EcqpProblem prob)
    : AdmmOperator(prob, optimal_beta(spectral_constants(prob))) {}

Vector AdmmOperator::solve_x(std::span<const double> r) const {
  return route_ == XSolveRoute::eigen ? solve_x_eigen(r) : solve_x_woodbury(r);
}

// beta D^{-1} [r - A^T V diag(w) V^T A D^{-1} r]
Vector AdmmOperator::solve_x_eigen(std::span<const double> r) const {
  const Vector t = factors_.solve_D(r);
  const Vector s = factors_.apply_spectral(woodbury_weights_, prob_.A * t);
  Vector out(r.begin(), r.end());
  gemv_t_add(-1.0, prob_.A, s, out);
  factors_.chol_D().solve_in_place(out);
  scale(beta_, out);
  return out;
}

// beta D^{-1} [r - A^T (beta^{-1} I + A D^{-1} A^T)^{-1} A D^{-1} r]
Vector AdmmOperator::solve_x_woodbury(std::span<const double> r) const {
  const Vector t = factors_.solve_D(r);
  Vector s = prob_.A * t;
  woodbury_chol_->solve_in_place(s);
  Vector out(r.begin(), r.end());
  gemv_t_add(-1.0, prob_.A, s, out);
  factors_.chol_D().solve_in_place(out);
  scale(beta_, out);
  return out;
}

void AdmmOperator::apply(std::span<const double> in, std::span<double> out) const {
  const std::size_t n = prob_.n(), l = prob_.l(), m = prob_.m();
  const auto z = in.subspan(n, l);
  const auto y = in.subspan(n + l, m);
  const Matrix& A = prob_.A;
  const Matrix& B = prob_.B;

  // w = d - B z - y
  Vector w(prob_.d);
  gemv_add(-1.0, B, z, w);
  axpy(-1.0, y, w);
  Vector rx = mul_t(A, w);
  axpy(-1.0 / beta_, prob_.c, rx);
  const Vector x = solve_x(rx);

  // w = d - A x - y
  Vector ax = A * x;
  w = prob_.d;
  axpy(-1.0, ax, w);
  axpy(-1.0, y, w);
  Vector z_new = mul_t(B, w);
  axpy(-1.0 / beta_, prob_.p, z_new);
  factors_.chol_BtB().solve_in_place(z_new);

  // y + A x + B z - d
  auto y_out = out.subspan(n + l, m);
  gemv(B, z_new, y_out);
  for (std::size_t i = 0; i < m; ++i) y_out[i] += y[i] + ax[i] - prob_.d[i];
  std::copy(x.begin(), x.end(), out.begin());
  std::copy(z_new.begin(), z_new.end(), out.begin() + n);
}

Vector AdmmOperator::to_saddle(std::span<const double> u) const {
  Vector w(u.begin(), u.end());
  for (std::size_t i = prob_.n() + prob_.l(); i < w.size(); ++i) w[i] *= beta_;
  return w;
}

Vector AdmmOperator::from_saddle(std::span<const double> w) const {
  Vector u(w.begin(), w.end());
  for (std::size_t i = prob_.n() + prob_.l(); i < u.size(); ++i) u[i] /= beta_;
  return u;
}

double AdmmOperator::saddle_residual(std::span<const double> u) const {
  return saddle_relative_residual(prob_, to_saddle(u));
}

double residual_metric(const FixedPointMap& op, std::span<const double> u) {
  return norm2(sub(u, op.apply(u)));
}

namespace {

// Shared loop for plain and over-relaxed iteration. Each step costs one
// application of T: T(u) computed for the M-metric is reused by the update.
std::pair<Vector, SolveReport> relaxed_iteration(const FixedPointMap& op,
                                                 std::span<const double> u0,
                                                 double omega, double tol,
                                                 std::size_t max_iters) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (u0.size() != op.dim()) throw std::invalid_argument("u0 has the wrong length");
  SolveReport rep;
  rep.metric = "saddle relative residual";
  Vector u(u0.begin(), u0.end());
  Vector tu = op.apply(u);
  rep.residual_history.push_back(op.saddle_residual(u));
  rep.mmetric_history.push_back(norm2(sub(u, tu)));
  if (rep.residual_history.back() <= tol) {
    rep.status = SolveStatus::converged;
    return {std::move(u), std::move(rep)};
  }
  for (std::size_t k = 1; k <= max_iters; ++k) {
    const double w = k <= 2 ? 1.0 : omega;
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = (1.0 - w) * u[i] + w * tu[i];
    op.apply(u, tu);
    const double res = op.saddle_residual(u);
    rep.iterations = k;
    rep.residual_history.push_back(res);
    rep.mmetric_history.push_back(norm2(sub(u, tu)));
    if (!std::isfinite(res)) {
      rep.status = SolveStatus::failed;
      rep.message = "non-finite residual at iteration " + std::to_string(k);
      return {std::move(u), std::move(rep)};
    }
    if (res <= tol) {
      rep.status = SolveStatus::converged;
      return {std::move(u), std::move(rep)};
    }
  }
  rep.status = SolveStatus::max_iters;
  return {std::move(u), std::move(rep)};
}

}  // namespace

std::pair<Vector, SolveReport> solve_admm(const FixedPointMap& op,
                                          std::span<const double> u0, double tol,
                                          std::size_t max_iters) {
  return relaxed_iteration(op, u0, 1.0, tol, max_iters);
}

std::pair<Vector, SolveReport> solve_sor(const FixedPointMap& op,
                                         std::span<const double> u0, double omega,
                                         double tol, std::size_t max_iters) {
  if (!(omega > 0.0 && omega <= 2.0)) throw std::invalid_argument("omega must lie in (0, 2]");
  return relaxed_iteration(op, u0, omega, tol, max_iters);
}

double optimal_beta(const SpectralConstants& sc) { return std::sqrt(sc.mu * sc.L); }

double gamma_of(const SpectralConstants& sc, double beta) {
  return std::max(sc.L / beta, beta / sc.mu);
}

}  // namespace admmgmres
