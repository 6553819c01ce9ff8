#include "admmgmres/precond.hpp"

#include <cmath>

namespace admmgmres {

using namespace linalg;

SaddleReduction::SaddleReduction(EcqpProblem prob)
    : prob_(std::move(prob)), factors_(prob_) {
  d_prime_ = prob_.A * factors_.solve_D(prob_.c);
  axpy(1.0, prob_.d, d_prime_);
}

SaddleReduction::Forward SaddleReduction::forward_substitute() const {
  Vector p_prime = prob_.p;
  gemv_t_add(-1.0, prob_.B, factors_.apply_dtilde(d_prime_), p_prime);
  return {d_prime_, std::move(p_prime)};
}

Vector SaddleReduction::recover_x(std::span<const double> y) const {
  Vector x = mul_t(prob_.A, y);
  axpy(1.0, prob_.c, x);
  factors_.chol_D().solve_in_place(x);
  scale(-1.0, x);
  return x;
}

SaddleReduction::Back SaddleReduction::back_substitute(std::span<const double> z) const {
  Vector bz = prob_.B * z;
  axpy(-1.0, d_prime_, bz);
  Vector y = factors_.apply_dtilde(bz);
  Vector x = recover_x(y);
  return {std::move(y), std::move(x)};
}

Vector SaddleReduction::expand_reduced(std::span<const double> zy) const {
  const std::size_t n = prob_.n(), l = prob_.l(), m = prob_.m();
  const auto z = zy.subspan(0, l);
  const auto y = zy.subspan(l, m);
  const Vector x = recover_x(y);
  Vector w(n + l + m);
  std::copy(x.begin(), x.end(), w.begin());
  std::copy(z.begin(), z.end(), w.begin() + n);
  std::copy(y.begin(), y.end(), w.begin() + n + l);
  return w;
}

Vector SaddleReduction::expand_schur(std::span<const double> z) const {
  const std::size_t n = prob_.n(), l = prob_.l();
  const auto [y, x] = back_substitute(z);
  Vector w(n + l + prob_.m());
  std::copy(x.begin(), x.end(), w.begin());
  std::copy(z.begin(), z.end(), w.begin() + n);
  std::copy(y.begin(), y.end(), w.begin() + n + l);
  return w;
}

Vector SaddleReduction::reduced_rhs() const {
  Vector r(reduced_dim());
  for (std::size_t i = 0; i < prob_.l(); ++i) r[i] = -prob_.p[i];
  std::copy(d_prime_.begin(), d_prime_.end(), r.begin() + prob_.l());
  return r;
}

Vector SaddleReduction::schur_rhs() const {
  Vector r = forward_substitute().p_prime;
  scale(-1.0, r);
  return r;
}

void ReducedOperator::apply(std::span<const double> in, std::span<double> out) const {
  const auto& prob = red_.problem();
  const std::size_t l = prob.l(), m = prob.m();
  const auto z = in.subspan(0, l);
  const auto y = in.subspan(l, m);
  gemv_t(prob.B, y, out.subspan(0, l));
  auto out_y = out.subspan(l, m);
  const Vector sy = red_.factors().apply_schur(y);
  gemv(prob.B, z, out_y);
  axpy(-1.0, sy, out_y);
}

void SchurOperator::apply(std::span<const double> in, std::span<double> out) const {
  const auto& prob = red_.problem();
  const Vector t = red_.factors().apply_dtilde(prob.B * in);
  gemv_t(prob.B, t, out);
}

namespace {

double positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::invalid_argument(std::string(what) + " must be positive");
  return v;
}

}  // namespace

BlockDiagonalPreconditioner::BlockDiagonalPreconditioner(const SaddleReduction& red,
                                                         double beta)
    : red_(red), beta_(positive(beta, "Blk-Diag beta")) {}

void BlockDiagonalPreconditioner::apply(std::span<const double> in,
                                        std::span<double> out) const {
  const std::size_t l = red_.problem().l(), m = red_.problem().m();
  Vector z = red_.factors().solve_BtB(in.subspan(0, l));
  const Vector y = red_.factors().apply_dtilde(in.subspan(l, m));
  for (std::size_t i = 0; i < l; ++i) out[i] = z[i] / beta_;
  std::copy(y.begin(), y.end(), out.begin() + l);
}

ConstraintPreconditioner::ConstraintPreconditioner(const SaddleReduction& red, double beta)
    : red_(red), beta_(positive(beta, "Constr I beta")) {}

void ConstraintPreconditioner::apply(std::span<const double> in,
                                     std::span<double> out) const {
  const auto& B = red_.problem().B;
  const std::size_t l = B.cols(), m = B.rows();
  const auto r1 = in.subspan(0, l);
  const auto r2 = in.subspan(l, m);
  // Inverse lower factor: w1 = r1 + B^T r2 / beta, w2 = r2.
  Vector w1(r1.begin(), r1.end());
  gemv_t_add(1.0 / beta_, B, r2, w1);
  // Inverse block diagonal: v1 = beta (B^T B)^{-1} w1, v2 = -r2 / beta.
  red_.factors().chol_BtB().solve_in_place(w1);
  scale(beta_, w1);
  // Inverse upper factor: x1 = v1, x2 = v2 + B x1 / beta.
  auto x2 = out.subspan(l, m);
  gemv(B, w1, x2);
  for (std::size_t i = 0; i < m; ++i) x2[i] = (x2[i] - r2[i]) / beta_;
  std::copy(w1.begin(), w1.end(), out.begin());
}

void SchurPreconditioner::apply(std::span<const double> in, std::span<double> out) const {
  const Vector z = red_.factors().solve_BtB(in);
  std::copy(z.begin(), z.end(), out.begin());
}

namespace {

Matrix shifted_gram(const Matrix& b, double alpha) {
  Matrix g = mul_tn(b, b);
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) += alpha * alpha;
  return g;
}

}  // namespace

HssPreconditioner::HssPreconditioner(const SaddleReduction& red, double alpha)
    : red_(red),
      alpha_(positive(alpha, "HSS alpha")),
      chol_(shifted_gram(red.problem().B, alpha_)) {
  const Vector& lambda = red_.factors().lambda();
  shifted_weights_.resize(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i)
    shifted_weights_[i] = 1.0 / (1.0 / lambda[i] + alpha_);
}

void HssPreconditioner::apply(std::span<const double> in, std::span<double> out) const {
  const auto& B = red_.problem().B;
  const std::size_t l = B.cols(), m = B.rows();
  // u = diag(alpha I, -(S + alpha I))^{-1} r
  Vector u1(in.begin(), in.begin() + l);
  scale(1.0 / alpha_, u1);
  Vector u2 = red_.factors().apply_spectral(shifted_weights_, in.subspan(l, m));
  scale(-1.0, u2);
  // [alpha I  B^T; -B  alpha I] [x1; x2] = [u1; u2]
  Vector x1 = u1;
  scale(alpha_, x1);
  gemv_t_add(-1.0, B, u2, x1);
  chol_.solve_in_place(x1);
  auto x2 = out.subspan(l, m);
  gemv(B, x1, x2);
  for (std::size_t i = 0; i < m; ++i) x2[i] = (x2[i] + u2[i]) / alpha_;
  std::copy(x1.begin(), x1.end(), out.begin());
}

std::string_view to_string(SaddleMethod m) {
  switch (m) {
    case SaddleMethod::blkdiag: return "blkdiag";
    case SaddleMethod::constr1: return "constr1";
    case SaddleMethod::constr2: return "constr2";
    case SaddleMethod::hss: return "hss";
  }
  return "unknown";
}

std::optional<SaddleMethod> parse_saddle_method(std::string_view name) {
  for (auto m : {SaddleMethod::blkdiag, SaddleMethod::constr1, SaddleMethod::constr2,
                 SaddleMethod::hss})
    if (name == to_string(m)) return m;
  return std::nullopt;
}

std::pair<Vector, SolveReport> solve_preconditioned(const SaddleReduction& red,
                                                    SaddleMethod method,
                                                    const KrylovConfig& cfg,
                                                    const PrecondParams& params) {
  const auto& sc = red.factors().constants();
  const EcqpProblem& prob = red.problem();
  KrylovOptions opts;
  opts.monitor_name = "saddle relative residual";

  if (method == SaddleMethod::constr2) {
    const SchurOperator op(red);
    const SchurPreconditioner pre(red);
    opts.preconditioner = &pre;
    opts.monitor = [&](std::span<const double> z) {
      return saddle_relative_residual(prob, red.expand_schur(z));
    };
    auto [z, rep] = conjugate_residuals(op, red.schur_rhs(), cfg, opts);
    return {red.expand_schur(z), std::move(rep)};
  }

  const ReducedOperator op(red);
  const Vector rhs = red.reduced_rhs();
  opts.monitor = [&](std::span<const double> zy) {
    return saddle_relative_residual(prob, red.expand_reduced(zy));
  };
  std::pair<Vector, SolveReport> out;
  switch (method) {
    case SaddleMethod::blkdiag: {
      const BlockDiagonalPreconditioner pre(red, params.blkdiag_beta.value_or(sc.L));
      opts.preconditioner = &pre;
      out = minres(op, rhs, cfg, opts);
      break;
    }
    case SaddleMethod::constr1: {
      const ConstraintPreconditioner pre(red,
                                         params.constr1_beta.value_or(std::sqrt(sc.mu * sc.L)));
      opts.preconditioner = &pre;
      out = gmres(op, rhs, cfg, opts);
      break;
    }
    case SaddleMethod::hss: {
      const HssPreconditioner pre(red, params.hss_alpha.value_or(1.0 / sc.L));
      opts.preconditioner = &pre;
      out = gmres(op, rhs, cfg, opts);
      break;
    }
    case SaddleMethod::constr2:
      break;
  }
  out.first = red.expand_reduced(out.first);
  return out;
}

}  // namespace admmgmres
