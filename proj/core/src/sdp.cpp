#include "admmgmres/sdp.hpp"

#include <cmath>
#include <numbers>

#include "admmgmres/linalg/decompositions.hpp"
#include "admmgmres/linalg/random.hpp"

namespace admmgmres {

using namespace linalg;

Vector svec(const Matrix& s) {
  const Matrix sym = checked_symmetric(s);
  const std::size_t n = sym.rows();
  Vector v;
  v.reserve(svec_dim(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j; i < n; ++i)
      v.push_back(i == j ? sym(i, j) : std::numbers::sqrt2 * sym(i, j));
  return v;
}

Matrix smat(std::span<const double> v) {
  std::size_t n = 0;
  while (svec_dim(n) < v.size()) ++n;
  if (svec_dim(n) != v.size()) throw DimensionError("smat: length is not n(n+1)/2");
  Matrix s(n, n);
  std::size_t k = 0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j; i < n; ++i, ++k) {
      const double e = i == j ? v[k] : v[k] / std::numbers::sqrt2;
      s(i, j) = e;
      s(j, i) = e;
    }
  return s;
}

void SdpNewtonProblem::check_dimensions() const {
  if (!W.is_square()) throw ProblemError("W must be square");
  if (Amat.rows() != ns()) throw ProblemError("Amat must have n(n+1)/2 rows");
  if (x_hat.size() != ns() || c_hat.size() != ns()) throw ProblemError("xhat, chat must have n(n+1)/2 entries");
  if (b_hat.size() != m()) throw ProblemError("bhat must have m entries");
}

Vector apply_sym_kron(const Matrix& W, std::span<const double> s) {
  return svec(symmetrized(W * smat(s) * W));
}

Matrix sym_kron_dense(const Matrix& W) {
  const std::size_t ns = svec_dim(W.rows());
  Matrix out(ns, ns);
  Vector e(ns, 0.0);
  for (std::size_t k = 0; k < ns; ++k) {
    e[k] = 1.0;
    out.set_column(k, apply_sym_kron(W, e));
    e[k] = 0.0;
  }
  return symmetrized(out);
}

Matrix kron_solve(const SymmetricEigenPairs& w_eig, double beta, const Matrix& C) {
  const Matrix& V = w_eig.vectors;
  const Vector& lam = w_eig.values;
  Matrix t = mul_tn(V, C * V);
  const std::size_t n = t.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) t(i, j) *= beta / (lam[i] * lam[j] + beta);
  return symmetrized(mul_nt(V * t, V));
}

EcqpProblem to_ecqp(const SdpNewtonProblem& prob) {
  prob.check_dimensions();
  EcqpProblem e;
  e.D = sym_kron_dense(prob.W);
  e.A = Matrix::identity(prob.ns());
  e.B = prob.Amat;
  e.c = prob.x_hat;
  scale(-1.0, e.c);
  e.p = prob.b_hat;
  scale(-1.0, e.p);
  e.d = prob.c_hat;
  return e;
}

SdpAdmmOperator::SdpAdmmOperator(SdpNewtonProblem prob, double beta)
    : prob_(std::move(prob)),
      w_eig_(sym_eig(prob_.W)),
      chol_ata_(mul_tn(prob_.Amat, prob_.Amat)),
      beta_(beta) {
  prob_.check_dimensions();
  if (!(beta_ > 0.0) || !std::isfinite(beta_)) throw ProblemError("beta must be positive");
  if (!(w_eig_.values.front() > 0.0)) throw ProblemError("W not positive definite");
}

namespace {

double default_beta(const Matrix& W) {
  const auto e = sym_eig(W);
  return e.values.front() * e.values.back();
}

}  // namespace

SdpAdmmOperator::SdpAdmmOperator(SdpNewtonProblem prob)
    : SdpAdmmOperator(prob, default_beta(prob.W)) {}

double SdpAdmmOperator::kappa() const noexcept {
  const double c = w_eig_.values.back() / w_eig_.values.front();
  return c * c;
}

Vector SdpAdmmOperator::pack(const SdpAdmmState& st) const {
  Vector u;
  u.reserve(dim());
  u.insert(u.end(), st.s.begin(), st.s.end());
  u.insert(u.end(), st.y.begin(), st.y.end());
  u.insert(u.end(), st.xt.begin(), st.xt.end());
  return u;
}

SdpAdmmState SdpAdmmOperator::unpack(std::span<const double> u) const {
  const std::size_t ns = prob_.ns(), m = prob_.m();
  if (u.size() != dim()) throw DimensionError("SDP iterate has wrong length");
  return {Vector(u.begin(), u.begin() + ns), Vector(u.begin() + ns, u.begin() + ns + m),
          Vector(u.begin() + ns + m, u.end())};
}

SdpAdmmState SdpAdmmOperator::step(const SdpAdmmState& st) const {
  const auto& A = prob_.Amat;
  const std::size_t ns = prob_.ns();
  SdpAdmmState next;
  // s-update
  Vector r = prob_.c_hat;
  axpy(1.0 / beta_, prob_.x_hat, r);
  gemv_add(-1.0, A, st.y, r);
  axpy(-1.0, st.xt, r);
  next.s = svec(kron_solve(w_eig_, beta_, smat(r)));
  // y-update
  Vector t = next.s;
  axpy(1.0, st.xt, t);
  axpy(-1.0, prob_.c_hat, t);
  next.y = prob_.b_hat;
  scale(1.0 / beta_, next.y);
  gemv_t_add(-1.0, A, t, next.y);
  chol_ata_.solve_in_place(next.y);
  // xt-update
  next.xt = st.xt;
  Vector ay = A * next.y;
  for (std::size_t i = 0; i < ns; ++i) next.xt[i] += next.s[i] + ay[i] - prob_.c_hat[i];
  return next;
}

void SdpAdmmOperator::apply(std::span<const double> in, std::span<double> out) const {
  const Vector u = pack(step(unpack(in)));
  std::copy(u.begin(), u.end(), out.begin());
}

double SdpAdmmOperator::saddle_residual(std::span<const double> u) const {
  const auto st = unpack(u);
  const auto& A = prob_.Amat;
  // Stationarity with multiplier x = beta xt:
  //   (W (x) W) s + x - xhat = 0,  Amat^T x - bhat = 0,  s + Amat y - chat = 0
  Vector r1 = apply_sym_kron(prob_.W, st.s);
  axpy(beta_, st.xt, r1);
  axpy(-1.0, prob_.x_hat, r1);
  Vector r2 = mul_t(A, st.xt);
  scale(beta_, r2);
  axpy(-1.0, prob_.b_hat, r2);
  Vector r3 = A * st.y;
  axpy(1.0, st.s, r3);
  axpy(-1.0, prob_.c_hat, r3);
  const double res = std::hypot(norm2(r1), norm2(r2), norm2(r3));
  const double rhs = std::hypot(norm2(prob_.x_hat), norm2(prob_.b_hat), norm2(prob_.c_hat));
  return rhs > 0.0 ? res / rhs : res;
}

SdpNewtonProblem synthetic_newton(std::size_t n, std::size_t m, double kappa,
                                  std::uint64_t seed) {
  if (n == 0) throw ProblemError("synthetic_newton requires n >= 1");
  if (m == 0 || m > svec_dim(n)) throw ProblemError("synthetic_newton requires 1 <= m <= n(n+1)/2");
  if (!(kappa >= 1.0) || !std::isfinite(kappa)) throw ProblemError("kappa must be >= 1");
  if (n == 1 && kappa != 1.0) throw ProblemError("n = 1 only admits kappa = 1");
  Rng rng(seed);
  SdpNewtonProblem prob;
  const Matrix V = haar_orthogonal(n, rng);
  const double lo = -0.25 * std::log(kappa);
  Matrix scaled = V;
  for (std::size_t j = 0; j < n; ++j) {
    const double t = n == 1 ? 0.5 : static_cast<double>(j) / static_cast<double>(n - 1);
    const double lam = std::exp(lo * (1.0 - 2.0 * t));
    for (std::size_t i = 0; i < n; ++i) scaled(i, j) *= lam;
  }
  prob.W = symmetrized(mul_nt(scaled, V));
  Matrix raw(svec_dim(n), m);
  for (std::size_t k = 0; k < m; ++k) {
    const Matrix g = rng.gaussian_matrix(n, n);
    raw.set_column(k, svec(symmetrized(g)));
  }
  prob.Amat = qr(raw, true).leading(m);
  prob.x_hat = rng.gaussian_vector(svec_dim(n));
  prob.b_hat = rng.gaussian_vector(m);
  prob.c_hat = rng.gaussian_vector(svec_dim(n));
  return prob;
}

}  // namespace admmgmres
