#include "admmgmres/problem.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>

#include "admmgmres/linalg/matrix_io.hpp"

namespace admmgmres {

using namespace linalg;

void EcqpProblem::check_dimensions() const {
  const std::size_t nn = n(), mm = m(), ll = l();
  if (!D.is_square()) throw ProblemError("D must be square");
  if (A.cols() != nn) throw ProblemError("A must have n columns");
  if (B.rows() != mm) throw ProblemError("B must have m rows");
  if (c.size() != nn || p.size() != ll || d.size() != mm)
    throw ProblemError("right-hand side lengths must be (n, l, m)");
  if (nn == 0 || mm == 0 || ll == 0) throw ProblemError("empty dimension");
  if (!all_finite(D) || !all_finite(A) || !all_finite(B) || !all_finite(c) ||
      !all_finite(p) || !all_finite(d))
    throw ProblemError("problem data contains non-finite entries");
}

namespace {

struct DtildeEig {
  Matrix v;       // eigenvectors, columns matched to lambda
  Vector lambda;  // eigenvalues of Dtilde, ascending
};

Cholesky factor_D(const EcqpProblem& prob) {
  try {
    return Cholesky(prob.D);
  } catch (const NotPositiveDefinite& e) {
    throw ProblemError(std::string("D not positive definite: ") + e.what());
  } catch (const NotSymmetric& e) {
    throw ProblemError(std::string("D not symmetric: ") + e.what());
  }
}

// Eigenpairs of A D^{-1} A^T = F F^T with F = A L_D^{-T}, inverted.
DtildeEig dtilde_eig(const EcqpProblem& prob, const Cholesky& chol_d) {
  const std::size_t m = prob.m(), n = prob.n();
  Matrix f = prob.A;
  for (std::size_t i = 0; i < m; ++i) chol_d.solve_lower_in_place(f.row(i));
  const auto eig = sym_eig(mul_nt(f, f));
  const double top = eig.values.back();
  const double floor = static_cast<double>(std::max(n, m)) *
                       std::numeric_limits<double>::epsilon() * top;
  if (!(top > 0.0) || eig.values.front() <= floor)
    throw ProblemError("A not full row rank");
  DtildeEig out{Matrix(m, m), Vector(m)};
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t src = m - 1 - j;
    out.lambda[j] = 1.0 / eig.values[src];
    for (std::size_t i = 0; i < m; ++i) out.v(i, j) = eig.vectors(i, src);
  }
  return out;
}

SpectralConstants constants_from(const Vector& lambda) {
  SpectralConstants sc;
  sc.mu = lambda.front();
  sc.L = lambda.back();
  sc.kappa = sc.L / sc.mu;
  sc.dtilde_eigs = lambda;
  return sc;
}

Cholesky factor_BtB(const EcqpProblem& prob) {
  try {
    return Cholesky(mul_tn(prob.B, prob.B));
  } catch (const LinalgError&) {
    throw ProblemError("B not full column rank");
  }
}

}  // namespace

ProblemFactors::ProblemFactors(const EcqpProblem& prob)
    : chol_d_((prob.check_dimensions(), factor_D(prob))), chol_btb_(factor_BtB(prob)) {
  auto eig = dtilde_eig(prob, chol_d_);
  v_ = std::move(eig.v);
  lambda_ = std::move(eig.lambda);
  constants_ = constants_from(lambda_);
}

Vector ProblemFactors::apply_spectral(std::span<const double> w,
                                      std::span<const double> x) const {
  Vector t = mul_t(v_, x);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] *= w[i];
  return v_ * t;
}

Vector ProblemFactors::apply_dtilde(std::span<const double> x) const {
  return apply_spectral(lambda_, x);
}

Vector ProblemFactors::apply_schur(std::span<const double> x) const {
  Vector w(lambda_.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 1.0 / lambda_[i];
  return apply_spectral(w, x);
}

SpectralConstants spectral_constants(const EcqpProblem& prob) {
  prob.check_dimensions();
  return constants_from(dtilde_eig(prob, factor_D(prob)).lambda);
}

EcqpProblem random_problem(std::size_t n, std::size_t m, std::size_t l, double s,
                           std::uint64_t seed) {
  if (!(1 <= l && l <= m && m <= n))
    throw ProblemError("random_problem requires 1 <= l <= m <= n");
  if (!(s >= 0.0) || !std::isfinite(s)) throw ProblemError("s must be finite and >= 0");
  Rng rng(seed);
  const Matrix ua = haar_orthogonal(m, rng);
  const Matrix ub = haar_orthogonal(m, rng);
  const Matrix ud = haar_orthogonal(n, rng);
  const Matrix va = haar_orthogonal(n, rng);
  const Matrix vb = haar_orthogonal(l, rng);
  Vector sa(m), sb(l), sd(n);
  for (auto& x : sa) x = rng.lognormal(s);
  for (auto& x : sb) x = rng.lognormal(s);
  for (auto& x : sd) x = rng.lognormal(s);

  // U diag(sigma) V(:, 0:k)^T, scaling U's columns first.
  auto compose = [](const Matrix& u, const Vector& sigma, const Matrix& v) {
    const std::size_t k = sigma.size();
    Matrix us = u.block(0, 0, u.rows(), k);
    for (std::size_t i = 0; i < us.rows(); ++i)
      for (std::size_t j = 0; j < k; ++j) us(i, j) *= sigma[j];
    return mul_nt(us, v.block(0, 0, v.rows(), k));
  };

  EcqpProblem prob;
  prob.A = compose(ua, sa, va);
  prob.B = compose(ub, sb, vb);
  prob.D = symmetrized(compose(ud, sd, ud));
  prob.c = rng.gaussian_vector(n);
  prob.p = rng.gaussian_vector(l);
  prob.d = rng.gaussian_vector(m);
  return prob;
}

InstanceParams sample_instance(std::size_t n, double s_min, double s_max,
                               std::uint64_t base_seed, std::uint64_t index) {
  if (n == 0) throw ProblemError("n must be positive");
  if (!(0.0 <= s_min && s_min <= s_max)) throw ProblemError("need 0 <= s_min <= s_max");
  Rng rng(derive_seed(base_seed, index));
  InstanceParams ip;
  ip.n = n;
  ip.m = rng.uniform_int(1, n);
  ip.l = rng.uniform_int(1, ip.m);
  ip.s = rng.uniform(s_min, s_max);
  ip.seed = rng.next_u64();
  return ip;
}

EcqpProblem worst_case_problem(std::size_t m, double kappa, std::uint64_t seed) {
  if (m == 0 || m % 2 != 0) throw ProblemError("worst_case_problem requires even m");
  if (!(kappa > 1.0) || !std::isfinite(kappa)) throw ProblemError("kappa must exceed 1");
  const std::size_t h = m / 2;
  EcqpProblem prob;
  prob.A = Matrix::identity(m);
  prob.D = Matrix(m, m);
  for (std::size_t i = 0; i < m; ++i)
    prob.D(i, i) = i < h ? 1.0 / std::sqrt(kappa) : std::sqrt(kappa);
  prob.B = Matrix(m, h);
  for (std::size_t j = 0; j < h; ++j) {
    const double theta = std::numbers::pi / (2.0 * m) * static_cast<double>(2 * j + 1);
    prob.B(j, j) = std::cos(theta);
    prob.B(h + j, j) = std::sin(theta);
  }
  Rng rng(seed);
  prob.c = rng.gaussian_vector(m);
  prob.p = rng.gaussian_vector(h);
  prob.d = rng.gaussian_vector(m);
  return prob;
}

KktSystem assemble_kkt(const EcqpProblem& prob, double beta) {
  if (!(beta > 0.0)) throw ProblemError("beta must be positive");
  prob.check_dimensions();
  const std::size_t n = prob.n(), l = prob.l(), m = prob.m(), N = n + l + m;
  const Matrix& A = prob.A;
  const Matrix& B = prob.B;
  const Matrix At = A.transpose();
  const Matrix Bt = B.transpose();
  const Matrix AtA = mul_tn(A, A);
  const Matrix AtB = mul_tn(A, B);
  const Matrix BtA = mul_tn(B, A);
  const Matrix BtB = mul_tn(B, B);
  const Matrix x_block = prob.D * (1.0 / beta) + AtA;
  const Matrix I_m = Matrix::identity(m);

  KktSystem k;
  k.H = Matrix(N, N);
  k.H.set_block(0, 0, x_block);
  k.H.set_block(0, n, AtB);
  k.H.set_block(0, n + l, At);
  k.H.set_block(n, 0, BtA);
  k.H.set_block(n, n, BtB);
  k.H.set_block(n, n + l, Bt);
  k.H.set_block(n + l, 0, A);
  k.H.set_block(n + l, n, B);

  k.M = Matrix(N, N);
  k.M.set_block(0, 0, x_block);
  k.M.set_block(n, 0, BtA);
  k.M.set_block(n, n, BtB);
  k.M.set_block(n + l, 0, A);
  k.M.set_block(n + l, n, B);
  k.M.set_block(n + l, n + l, I_m * -1.0);

  k.N = Matrix(N, N);
  k.N.set_block(0, n, AtB * -1.0);
  k.N.set_block(0, n + l, At * -1.0);
  k.N.set_block(n, n + l, Bt * -1.0);
  k.N.set_block(n + l, n + l, I_m * -1.0);

  k.v.assign(N, 0.0);
  const Vector atd = mul_t(A, prob.d);
  const Vector btd = mul_t(B, prob.d);
  for (std::size_t i = 0; i < n; ++i) k.v[i] = atd[i] - prob.c[i] / beta;
  for (std::size_t i = 0; i < l; ++i) k.v[n + i] = btd[i] - prob.p[i] / beta;
  for (std::size_t i = 0; i < m; ++i) k.v[n + l + i] = prob.d[i];

  k.saddle = Matrix(N, N);
  k.saddle.set_block(0, 0, prob.D);
  k.saddle.set_block(0, n + l, At);
  k.saddle.set_block(n, n + l, Bt);
  k.saddle.set_block(n + l, 0, A);
  k.saddle.set_block(n + l, n, B);
  k.saddle_rhs.assign(N, 0.0);
  for (std::size_t i = 0; i < n; ++i) k.saddle_rhs[i] = -prob.c[i];
  for (std::size_t i = 0; i < l; ++i) k.saddle_rhs[n + i] = -prob.p[i];
  for (std::size_t i = 0; i < m; ++i) k.saddle_rhs[n + l + i] = prob.d[i];
  return k;
}

Vector solve_saddle_dense(const EcqpProblem& prob) {
  const KktSystem k = assemble_kkt(prob, 1.0);
  return lu_solve(k.saddle, k.saddle_rhs);
}

double saddle_relative_residual(const EcqpProblem& prob, std::span<const double> w) {
  const std::size_t n = prob.n(), l = prob.l(), m = prob.m();
  if (w.size() != n + l + m) throw ProblemError("saddle residual: wrong iterate length");
  const auto x = w.subspan(0, n);
  const auto z = w.subspan(n, l);
  const auto y = w.subspan(n + l, m);
  Vector r(n + l + m);
  std::span<double> r1(r.data(), n), r2(r.data() + n, l), r3(r.data() + n + l, m);
  gemv(prob.D, x, r1);
  gemv_t_add(1.0, prob.A, y, r1);
  axpy(1.0, prob.c, r1);
  gemv_t(prob.B, y, r2);
  axpy(1.0, prob.p, r2);
  gemv(prob.A, x, r3);
  gemv_add(1.0, prob.B, z, r3);
  axpy(-1.0, prob.d, r3);
  const double rhs = std::hypot(norm2(prob.c), norm2(prob.p), norm2(prob.d));
  const double res = norm2(r);
  return rhs > 0.0 ? res / rhs : res;
}

void write_problem(std::ostream& os, const EcqpProblem& prob) {
  prob.check_dimensions();
  os << prob.n() << ' ' << prob.m() << ' ' << prob.l() << '\n';
  write_matrix(os, prob.D);
  write_matrix(os, prob.A);
  write_matrix(os, prob.B);
  write_vector(os, prob.c);
  write_vector(os, prob.p);
  write_vector(os, prob.d);
}

EcqpProblem read_problem(std::istream& is) {
  std::size_t n = 0, m = 0, l = 0;
  if (!(is >> n >> m >> l)) throw ProblemError("problem header: expected 'n m l'");
  EcqpProblem prob;
  try {
    prob.D = read_matrix(is);
    prob.A = read_matrix(is);
    prob.B = read_matrix(is);
    prob.c = read_vector(is);
    prob.p = read_vector(is);
    prob.d = read_vector(is);
  } catch (const LinalgError& e) {
    throw ProblemError(std::string("problem body: ") + e.what());
  }
  prob.check_dimensions();
  if (prob.n() != n || prob.m() != m || prob.l() != l)
    throw ProblemError("problem blocks do not match header dimensions");
  return prob;
}

void save_problem(const std::string& path, const EcqpProblem& prob) {
  std::ofstream os(path);
  if (!os) throw ProblemError("cannot open '" + path + "' for writing");
  write_problem(os, prob);
  if (!os) throw ProblemError("write to '" + path + "' failed");
}

EcqpProblem load_problem(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ProblemError("cannot open '" + path + "'");
  return read_problem(is);
}

}  // namespace admmgmres
