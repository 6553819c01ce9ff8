#include "test_support.hpp"

#include <cmath>

#include "admmgmres/linalg/norms.hpp"

namespace testing_support {

using namespace admmgmres::linalg;

Matrix random_spd(std::size_t n, double cond, Rng& rng) {
  Matrix q = haar_orthogonal(n, rng);
  Matrix scaled = q;
  const double half = 0.5 * std::log(cond);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = n == 1 ? 0.0 : static_cast<double>(j) / (n - 1);
    const double e = std::exp(-half + 2.0 * half * t);
    for (std::size_t i = 0; i < n; ++i) scaled(i, j) *= e;
  }
  return symmetrized(mul_nt(scaled, q));
}

Matrix random_full_rank(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m = rng.gaussian_matrix(rows, cols);
  for (std::size_t i = 0; i < std::min(rows, cols); ++i) m(i, i) += 3.0;
  return m;
}

double frob_diff(const Matrix& a, const Matrix& b) { return frobenius_norm(a - b); }

double orthogonality_error(const Matrix& q) {
  Matrix g = mul_tn(q, q);
  g -= Matrix::identity(q.cols());
  return max_abs(std::span<const double>(g.values()));
}

}  // namespace testing_support

#include "admmgmres/linalg/decompositions.hpp"

namespace testing_support {

admmgmres::EcqpProblem small_problem(Rng& rng, std::size_t max_n, double s_max) {
  const std::size_t n = 1 + rng.uniform_int(0, max_n - 1);
  const std::size_t m = 1 + rng.uniform_int(0, n - 1);
  const std::size_t l = 1 + rng.uniform_int(0, m - 1);
  const double s = rng.uniform(0.0, s_max);
  return admmgmres::random_problem(n, m, l, s, rng.next_u64());
}

DenseSplitting dense_splitting(const admmgmres::EcqpProblem& prob, double beta) {
  const auto k = admmgmres::assemble_kkt(prob, beta);
  Lu lu(k.M);
  return {lu.solve(k.N), lu.solve(k.v)};
}

Vector fixed_point_dense(const admmgmres::EcqpProblem& prob, double beta) {
  Vector w = admmgmres::solve_saddle_dense(prob);
  for (std::size_t i = prob.n() + prob.l(); i < w.size(); ++i) w[i] /= beta;
  return w;
}

}  // namespace testing_support
