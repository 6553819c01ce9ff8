#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "admmgmres/linalg/decompositions.hpp"
#include "admmgmres/linalg/eigen.hpp"
#include "admmgmres/precond.hpp"
#include "test_support.hpp"

using namespace admmgmres;
using namespace admmgmres::linalg;
using testing_support::frob_diff;
using testing_support::small_problem;

namespace {

// Dense S = A D^{-1} A^T through an LU inverse of D.
Matrix dense_schur_s(const EcqpProblem& prob) {
  const Matrix dinv = Lu(prob.D).inverse();
  return prob.A * dinv * prob.A.transpose();
}

Matrix dense_reduced(const EcqpProblem& prob) {
  const std::size_t l = prob.l(), m = prob.m();
  const Matrix s = dense_schur_s(prob);
  Matrix k(l + m, l + m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < l; ++j) {
      k(j, l + i) = prob.B(i, j);
      k(l + i, j) = prob.B(i, j);
    }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) k(l + i, l + j) = -s(i, j);
  return k;
}

Matrix block_diag(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() + b.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) out(a.rows() + i, a.cols() + j) = b(i, j);
  return out;
}

double rel_err(std::span<const double> got, std::span<const double> want) {
  return norm2(sub(got, want)) / std::max(norm2(want), 1e-300);
}

// M^{-1} (M r) = r for the dense M.
void expect_inverts(const LinearOperator& inv, const Matrix& m, Rng& rng, double tol) {
  for (int k = 0; k < 3; ++k) {
    const Vector r = rng.gaussian_vector(m.rows());
    EXPECT_LE(rel_err(inv.apply(m * r), r), tol);
  }
}

std::vector<double> sorted_real(const EigenPairs& e) {
  std::vector<double> re;
  for (const auto& v : e.values) re.push_back(v.real());
  std::sort(re.begin(), re.end());
  return re;
}

}  // namespace

TEST(SaddleReduction, ReducedOperatorMatchesDense) {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const SaddleReduction red(small_problem(rng, 25));
    const Matrix want = dense_reduced(red.problem());
    const Matrix got = to_dense(ReducedOperator(red));
    EXPECT_LE(frob_diff(got, want), 1e-9 * (1 + norm_inf(want)));
  }
}

TEST(SaddleReduction, SchurOperatorMatchesDense) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const SaddleReduction red(small_problem(rng, 25));
    const auto& prob = red.problem();
    const Matrix dtilde = Lu(dense_schur_s(prob)).inverse();
    const Matrix want = prob.B.transpose() * dtilde * prob.B;
    const Matrix got = to_dense(SchurOperator(red));
    EXPECT_LE(frob_diff(got, want), 1e-8 * (1 + norm_inf(want)));
  }
}

TEST(SaddleReduction, DenseReducedAndSchurSolvesRecoverSaddleSolution) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const SaddleReduction red(small_problem(rng, 25, 1.0));
    const Vector want = solve_saddle_dense(red.problem());
    const Vector zy = lu_solve(dense_reduced(red.problem()), red.reduced_rhs());
    EXPECT_LE(rel_err(red.expand_reduced(zy), want), 1e-8) << "trial " << trial;
    const Vector z = lu_solve(to_dense(SchurOperator(red)), red.schur_rhs());
    EXPECT_LE(rel_err(red.expand_schur(z), want), 1e-8) << "trial " << trial;
  }
}

TEST(SaddleReduction, ForwardSubstituteHandCase) {
  // n = m = l = 1: D = 2, A = 1, B = 1, c = 4, p = 3, d = 5.
  EcqpProblem prob;
  prob.D = Matrix(1, 1, 2.0);
  prob.A = Matrix(1, 1, 1.0);
  prob.B = Matrix(1, 1, 1.0);
  prob.c = {4.0};
  prob.p = {3.0};
  prob.d = {5.0};
  const SaddleReduction red(prob);
  const auto fw = red.forward_substitute();
  // d' = 5 + 4/2 = 7, Dtilde = 2, p' = 3 - 2 * 7 = -11
  EXPECT_NEAR(fw.d_prime[0], 7.0, 1e-14);
  EXPECT_NEAR(fw.p_prime[0], -11.0, 1e-13);
  // Schur: 2 z = 11 -> z = 5.5; y = 2 (5.5 - 7) = -3; x = -(y + 4)/2 = -0.5
  const auto back = red.back_substitute(std::vector<double>{5.5});
  EXPECT_NEAR(back.y[0], -3.0, 1e-13);
  EXPECT_NEAR(back.x[0], -0.5, 1e-13);
}

TEST(Preconditioners, InvertTheirDenseMatrices) {
  Rng rng(4);
  for (int trial = 0; trial < 15; ++trial) {
    const SaddleReduction red(small_problem(rng, 25, 1.0));
    const auto& prob = red.problem();
    const std::size_t l = prob.l(), m = prob.m();
    const Matrix btb = mul_tn(prob.B, prob.B);
    const Matrix s = dense_schur_s(prob);
    const double beta = std::exp(rng.uniform(-1, 1));

    expect_inverts(BlockDiagonalPreconditioner(red, beta), block_diag(btb * beta, s), rng, 1e-8);

    Matrix m2 = dense_reduced(prob);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) m2(l + i, l + j) = i == j ? -beta : 0.0;
    expect_inverts(ConstraintPreconditioner(red, beta), m2, rng, 1e-8);

    expect_inverts(SchurPreconditioner(red), btb, rng, 1e-8);

    const double alpha = 1.0 / red.factors().constants().L;
    Matrix shifted = s;
    for (std::size_t i = 0; i < m; ++i) shifted(i, i) += alpha;
    const Matrix left = block_diag(Matrix::identity(l) * alpha, shifted * -1.0);
    Matrix right(l + m, l + m);
    for (std::size_t i = 0; i < l + m; ++i) right(i, i) = alpha;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < l; ++j) {
        right(j, l + i) = prob.B(i, j);
        right(l + i, j) = -prob.B(i, j);
      }
    expect_inverts(HssPreconditioner(red, alpha), left * right, rng, 1e-7);
  }
}

TEST(Preconditioners, RejectNonPositiveParameters) {
  const SaddleReduction red(random_problem(6, 4, 2, 0.5, 1));
  EXPECT_THROW(BlockDiagonalPreconditioner(red, 0.0), std::invalid_argument);
  EXPECT_THROW(ConstraintPreconditioner(red, -1.0), std::invalid_argument);
  EXPECT_THROW(HssPreconditioner(red, std::nan("")), std::invalid_argument);
}

TEST(PreconditionedSpectra, BlockDiagonal) {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const SaddleReduction red(small_problem(rng, 30, 1.0));
    const std::size_t l = red.problem().l(), m = red.problem().m();
    const double beta = red.factors().constants().L;
    const Matrix pk = to_dense(BlockDiagonalPreconditioner(red, beta)) *
                      to_dense(ReducedOperator(red));
    const auto eig = gen_eig(pk, false);
    std::size_t minus_one = 0;
    for (const auto& v : eig.values)
      if (std::abs(v - Complex(-1.0, 0.0)) < 1e-6) ++minus_one;
    EXPECT_EQ(minus_one, m - l) << "trial " << trial;
    for (const auto& v : eig.values) EXPECT_LE(std::abs(v.imag()), 1e-6);
  }
}

TEST(PreconditionedSpectra, ConstraintOneAndTwo) {
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const SaddleReduction red(small_problem(rng, 30, 1.0));
    const std::size_t l = red.problem().l();
    const auto& sc = red.factors().constants();
    const double beta = std::sqrt(sc.mu * sc.L);
    const Matrix kp = to_dense(ReducedOperator(red)) *
                      to_dense(ConstraintPreconditioner(red, beta));
    const auto re = sorted_real(gen_eig(kp, false));
    std::size_t ones = 0;
    for (double v : re) {
      if (std::abs(v - 1.0) < 1e-6) {
        ++ones;
        continue;
      }
      EXPECT_GE(v, 1.0 / (sc.L * beta) - 1e-6);
      EXPECT_LE(v, 1.0 / (sc.mu * beta) + 1e-6);
    }
    // Values of beta^{-1} P^T Dtilde^{-1} P that happen to equal 1 add to the count.
    EXPECT_GE(ones, 2 * l) << "trial " << trial;

    const Matrix schur = to_dense(SchurPreconditioner(red)) * to_dense(SchurOperator(red));
    for (double v : sorted_real(gen_eig(schur, false))) {
      EXPECT_GE(v, sc.mu - 1e-6);
      EXPECT_LE(v, sc.L + 1e-6);
    }
  }
}

TEST(SolvePreconditioned, AllMethodsMatchDenseSolve) {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const SaddleReduction red(small_problem(rng, 25, 0.8));
    const Vector want = solve_saddle_dense(red.problem());
    KrylovConfig cfg;
    cfg.tol = 1e-12;
    cfg.max_iters = 2000;
    for (auto method : {SaddleMethod::blkdiag, SaddleMethod::constr1, SaddleMethod::constr2,
                        SaddleMethod::hss}) {
      const auto [w, rep] = solve_preconditioned(red, method, cfg);
      EXPECT_LE(rel_err(w, want), 1e-8) << to_string(method) << " trial " << trial;
      EXPECT_EQ(rep.residual_history.size(), rep.iterations + 1);
    }
  }
}

TEST(SolvePreconditioned, ReportsSaddleResidual) {
  const SaddleReduction red(random_problem(40, 25, 10, 0.5, 3));
  KrylovConfig cfg;
  cfg.tol = 1e-6;
  const auto [w, rep] = solve_preconditioned(red, SaddleMethod::constr1, cfg);
  ASSERT_TRUE(rep.converged());
  EXPECT_NEAR(rep.final_residual(), saddle_relative_residual(red.problem(), w), 1e-12);
  EXPECT_LE(rep.final_residual(), 1e-6);
}

TEST(SaddleMethodNames, RoundTrip) {
  for (auto m : {SaddleMethod::blkdiag, SaddleMethod::constr1, SaddleMethod::constr2,
                 SaddleMethod::hss})
    EXPECT_EQ(parse_saddle_method(to_string(m)), m);
  EXPECT_FALSE(parse_saddle_method("uzawa").has_value());
}
