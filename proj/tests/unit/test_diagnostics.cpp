#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "admmgmres/admm.hpp"
#include "admmgmres/diagnostics.hpp"
#include "admmgmres/linalg/decompositions.hpp"
#include "admmgmres/linalg/norms.hpp"
#include "test_support.hpp"

using namespace admmgmres;
using namespace admmgmres::linalg;
using testing_support::frob_diff;
using testing_support::small_problem;

namespace {

// K from its definition with dense inverses of Dtilde-based matrices.
Matrix dense_K(const EcqpProblem& prob, double beta) {
  const std::size_t m = prob.m(), l = prob.l();
  const Matrix s = prob.A * Lu(prob.D).inverse() * prob.A.transpose();
  const Matrix dtilde = Lu(s).inverse();
  const Matrix I = Matrix::identity(m);
  const Matrix w = Lu(dtilde * (1.0 / beta) + I).inverse() - Lu(s * beta + I).inverse();
  const Matrix U = qr(prob.B).q;
  Matrix k = U.transpose() * w * U;
  for (std::size_t i = l; i < m; ++i)
    for (double& v : k.row(i)) v = -v;
  return k;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

TEST(BuildK, MatchesDenseDefinition) {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const EcqpProblem prob = small_problem(rng, 25, 1.0);
    const double beta = std::exp(rng.uniform(-1.5, 1.5));
    const auto rep = build_K(prob, beta);
    const Matrix want = dense_K(prob, beta);
    EXPECT_LE(frob_diff(rep.K, want), 1e-9 * (1 + frobenius_norm(want))) << "trial " << trial;
    EXPECT_LE(testing_support::orthogonality_error(rep.Q), 1e-12);
  }
}

TEST(BuildK, ClosedFormNormExample) {
  // A = I makes Dtilde = D, so mu = 0.1 and L = 10.
  EcqpProblem prob;
  prob.D = Matrix{{0.1, 0, 0}, {0, 10, 0}, {0, 0, 1}};
  prob.A = Matrix::identity(3);
  prob.B = Matrix{{1, 0}, {1, 1}, {0, 2}};
  prob.c = {0, 0, 0};
  prob.p = {0, 0};
  prob.d = {0, 0, 0};
  const auto rep = build_K(prob, 1.0);
  EXPECT_NEAR(rep.gamma, 10.0, 1e-12);
  EXPECT_NEAR(rep.norm_closed_form, 9.0 / 11.0, 1e-15);
  EXPECT_NEAR(rep.norm_numeric, 9.0 / 11.0, 1e-12);
}

TEST(BuildK, WellConditionedProblemGivesZero) {
  const EcqpProblem prob = random_problem(20, 12, 5, 0.0, 3);
  const auto rep = build_K(prob, optimal_beta(spectral_constants(prob)));
  EXPECT_LE(rep.norm_numeric, 1e-6);
  EXPECT_LE(rep.norm_closed_form, 1e-6);
}

TEST(BuildK, NormInvariantOnRandomInstances) {
  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const EcqpProblem prob = small_problem(rng, 30, 1.5);
    const auto sc = spectral_constants(prob);
    for (double beta : {optimal_beta(sc), sc.mu, sc.L}) {
      const auto rep = build_K(prob, beta);
      EXPECT_NEAR(rep.norm_numeric, rep.norm_closed_form, 1e-8) << "trial " << trial;
    }
  }
}

TEST(WorstCase, KIsScaledOrthogonal) {
  const EcqpProblem prob = worst_case_problem(4, 100.0);
  const auto d = diagnose(prob);
  const auto rep = build_K(prob, d.beta);
  const double a = 9.0 / 11.0;
  EXPECT_NEAR(d.a, a, 1e-14);
  EXPECT_LE(frob_diff(mul_tn(rep.K, rep.K), Matrix::identity(4) * (a * a)), 1e-12);
  // eig(K) = a exp(+-i pi / 4), a exp(+-3 i pi / 4)
  std::vector<Complex> want;
  for (double t : {0.25, 0.75, -0.25, -0.75}) want.push_back(std::polar(a, std::numbers::pi * t));
  EXPECT_LE(multiset_distance(d.eigenvalues, want), 1e-10);
  EXPECT_NEAR(d.delta, 1.0 - std::cos(std::numbers::pi / 4), 1e-10);
  EXPECT_NEAR(d.kappa_X, 1.0, 1e-6);
  EXPECT_NEAR(d.nu, 0.0, 1e-6);
}

TEST(WorstCase, DeltaShrinksWithDimension) {
  const auto d8 = diagnose(worst_case_problem(8, 1e4));
  const auto d64 = diagnose(worst_case_problem(64, 1e4));
  EXPECT_LT(d64.delta, d8.delta);
  // Closed form 1 - cos(pi / m).
  EXPECT_NEAR(d8.delta, 1.0 - std::cos(std::numbers::pi / 8), 1e-8);
  EXPECT_NEAR(d64.delta, 1.0 - std::cos(std::numbers::pi / 64), 1e-8);
}

TEST(KappaX, DiagonalIsOne) {
  const auto eig = gen_eig(Matrix{{1, 0}, {0, 2}}, true);
  EXPECT_NEAR(compute_kappa_X(eig), 1.0, 1e-12);
}

TEST(KappaX, MatchesDirectConditionOfRealEigenvectors) {
  // Upper triangular with distinct real eigenvalues 1, 2: eigenvectors
  // e1 and (t, 1)/sqrt(1 + t^2).
  const double t = 3.0;
  const auto eig = gen_eig(Matrix{{1, t}, {0, 2}}, true);
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const Matrix x{{1, t * c}, {0, c}};
  EXPECT_NEAR(compute_kappa_X(eig), condition_2(x), 1e-8);
}

TEST(KappaX, DefectiveIsInfinite) {
  const auto eig = gen_eig(Matrix{{1, 1}, {0, 1}}, true);
  EXPECT_TRUE(std::isinf(compute_kappa_X(eig)));
}

TEST(Nu, Examples) {
  // K^T K - K K^T = diag(1, -1) has Frobenius norm sqrt2 and ||K||_F = 1, so
  // nu = 2^{1/4}, the largest value nu can take.
  EXPECT_NEAR(compute_nu(Matrix{{0, 0}, {1, 0}}), std::pow(2.0, 0.25), 1e-15);
  EXPECT_EQ(compute_nu(Matrix(3, 3)), 0.0);
  EXPECT_NEAR(compute_nu(Matrix{{0, -1}, {1, 0}}), 0.0, 1e-15);
}

TEST(Nu, DecreasesWithDimension) {
  std::vector<double> lm, lnu;
  for (std::size_t m : {32u, 64u, 128u, 256u}) {
    double acc = 0.0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const EcqpProblem prob = random_problem(m, m, m / 2, 1.0, seed);
      acc += std::log(compute_nu(build_K(prob, optimal_beta(spectral_constants(prob))).K));
    }
    lm.push_back(std::log(static_cast<double>(m)));
    lnu.push_back(acc / 3.0);
  }
  const double slope = fit_slope(lm, lnu);
  EXPECT_LT(slope, -0.1);
  EXPECT_GT(slope, -0.5);
}

TEST(Diagnose, InvariantsOnRandomInstances) {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const EcqpProblem prob = small_problem(rng, 40, 1.5);
    const auto d = diagnose(prob);
    EXPECT_LE(d.delta_lb, d.delta + 1e-12) << "trial " << trial;
    EXPECT_LE(d.nu, d.nu_bound + 1e-12);
    EXPECT_LE(d.nu, std::sqrt(2.0) + 1e-12);
    EXPECT_GE(d.kappa_X, 1.0 - 1e-12);
    EXPECT_GE(d.delta, 0.0);
    EXPECT_LE(d.delta, 2.0);
    for (const auto& z : d.eigenvalues) EXPECT_LE(std::abs(z), d.a + 1e-8);
  }
}

TEST(Diagnose, CsvRow) {
  std::stringstream ss;
  write_diagnostics_csv_header(ss);
  DiagnosticsReport r;
  write_diagnostics_csv_row(ss, r);
  std::string header, row;
  std::getline(ss, header);
  std::getline(ss, row);
  EXPECT_EQ(header, "kappa,beta,normK,delta,delta_lb,kappa_X,nu");
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 6);
}

TEST(SpectrumTransfer, MatchesHalfShiftedKSpectrum) {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const EcqpProblem prob = small_problem(rng, 20, 1.0);
    const auto sc = spectral_constants(prob);
    const auto st = spectrum_transfer(prob, optimal_beta(sc));
    EXPECT_EQ(st.nonzero_count, st.m) << "trial " << trial;
    EXPECT_LE(st.distance, 1e-6) << "trial " << trial;
  }
}

TEST(BoundCurves, ChebyshevMatchesCoshFormula) {
  for (double x : {1.0, 1.5, 3.0, 10.0})
    for (std::size_t k = 0; k < 30; ++k)
      EXPECT_NEAR(chebyshev_inverse(k, x) * std::cosh(k * std::acosh(x)), 1.0, 1e-10);
}

TEST(BoundCurves, HalfRadiusExample) {
  // a = 1/2 means gamma = 3; T_2(2) = 7.
  const auto c = bound_curves(3.0, 1.0, 2);
  EXPECT_NEAR(c.chebyshev[2], 1.0 / 7.0, 1e-15);
  const double r = (std::sqrt(3.0) - 1) / (std::sqrt(3.0) + 1);
  EXPECT_NEAR(c.chebyshev_bound[2], 2 * r * r, 1e-15);
  EXPECT_LE(c.chebyshev[2], c.chebyshev_bound[2]);
  EXPECT_NEAR(c.chebyshev_bound[2], 0.1436, 1e-4);
}

TEST(BoundCurves, ChebyshevRateAtOptimalBeta) {
  // kappa = 1e4 at beta = sqrt(mu L) gives gamma = 100.
  const auto c = bound_curves(100.0, 1.0, 3);
  EXPECT_NEAR(c.chebyshev_bound[3] / c.chebyshev_bound[2], 9.0 / 11.0, 1e-14);
}

TEST(BoundCurves, ExactChebyshevBelowItsBound) {
  for (double g : {2.0, 10.0, 1e3})
    for (std::size_t k = 0; k <= 50; ++k) {
      const auto c = bound_curves(g, 0.5, 50);
      EXPECT_LE(c.chebyshev[k], c.chebyshev_bound[k] * (1 + 1e-12));
    }
}

TEST(BoundCurves, UnitGamma) {
  const auto c = bound_curves(1.0, 2.0, 6);
  for (std::size_t k = 3; k <= 6; ++k) {
    EXPECT_EQ(c.worst_case[k], 0.0);
    EXPECT_EQ(c.chebyshev[k], 0.0);
    EXPECT_EQ(c.chebyshev_bound[k], 0.0);
    EXPECT_EQ(c.disk_segment[k], 0.0);
    EXPECT_EQ(c.outlier[k], 0.0);
    // The plain ADMM rate gamma / (gamma + 1) stays at 1/2.
    EXPECT_DOUBLE_EQ(c.admm[k], std::pow(0.5, k - 2.0));
  }
}

TEST(BoundCurves, RejectsBadInputs) {
  EXPECT_THROW(bound_curves(0.5, 1.0, 3), std::invalid_argument);
  EXPECT_THROW(bound_curves(INFINITY, 1.0, 3), std::invalid_argument);
  EXPECT_THROW(bound_curves(2.0, 0.0, 3), std::invalid_argument);
  EXPECT_THROW(bound_curves(2.0, 2.5, 3), std::invalid_argument);
  EXPECT_THROW(chebyshev_inverse(3, 0.5), std::invalid_argument);
}
