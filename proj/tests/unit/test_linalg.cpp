#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "admmgmres/linalg/decompositions.hpp"
#include "admmgmres/linalg/eigen.hpp"
#include "admmgmres/linalg/matrix_io.hpp"
#include "admmgmres/linalg/norms.hpp"
#include "admmgmres/linalg/random.hpp"
#include "test_support.hpp"

using namespace admmgmres::linalg;
using testing_support::frob_diff;
using testing_support::orthogonality_error;
using testing_support::random_full_rank;
using testing_support::random_spd;

namespace {

// Characteristic-polynomial roots of a 2x2 real matrix, computed directly.
std::vector<Complex> eig2x2(double a, double b, double c, double d) {
  const double tr = a + d, det = a * d - b * c;
  const Complex disc = std::sqrt(Complex(tr * tr / 4.0 - det, 0.0));
  return {tr / 2.0 + disc, tr / 2.0 - disc};
}

bool by_re_im(Complex x, Complex y) {
  return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
}

}  // namespace

TEST(Cholesky, IdentityIsItsOwnFactor) {
  EXPECT_EQ(cholesky(Matrix::identity(3)), Matrix::identity(3));
}

TEST(Cholesky, TwoByTwoHandCase) {
  const Matrix l = cholesky(Matrix{{4, 2}, {2, 3}});
  EXPECT_DOUBLE_EQ(l(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(l(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(l(1, 0), 1.0);
  EXPECT_NEAR(l(1, 1), std::sqrt(2.0), 1e-15);
}

TEST(Cholesky, RandomRoundTrip) {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.uniform_int(0, 40);
    const Matrix m = random_spd(n, std::pow(10.0, rng.uniform(0, 8)), rng);
    const Matrix l = cholesky(m);
    EXPECT_LE(frob_diff(mul_nt(l, l), m), 1e-12 * frobenius_norm(m));
  }
}

TEST(Cholesky, ReportsPivotOfIndefiniteMatrix) {
  try {
    cholesky(Matrix{{1, 0, 0}, {0, 2, 0}, {0, 0, -1}});
    FAIL() << "expected NotPositiveDefinite";
  } catch (const NotPositiveDefinite& e) {
    EXPECT_EQ(e.pivot(), 2u);
  }
}

TEST(Cholesky, SolveMatchesLu) {
  Rng rng(3);
  const Matrix m = random_spd(12, 100.0, rng);
  const Vector b = rng.gaussian_vector(12);
  const Vector x1 = Cholesky(m).solve(b);
  const Vector x2 = lu_solve(m, b);
  for (std::size_t i = 0; i < 12; ++i) EXPECT_NEAR(x1[i], x2[i], 1e-12);
}

TEST(Qr, IdentityGivesIdentity) {
  const auto [q, r] = qr(Matrix::identity(4));
  EXPECT_LE(frob_diff(q, Matrix::identity(4)), 1e-15);
  EXPECT_LE(frob_diff(r, Matrix::identity(4)), 1e-15);
}

TEST(Qr, ColumnVectorNormIsFive) {
  const auto f = qr(Matrix{{3}, {4}});
  EXPECT_NEAR(std::abs(f.r(0, 0)), 5.0, 1e-15);
  const double sign = f.r(0, 0) > 0 ? 1.0 : -1.0;
  EXPECT_NEAR(sign * f.q(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(sign * f.q(1, 0), 0.8, 1e-15);
  EXPECT_LE(orthogonality_error(f.q), 1e-15);
}

TEST(Qr, RandomRoundTripAndSplit) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t rows = 1 + rng.uniform_int(0, 30);
    const std::size_t cols = 1 + rng.uniform_int(0, rows - 1);
    const Matrix m = random_full_rank(rows, cols, rng);
    const auto f = qr(m);
    EXPECT_LE(orthogonality_error(f.q), 1e-12);
    EXPECT_LE(frob_diff(f.q * f.r, m), 1e-12 * frobenius_norm(m));
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < std::min(i, cols); ++j) EXPECT_EQ(f.r(i, j), 0.0);
    const Matrix p = f.complement(cols);
    EXPECT_EQ(p.cols(), rows - cols);
    // The complement is orthogonal to the range of m.
    if (p.cols() > 0) {
      const Matrix ptm = mul_tn(p, m);
      EXPECT_LE(max_abs(std::span<const double>(ptm.values())), 1e-12 * frobenius_norm(m));
    }
  }
}

TEST(Qr, RankDeficientIsReported) {
  EXPECT_THROW(qr(Matrix{{1, 2}, {2, 4}, {3, 6}}), RankDeficient);
}

TEST(SymEig, DiagonalCase) {
  const auto e = sym_eig(Matrix{{1, 0}, {0, 5}});
  EXPECT_DOUBLE_EQ(e.values[0], 1.0);
  EXPECT_DOUBLE_EQ(e.values[1], 5.0);
  EXPECT_NEAR(std::abs(e.vectors(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(e.vectors(1, 1)), 1.0, 1e-15);
}

TEST(SymEig, CharacteristicPolynomialCase) {
  const auto e = sym_eig(Matrix{{2, 1}, {1, 2}});
  EXPECT_NEAR(e.values[0], 1.0, 1e-14);
  EXPECT_NEAR(e.values[1], 3.0, 1e-14);
}

TEST(SymEig, RandomRoundTripSortedOrthogonal) {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.uniform_int(0, 40);
    Matrix m = rng.gaussian_matrix(n, n);
    m = symmetrized(m);
    const auto e = sym_eig(m);
    EXPECT_TRUE(std::is_sorted(e.values.begin(), e.values.end()));
    EXPECT_LE(orthogonality_error(e.vectors), 1e-12);
    EXPECT_LE(frob_diff(e.reconstruct(), m), 1e-10 * frobenius_norm(m));
  }
}

TEST(SymEig, RejectsAsymmetricInputNamingAsymmetry) {
  try {
    sym_eig(Matrix{{1, 2}, {0, 1}});
    FAIL() << "expected NotSymmetric";
  } catch (const NotSymmetric& e) {
    EXPECT_DOUBLE_EQ(e.max_asymmetry(), 2.0);
  }
}

TEST(GenEig, RotationHasPlusMinusI) {
  const auto e = gen_eig(Matrix{{0, -1}, {1, 0}}, true);
  ASSERT_EQ(e.values.size(), 2u);
  EXPECT_NEAR(e.values[0].real(), 0.0, 1e-15);
  EXPECT_NEAR(e.values[0].imag(), 1.0, 1e-15);
  EXPECT_EQ(e.values[1], std::conj(e.values[0]));
}

TEST(GenEig, TwoByTwoMatchesQuadraticFormula) {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = rng.gaussian(), b = rng.gaussian(), c = rng.gaussian(), d = rng.gaussian();
    auto got = gen_eig(Matrix{{a, b}, {c, d}}, false).values;
    auto want = eig2x2(a, b, c, d);
    std::sort(got.begin(), got.end(), by_re_im);
    std::sort(want.begin(), want.end(), by_re_im);
    for (int k = 0; k < 2; ++k) EXPECT_LE(std::abs(got[k] - want[k]), 1e-12);
  }
}

TEST(GenEig, RandomEigenpairsSatisfyDefinition) {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.uniform_int(0, 40);
    const Matrix m = rng.gaussian_matrix(n, n);
    const auto e = gen_eig(m, true);
    ASSERT_EQ(e.values.size(), n);
    const ComplexMatrix& x = *e.vectors;
    const ComplexMatrix mx = to_complex(m) * x;
    for (std::size_t j = 0; j < n; ++j) {
      double col_norm = 0.0, res = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        col_norm += std::norm(x(i, j));
        res = std::max(res, std::abs(mx(i, j) - e.values[j] * x(i, j)));
      }
      EXPECT_NEAR(col_norm, 1.0, 1e-12);
      EXPECT_LE(res, 1e-9 * (1.0 + frobenius_norm(m)));
    }
    // Conjugate symmetry of the multiset: pairs are adjacent and exact.
    for (std::size_t k = 0; k < n; ++k) {
      if (e.values[k].imag() > 0.0) {
        ASSERT_LT(k + 1, n);
        EXPECT_EQ(e.values[k + 1], std::conj(e.values[k]));
        ++k;
      } else {
        EXPECT_EQ(e.values[k].imag(), 0.0);
      }
    }
  }
}

TEST(GenEig, TraceAndSymmetricAgreement) {
  Rng rng(17);
  const Matrix s = symmetrized(rng.gaussian_matrix(25, 25));
  const auto g = gen_eig(s, false);
  auto sym = sym_eig(s).values;
  std::vector<double> re;
  for (auto v : g.values) {
    EXPECT_LE(std::abs(v.imag()), 1e-12);
    re.push_back(v.real());
  }
  std::sort(re.begin(), re.end());
  for (std::size_t i = 0; i < re.size(); ++i) EXPECT_NEAR(re[i], sym[i], 1e-10);
}

TEST(GenEig, CompanionMatrixRoots) {
  // Companion matrix of (x-1)(x-2)(x-3)(x^2+1) = x^5 - 6x^4 + 12x^3 - 12x^2 + 11x - 6
  const Matrix c{{6, -12, 12, -11, 6},
                 {1, 0, 0, 0, 0},
                 {0, 1, 0, 0, 0},
                 {0, 0, 1, 0, 0},
                 {0, 0, 0, 1, 0}};
  auto v = gen_eig(c, false).values;
  std::sort(v.begin(), v.end(), by_re_im);
  const std::vector<Complex> want{{0, -1}, {0, 1}, {1, 0}, {2, 0}, {3, 0}};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_LE(std::abs(v[i] - want[i]), 1e-9);
}

TEST(Norms, IdentityCase) {
  const Matrix i5 = Matrix::identity(5);
  EXPECT_NEAR(spectral_norm(i5), 1.0, 1e-15);
  EXPECT_NEAR(frobenius_norm(i5), std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(condition_2(i5), 1.0, 1e-15);
}

TEST(Norms, DiagonalCase) {
  const Matrix m{{2, 0}, {0, -3}};
  EXPECT_NEAR(spectral_norm(m), 3.0, 1e-15);
  EXPECT_NEAR(frobenius_norm(m), std::sqrt(13.0), 1e-15);
  EXPECT_NEAR(condition_2(m), 1.5, 1e-15);
}

TEST(Norms, SingularConditionThrows) {
  EXPECT_THROW(condition_2(Matrix{{1, 1}, {1, 1}}), Singular);
}

TEST(Norms, SpectralNormIsOrthogonallyInvariant) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng.uniform_int(0, 20);
    const Matrix m = rng.gaussian_matrix(n, n);
    const Matrix q = haar_orthogonal(n, rng);
    const double a = spectral_norm(m);
    const double b = spectral_norm(mul_nt(q * m, q));
    EXPECT_NEAR(a, b, 1e-10 * a);
  }
}

TEST(Norms, RectangularSpectralNormMatchesTranspose) {
  Rng rng(6);
  const Matrix m = rng.gaussian_matrix(7, 3);
  EXPECT_NEAR(spectral_norm(m), spectral_norm(m.transpose()), 1e-12);
}

TEST(Haar, DimensionOneIsSign) {
  Rng rng(1);
  const Matrix q = haar_orthogonal(1, rng);
  EXPECT_EQ(std::abs(q(0, 0)), 1.0);
}

TEST(Haar, OrthogonalAtFifty) {
  Rng rng(1234);
  EXPECT_LE(orthogonality_error(haar_orthogonal(50, rng)), 1e-12);
}

TEST(Haar, SeedDeterminism) {
  Rng a(99), b(99), c(100);
  const Matrix qa = haar_orthogonal(10, a);
  EXPECT_EQ(qa, haar_orthogonal(10, b));
  EXPECT_GT(max_abs_diff(qa, haar_orthogonal(10, c)), 0.0);
}

TEST(Haar, FirstColumnIsUniformOnSphere) {
  // For Haar Q, E[Q_00^2] = 1/n. A loose check catches a missing sign fix,
  // which would bias the diagonal positive.
  Rng rng(77);
  const std::size_t n = 4;
  double sum_sq = 0.0, sum_diag = 0.0;
  const int trials = 4000;
  for (int t = 0; t < trials; ++t) {
    const Matrix q = haar_orthogonal(n, rng);
    sum_sq += q(0, 0) * q(0, 0);
    sum_diag += q(0, 0);
  }
  EXPECT_NEAR(sum_sq / trials, 1.0 / n, 0.02);
  EXPECT_NEAR(sum_diag / trials, 0.0, 0.03);
}

TEST(Rng, UniformIntStaysInRange) {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const auto v = rng.uniform_int(3, 7);
    EXPECT_GE(v, 3u);
    EXPECT_LE(v, 7u);
  }
}

TEST(Rng, GaussianMoments) {
  Rng rng(9);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    s += g;
    s2 += g * g;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
}

TEST(Rng, DerivedSeedsDiffer) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(5, 3), derive_seed(5, 3));
}

TEST(MatrixIo, RoundTripIsBitExact) {
  Rng rng(31);
  Matrix m = rng.gaussian_matrix(4, 3);
  m(0, 0) = 1.0 / 3.0;
  m(1, 1) = -0.0;
  m(2, 2) = 1e-300;
  m(3, 0) = std::numbers::pi * 1e200;
  std::stringstream ss;
  write_matrix(ss, m);
  const Matrix back = read_matrix(ss);
  EXPECT_EQ(back, m);
}

TEST(MatrixIo, HeaderAndVector) {
  std::stringstream ss;
  write_vector(ss, Vector{1.5, -2.0});
  EXPECT_EQ(ss.str().substr(0, 4), "2 1\n");
  EXPECT_EQ(read_vector(ss), (Vector{1.5, -2.0}));
}

TEST(MatrixIo, RejectsTruncatedAndNonFinite) {
  std::stringstream a("2 2\n1 2 3\n");
  EXPECT_THROW(read_matrix(a), LinalgError);
  std::stringstream b("1 1\ninf\n");
  EXPECT_THROW(read_matrix(b), LinalgError);
  std::stringstream c("1 1\n1.0x\n");
  EXPECT_THROW(read_matrix(c), LinalgError);
}
