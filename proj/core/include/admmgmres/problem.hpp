#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "admmgmres/linalg/decompositions.hpp"
#include "admmgmres/linalg/eigen.hpp"
#include "admmgmres/linalg/matrix.hpp"
#include "admmgmres/linalg/random.hpp"

namespace admmgmres {

using linalg::Matrix;
using linalg::Vector;

class ProblemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Equality-constrained convex QP
///
///   minimize    1/2 x^T D x + c^T x + p^T z
///   subject to  A x + B z = d
///
/// with D (n x n) SPD, A (m x n) full row rank, B (m x l) full column rank.
struct EcqpProblem {
  Matrix D;
  Matrix A;
  Matrix B;
  Vector c;
  Vector p;
  Vector d;

  std::size_t n() const noexcept { return D.rows(); }
  std::size_t m() const noexcept { return A.rows(); }
  std::size_t l() const noexcept { return B.cols(); }
  /// Length of the stacked iterate u = [x; z; y].
  std::size_t dim() const noexcept { return n() + l() + m(); }

  /// Throws ProblemError on inconsistent shapes or non-finite data.
  void check_dimensions() const;
};

/// Extreme eigenvalues of Dtilde = (A D^{-1} A^T)^{-1} and their ratio.
struct SpectralConstants {
  double mu = 1.0;
  double L = 1.0;
  double kappa = 1.0;
  /// Eigenvalues of Dtilde, ascending.
  Vector dtilde_eigs;
};

/// Factorizations shared by the ADMM operator, the preconditioners and the
/// diagnostics. Construction checks that D is SPD, A has full row rank and B
/// has full column rank.
///
/// V holds the eigenvectors of Dtilde = V diag(lambda) V^T with lambda
/// ascending; A D^{-1} A^T = V diag(1/lambda) V^T shares them.
class ProblemFactors {
 public:
  explicit ProblemFactors(const EcqpProblem& prob);

  const linalg::Cholesky& chol_D() const noexcept { return chol_d_; }
  const linalg::Cholesky& chol_BtB() const noexcept { return chol_btb_; }
  const Matrix& V() const noexcept { return v_; }
  const Vector& lambda() const noexcept { return lambda_; }
  const SpectralConstants& constants() const noexcept { return constants_; }

  /// D^{-1} x
  Vector solve_D(std::span<const double> x) const { return chol_d_.solve(x); }
  /// (B^T B)^{-1} x
  Vector solve_BtB(std::span<const double> x) const { return chol_btb_.solve(x); }
  /// V diag(f(lambda_i)) V^T x for a diagonal weight vector w.
  Vector apply_spectral(std::span<const double> w, std::span<const double> x) const;
  /// Dtilde x
  Vector apply_dtilde(std::span<const double> x) const;
  /// A D^{-1} A^T x
  Vector apply_schur(std::span<const double> x) const;

 private:
  linalg::Cholesky chol_d_;
  linalg::Cholesky chol_btb_;
  Matrix v_;
  Vector lambda_;
  SpectralConstants constants_;
};

/// mu, L, kappa of the problem. Computed through the Cholesky factor of D and
/// a symmetric eigensolve of the Gram matrix of A L_D^{-T}; Dtilde is never
/// formed by explicit inversion. Throws ProblemError naming the failed
/// assumption.
SpectralConstants spectral_constants(const EcqpProblem& prob);

/// Random instance: A = U_A S_A V_A^T, B = U_B S_B V_B^T, D = U_D S_D U_D^T
/// with Haar singular vectors and i.i.d. exp(s N(0,1)) singular values
/// (one shared s). c, p, d are standard Gaussian. Deterministic in `seed`.
EcqpProblem random_problem(std::size_t n, std::size_t m, std::size_t l, double s,
                           std::uint64_t seed);

/// Dimensions and conditioning parameter of one sweep instance.
struct InstanceParams {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t l = 0;
  double s = 0.0;
  std::uint64_t seed = 0;
};

/// Sweep sampling: m uniform on {1..n}, l uniform on {1..m}, s uniform on
/// [s_min, s_max], problem seed derived from (base_seed, index).
InstanceParams sample_instance(std::size_t n, double s_min, double s_max,
                               std::uint64_t base_seed, std::uint64_t index);

inline EcqpProblem random_problem(const InstanceParams& ip) {
  return random_problem(ip.n, ip.m, ip.l, ip.s, ip.seed);
}

/// Construction on which ADMM-GMRES attains its lower rate bound:
/// A = I_m, D = diag(kappa^{-1/2} I, kappa^{1/2} I), B = [cos T; sin T] with
/// T = pi/(2m) diag(1, 3, ..., m-1), so n = m and l = m/2.
EcqpProblem worst_case_problem(std::size_t m, double kappa, std::uint64_t seed = 0);

/// Dense matrices of the augmented KKT system for a given beta and the
/// unaugmented saddle-point system. Row blocks are ordered (x, z, y).
///
/// H(beta) u = v(beta) is satisfied by u = [x; z; y/beta] where (x, z, y)
/// solves saddle [x; z; y] = saddle_rhs.
struct KktSystem {
  Matrix H;
  Vector v;
  Matrix M;
  Matrix N;
  Matrix saddle;
  Vector saddle_rhs;
};

KktSystem assemble_kkt(const EcqpProblem& prob, double beta);

/// Dense saddle-point solve; returns [x; z; y] with the unscaled multiplier y.
Vector solve_saddle_dense(const EcqpProblem& prob);

/// Relative residual ||S w - r|| / ||r|| of the saddle system at w = [x; z; y]
/// without forming S.
double saddle_relative_residual(const EcqpProblem& prob, std::span<const double> w);

/// Text serialization: a header line "n m l" followed by the D, A, B, c, p, d
/// blocks in the linalg matrix format.
void write_problem(std::ostream& os, const EcqpProblem& prob);
EcqpProblem read_problem(std::istream& is);
void save_problem(const std::string& path, const EcqpProblem& prob);
EcqpProblem load_problem(const std::string& path);

}  // namespace admmgmres
