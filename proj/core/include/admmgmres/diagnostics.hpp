#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "admmgmres/linalg/eigen.hpp"
#include "admmgmres/problem.hpp"

namespace admmgmres {

using linalg::Complex;

/// The m x m core matrix
///
///   K(beta) = [Q^T; -P^T] W [Q  P],   W = V diag((beta - lambda) / (beta + lambda)) V^T
///
/// where Dtilde = V diag(lambda) V^T and [Q  P] is the full Q factor of B.
/// The nonzero eigenvalues of the ADMM iteration matrix are 1/2 + 1/2 eig(K).
struct KMatrixReport {
  Matrix K;
  Matrix Q;  // m x l
  Matrix P;  // m x (m - l)
  double beta = 0.0;
  double gamma = 1.0;
  /// (gamma - 1) / (gamma + 1)
  double norm_closed_form = 0.0;
  double norm_numeric = 0.0;
};

KMatrixReport build_K(const EcqpProblem& prob, double beta);
KMatrixReport build_K(const ProblemFactors& factors, const Matrix& B, double beta);

/// |Im z| above this (relative to max(||K||, 1)) counts as complex.
inline constexpr double kImagTol = 1e-8;

struct DeltaResult {
  double delta = 2.0;
  double delta_lb = 2.0;
};

/// delta = 1 - max Re(z) / ||K|| over complex eigenvalues z (2 when there
/// are none), and the block lower bound
/// delta_lb = 1 - (||K_11|| + ||K_22||) / (2 ||K||). Uses the closed-form norm.
DeltaResult compute_delta(const KMatrixReport& rep, const std::vector<Complex>& eigs);

/// 2-norm condition number of the unit-column eigenvector matrix; +inf when
/// the eigenvector matrix is numerically singular. Needs vectors.
double compute_kappa_X(const linalg::EigenPairs& eig);

/// ||K^T K - K K^T||_F^{1/2} / ||K||_F, 0 for K = 0.
double compute_nu(const Matrix& K);
/// (8 min(l, m - l))^{1/4} ||K|| / ||K||_F, 0 for K = 0.
double nu_bound(const KMatrixReport& rep);

struct DiagnosticsReport {
  double kappa = 1.0;
  double beta = 0.0;
  double gamma = 1.0;
  /// Disk radius (gamma - 1) / (gamma + 1).
  double a = 0.0;
  double norm_K = 0.0;
  std::vector<Complex> eigenvalues;
  double delta = 2.0;
  double delta_lb = 2.0;
  double kappa_X = 1.0;
  double nu = 0.0;
  double nu_bound = 0.0;
  std::string warning;
};

/// Full spectral report of K(beta); beta defaults to sqrt(mu L).
DiagnosticsReport diagnose(const EcqpProblem& prob);
DiagnosticsReport diagnose(const EcqpProblem& prob, double beta);
DiagnosticsReport diagnose(const KMatrixReport& rep, double kappa);

void write_diagnostics_csv_header(std::ostream& os);
void write_diagnostics_csv_row(std::ostream& os, const DiagnosticsReport& rep);
/// One "re im" pair per line.
void write_eigenvalue_scatter(std::ostream& os, const std::vector<Complex>& eigs);

/// Per-iteration rate curves, without the unknown constant prefactors.
struct BoundCurves {
  std::vector<double> admm;            // (gamma / (gamma + 1))^(k - 2)
  std::vector<double> worst_case;      // ((gamma - 1) / (gamma + 1))^(k - 2)
  std::vector<double> chebyshev;       // 1 / |T_k(1 / a)|
  std::vector<double> chebyshev_bound; // 2 ((sqrt(gamma) - 1) / (sqrt(gamma) + 1))^k
  std::vector<double> disk_segment;    // ((sqrt(gamma) - 1) / (sqrt(gamma) + 1))^(delta (k - 2) / 6)
  std::vector<double> outlier;         // (1 - delta / 2)^(k / 2)
};

/// Curves for k = 0..k_max. Exponents k - 2 are clamped at zero. Throws
/// std::invalid_argument unless gamma >= 1 is finite and delta is in (0, 2].
BoundCurves bound_curves(double gamma, double delta, std::size_t k_max);

/// 1 / |T_k(x)| for |x| >= 1 by the three-term recurrence.
double chebyshev_inverse(std::size_t k, double x);

/// Dense G(beta) = M^{-1} N of the ADMM splitting.
Matrix dense_iteration_matrix(const EcqpProblem& prob, double beta);

/// Largest distance in a greedy nearest-neighbour matching of two equally
/// sized multisets; +inf if the sizes differ.
double multiset_distance(const std::vector<Complex>& a, const std::vector<Complex>& b);

struct SpectrumTransfer {
  std::size_t nonzero_count = 0;
  std::size_t m = 0;
  double distance = 0.0;  // multiset distance of nonzero eig(G) to 1/2 + 1/2 eig(K)
};

/// Compares the nonzero spectrum of dense G(beta) against 1/2 + 1/2 eig(K).
SpectrumTransfer spectrum_transfer(const EcqpProblem& prob, double beta,
                                   double zero_tol = 1e-6);

}  // namespace admmgmres
