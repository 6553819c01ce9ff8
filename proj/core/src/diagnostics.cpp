#include "admmgmres/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "admmgmres/admm.hpp"
#include "admmgmres/linalg/decompositions.hpp"
#include "admmgmres/linalg/matrix_io.hpp"
#include "admmgmres/linalg/norms.hpp"

namespace admmgmres {

using namespace linalg;

namespace {

double block_norm(const Matrix& k, std::size_t r0, std::size_t n) {
  if (n == 0) return 0.0;
  return spectral_norm(k.block(r0, r0, n, n));
}

}  // namespace

KMatrixReport build_K(const ProblemFactors& factors, const Matrix& B, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ProblemError("beta must be positive");
  const std::size_t m = B.rows(), l = B.cols();
  const Vector& lambda = factors.lambda();
  const Matrix& V = factors.V();
  const auto qr_b = qr(B, true);

  KMatrixReport rep;
  rep.beta = beta;
  rep.gamma = gamma_of(factors.constants(), beta);
  rep.norm_closed_form = (rep.gamma - 1.0) / (rep.gamma + 1.0);
  rep.Q = qr_b.q.block(0, 0, m, l);
  rep.P = qr_b.q.block(0, l, m, m - l);

  // K = J C^T diag(w) C with C = V^T [Q P], J = diag(I_l, -I_{m-l})
  const Matrix C = mul_tn(V, qr_b.q);
  Matrix wc = C;
  for (std::size_t i = 0; i < m; ++i) {
    const double w = (beta - lambda[i]) / (beta + lambda[i]);
    for (double& v : wc.row(i)) v *= w;
  }
  // C^T diag(w) C is symmetric; impose it exactly so K = [X Z; -Z^T Y] holds
  // with X, Y symmetric and a symmetric K (l = m) stays normal to the bit.
  rep.K = symmetrized(mul_tn(C, wc));
  for (std::size_t i = l; i < m; ++i)
    for (double& v : rep.K.row(i)) v = -v;
  rep.norm_numeric = spectral_norm(rep.K);
  return rep;
}

KMatrixReport build_K(const EcqpProblem& prob, double beta) {
  const ProblemFactors factors(prob);
  return build_K(factors, prob.B, beta);
}

DeltaResult compute_delta(const KMatrixReport& rep, const std::vector<Complex>& eigs) {
  const double norm_k = rep.norm_closed_form;
  DeltaResult out;
  if (!(norm_k > 0.0)) return out;
  const double tol = kImagTol * std::max(norm_k, 1.0);
  bool any = false;
  double max_re = -norm_k;
  for (const auto& z : eigs) {
    if (std::abs(z.imag()) <= tol) continue;
    any = true;
    max_re = std::max(max_re, z.real());
  }
  out.delta = any ? 1.0 - max_re / norm_k : 2.0;
  const std::size_t l = rep.Q.cols(), m = rep.K.rows();
  const double x = block_norm(rep.K, 0, l);
  const double y = block_norm(rep.K, l, m - l);
  out.delta_lb = 1.0 - (x + y) / (2.0 * norm_k);
  return out;
}

double compute_kappa_X(const EigenPairs& eig) {
  if (!eig.vectors) throw std::invalid_argument("compute_kappa_X needs eigenvectors");
  const ComplexMatrix& X = *eig.vectors;
  const std::size_t m = X.rows();
  if (m == 0) return 1.0;
  // A conjugate pair [v, conj v] times the unitary (1/sqrt2)[1 -i; 1 i] is
  // sqrt2 [Re v, Im v], so the real matrix below has the same singular values.
  Matrix xr(m, m);
  for (std::size_t j = 0; j < m; ++j) {
    double nrm = 0.0;
    for (std::size_t i = 0; i < m; ++i) nrm += std::norm(X(i, j));
    nrm = std::sqrt(nrm);
    if (!(nrm > 0.0)) return std::numeric_limits<double>::infinity();
    const bool pair = eig.values[j].imag() != 0.0 && j + 1 < m;
    if (!pair) {
      for (std::size_t i = 0; i < m; ++i) xr(i, j) = X(i, j).real() / nrm;
      continue;
    }
    const double s = std::sqrt(2.0) / nrm;
    for (std::size_t i = 0; i < m; ++i) {
      xr(i, j) = s * X(i, j).real();
      xr(i, j + 1) = s * X(i, j).imag();
    }
    ++j;
  }
  try {
    return condition_2(xr);
  } catch (const Singular&) {
    return std::numeric_limits<double>::infinity();
  }
}

double compute_nu(const Matrix& K) {
  const double fro = frobenius_norm(K);
  if (!(fro > 0.0)) return 0.0;
  const Matrix comm = mul_tn(K, K) - mul_nt(K, K);
  return std::sqrt(frobenius_norm(comm)) / fro;
}

double nu_bound(const KMatrixReport& rep) {
  const double fro = frobenius_norm(rep.K);
  if (!(fro > 0.0)) return 0.0;
  const std::size_t l = rep.Q.cols(), m = rep.K.rows();
  const double r = static_cast<double>(std::min(l, m - l));
  return std::pow(8.0 * r, 0.25) * rep.norm_numeric / fro;
}

DiagnosticsReport diagnose(const KMatrixReport& rep, double kappa) {
  DiagnosticsReport out;
  out.kappa = kappa;
  out.beta = rep.beta;
  out.gamma = rep.gamma;
  out.a = rep.norm_closed_form;
  out.norm_K = rep.norm_numeric;
  const EigenPairs eig = gen_eig(rep.K, true);
  out.eigenvalues = eig.values;
  const auto d = compute_delta(rep, eig.values);
  out.delta = d.delta;
  out.delta_lb = d.delta_lb;
  out.kappa_X = compute_kappa_X(eig);
  if (!std::isfinite(out.kappa_X)) out.warning = "K numerically defective; kappa_X reported as inf";
  out.nu = compute_nu(rep.K);
  out.nu_bound = nu_bound(rep);
  return out;
}

DiagnosticsReport diagnose(const EcqpProblem& prob, double beta) {
  const ProblemFactors factors(prob);
  return diagnose(build_K(factors, prob.B, beta), factors.constants().kappa);
}

DiagnosticsReport diagnose(const EcqpProblem& prob) {
  const ProblemFactors factors(prob);
  const auto& sc = factors.constants();
  return diagnose(build_K(factors, prob.B, optimal_beta(sc)), sc.kappa);
}

void write_diagnostics_csv_header(std::ostream& os) {
  os << "kappa,beta,normK,delta,delta_lb,kappa_X,nu\n";
}

void write_diagnostics_csv_row(std::ostream& os, const DiagnosticsReport& rep) {
  os << format_double(rep.kappa) << ',' << format_double(rep.beta) << ','
     << format_double(rep.norm_K) << ',' << format_double(rep.delta) << ','
     << format_double(rep.delta_lb) << ',' << format_double(rep.kappa_X) << ','
     << format_double(rep.nu) << '\n';
}

void write_eigenvalue_scatter(std::ostream& os, const std::vector<Complex>& eigs) {
  for (const auto& z : eigs) os << format_double(z.real()) << ' ' << format_double(z.imag()) << '\n';
}

double chebyshev_inverse(std::size_t k, double x) {
  if (!(std::abs(x) >= 1.0)) throw std::invalid_argument("chebyshev_inverse needs |x| >= 1");
  if (std::isinf(x)) return k == 0 ? 1.0 : 0.0;
  double prev = 1.0, cur = x;
  if (k == 0) return 1.0;
  for (std::size_t i = 1; i < k; ++i) {
    const double next = 2.0 * x * cur - prev;
    prev = cur;
    cur = next;
    if (std::isinf(cur)) return 0.0;
  }
  return 1.0 / std::abs(cur);
}

BoundCurves bound_curves(double gamma, double delta, std::size_t k_max) {
  if (!(gamma >= 1.0) || !std::isfinite(gamma))
    throw std::invalid_argument("gamma must be finite and >= 1 (disk radius below 1)");
  if (!(delta > 0.0 && delta <= 2.0)) throw std::invalid_argument("delta must lie in (0, 2]");
  const double a = (gamma - 1.0) / (gamma + 1.0);
  const double sg = std::sqrt(gamma);
  const double cheb_rate = (sg - 1.0) / (sg + 1.0);
  BoundCurves c;
  for (std::size_t k = 0; k <= k_max; ++k) {
    const double kk = static_cast<double>(k);
    const double k2 = std::max(kk - 2.0, 0.0);
    c.admm.push_back(std::pow(gamma / (gamma + 1.0), k2));
    c.worst_case.push_back(std::pow(a, k2));
    c.chebyshev.push_back(
        chebyshev_inverse(k, a > 0.0 ? 1.0 / a : std::numeric_limits<double>::infinity()));
    c.chebyshev_bound.push_back(2.0 * std::pow(cheb_rate, kk));
    c.disk_segment.push_back(std::pow(cheb_rate, delta * k2 / 6.0));
    c.outlier.push_back(std::pow(1.0 - delta / 2.0, kk / 2.0));
  }
  return c;
}

Matrix dense_iteration_matrix(const EcqpProblem& prob, double beta) {
  const KktSystem kkt = assemble_kkt(prob, beta);
  return Lu(kkt.M).solve(kkt.N);
}

double multiset_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (const auto& z : a) {
    std::size_t best = b.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(z - b[j]);
      if (d < best_d) best_d = d, best = j;
    }
    used[best] = true;
    worst = std::max(worst, best_d);
  }
  return worst;
}

SpectrumTransfer spectrum_transfer(const EcqpProblem& prob, double beta, double zero_tol) {
  const auto g_eigs = gen_eig(dense_iteration_matrix(prob, beta), false).values;
  std::vector<Complex> nonzero;
  for (const auto& z : g_eigs)
    if (std::abs(z) > zero_tol) nonzero.push_back(z);
  const auto k_eigs = gen_eig(build_K(prob, beta).K, false).values;
  std::vector<Complex> shifted;
  for (const auto& z : k_eigs) shifted.push_back(0.5 + 0.5 * z);
  SpectrumTransfer out;
  out.nonzero_count = nonzero.size();
  out.m = prob.m();
  out.distance = multiset_distance(nonzero, shifted);
  return out;
}

}  // namespace admmgmres
