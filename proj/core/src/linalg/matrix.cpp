#include "admmgmres/linalg/matrix.hpp"

#include <algorithm>

namespace admmgmres::linalg {

void gemv(const Matrix& m, std::span<const double> x, std::span<double> y) {
  assert(x.size() == m.cols() && y.size() == m.rows());
  const std::size_t nc = m.cols();
  const double* a = m.data();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* ri = a + i * nc;
    double s = 0.0;
    for (std::size_t j = 0; j < nc; ++j) s += ri[j] * x[j];
    y[i] = s;
  }
}

void gemv_add(double alpha, const Matrix& m, std::span<const double> x,
              std::span<double> y) {
  assert(x.size() == m.cols() && y.size() == m.rows());
  const std::size_t nc = m.cols();
  const double* a = m.data();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* ri = a + i * nc;
    double s = 0.0;
    for (std::size_t j = 0; j < nc; ++j) s += ri[j] * x[j];
    y[i] += alpha * s;
  }
}

void gemv_t(const Matrix& m, std::span<const double> x, std::span<double> y) {
  std::fill(y.begin(), y.end(), 0.0);
  gemv_t_add(1.0, m, x, y);
}

void gemv_t_add(double alpha, const Matrix& m, std::span<const double> x,
                std::span<double> y) {
  assert(x.size() == m.rows() && y.size() == m.cols());
  const std::size_t nc = m.cols();
  const double* a = m.data();
  double* yp = y.data();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double xi = alpha * x[i];
    if (xi == 0.0) continue;
    const double* ri = a + i * nc;
    for (std::size_t j = 0; j < nc; ++j) yp[j] += xi * ri[j];
  }
}

Vector operator*(const Matrix& m, std::span<const double> x) {
  if (x.size() != m.cols()) throw DimensionError("gemv: dimension mismatch");
  Vector y(m.rows());
  gemv(m, x, y);
  return y;
}

Vector mul_t(const Matrix& m, std::span<const double> x) {
  if (x.size() != m.rows()) throw DimensionError("gemv_t: dimension mismatch");
  Vector y(m.cols());
  gemv_t(m, x, y);
  return y;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("gemm: inner dimension mismatch");
  Matrix c(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* ci = c.row(i).data();
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* bk = b.row(k).data();
      for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

Matrix mul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw DimensionError("gemm_tn: dimension mismatch");
  Matrix c(a.cols(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const double* ak = a.row(k).data();
    const double* bk = b.row(k).data();
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = ak[i];
      if (aki == 0.0) continue;
      double* ci = c.row(i).data();
      for (std::size_t j = 0; j < n; ++j) ci[j] += aki * bk[j];
    }
  }
  return c;
}

Matrix mul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw DimensionError("gemm_nt: dimension mismatch");
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto ai = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) c(i, j) = dot(ai, b.row(j));
  }
  return c;
}

ComplexMatrix to_complex(const Matrix& m) {
  ComplexMatrix c(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) c(i, j) = m(i, j);
  return c;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("gemm: inner dimension mismatch");
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

double norm_inf(const Matrix& m) {
  double best = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (double v : m.row(i)) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

double asymmetry(const Matrix& m) {
  if (!m.is_square()) throw DimensionError("asymmetry: matrix not square");
  double best = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += std::abs(m(i, j) - m(j, i));
    best = std::max(best, s);
  }
  return best;
}

Matrix symmetrized(const Matrix& m) {
  if (!m.is_square()) throw DimensionError("symmetrized: matrix not square");
  Matrix s(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) s(i, j) = 0.5 * (m(i, j) + m(j, i));
  return s;
}

bool all_finite(const Matrix& m) {
  return all_finite(std::span<const double>(m.values()));
}

}  // namespace admmgmres::linalg
