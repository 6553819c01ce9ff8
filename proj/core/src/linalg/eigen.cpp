// Dense eigensolvers. The symmetric path is the classic tred2/tql2 pair; the
// nonsymmetric path is orthes/hqr2 (Householder to Hessenberg form, Francis
// double-shift QR, then back substitution for the eigenvectors), both in the
// EISPACK lineage.
#include "admmgmres/linalg/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "admmgmres/linalg/decompositions.hpp"

namespace admmgmres::linalg {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Reduces symmetric V (in place) to tridiagonal form; on exit V holds the
// accumulated orthogonal transform, d the diagonal and e the subdiagonal.
void tridiagonalize(Matrix& v, Vector& d, Vector& e) {
  const std::size_t n = v.rows();
  for (std::size_t j = 0; j < n; ++j) d[j] = v(n - 1, j);

  for (std::size_t i = n - 1; i > 0; --i) {
    double scale = 0.0, h = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    } else {
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        v(j, i) = f;
        g = e[j] + v(j, j) * f;
        for (std::size_t k = j + 1; k + 1 <= i; ++k) {
          g += v(k, j) * d[k];
          e[k] += v(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (std::size_t k = j; k + 1 <= i; ++k) v(k, j) -= (f * e[k] + g * d[k]);
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  for (std::size_t i = 0; i + 1 < n; ++i) {
    v(n - 1, i) = v(i, i);
    v(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (std::size_t k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
      for (std::size_t j = 0; j <= i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
        for (std::size_t k = 0; k <= i; ++k) v(k, j) -= g * d[k];
      }
    }
    for (std::size_t k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = v(n - 1, j);
    v(n - 1, j) = 0.0;
  }
  v(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

// Implicit QL iteration on the tridiagonal (d, e), rotating the columns of V.
void tridiagonal_ql(Matrix& v, Vector& d, Vector& e) {
  const std::size_t n = v.rows();
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  double f = 0.0, tst1 = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n) {
      if (std::abs(e[m]) <= kEps * tst1) break;
      ++m;
    }
    if (m == n) m = n - 1;
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > 60) throw NoConvergence("sym_eig: QL iteration did not converge");
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0, c2 = c, c3 = c;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t i = m; i-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          for (std::size_t k = 0; k < n; ++k) {
            h = v(k, i + 1);
            v(k, i + 1) = s * v(k, i) + c * h;
            v(k, i) = c * v(k, i) - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > kEps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

// Householder reduction to upper Hessenberg form; accumulates the transform
// into V when requested.
void hessenberg(Matrix& h, Matrix& v, bool accumulate) {
  const std::size_t n = h.rows();
  if (n < 3) {
    if (accumulate) v = Matrix::identity(n);
    return;
  }
  const std::size_t high = n - 1;
  Vector ort(n, 0.0);
  for (std::size_t m = 1; m + 1 <= high; ++m) {
    double scale = 0.0;
    for (std::size_t i = m; i <= high; ++i) scale += std::abs(h(i, m - 1));
    if (scale == 0.0) continue;
    double hh = 0.0;
    for (std::size_t i = high + 1; i-- > m;) {
      ort[i] = h(i, m - 1) / scale;
      hh += ort[i] * ort[i];
    }
    double g = std::sqrt(hh);
    if (ort[m] > 0) g = -g;
    hh -= ort[m] * g;
    ort[m] -= g;

    for (std::size_t j = m; j < n; ++j) {
      double f = 0.0;
      for (std::size_t i = high + 1; i-- > m;) f += ort[i] * h(i, j);
      f /= hh;
      for (std::size_t i = m; i <= high; ++i) h(i, j) -= f * ort[i];
    }
    for (std::size_t i = 0; i <= high; ++i) {
      double f = 0.0;
      for (std::size_t j = high + 1; j-- > m;) f += ort[j] * h(i, j);
      f /= hh;
      for (std::size_t j = m; j <= high; ++j) h(i, j) -= f * ort[j];
    }
    ort[m] *= scale;
    h(m, m - 1) = scale * g;
  }

  if (!accumulate) return;
  v = Matrix::identity(n);
  for (std::size_t m = high - 1; m >= 1; --m) {
    if (h(m, m - 1) != 0.0) {
      for (std::size_t i = m + 1; i <= high; ++i) ort[i] = h(i, m - 1);
      for (std::size_t j = m; j <= high; ++j) {
        double g = 0.0;
        for (std::size_t i = m; i <= high; ++i) g += ort[i] * v(i, j);
        g = (g / ort[m]) / h(m, m - 1);
        for (std::size_t i = m; i <= high; ++i) v(i, j) += g * ort[i];
      }
    }
    if (m == 1) break;
  }
}

Complex cdiv(double xr, double xi, double yr, double yi) {
  double r, d;
  if (std::abs(yr) > std::abs(yi)) {
    r = yi / yr;
    d = yr + r * yi;
    return {(xr + r * xi) / d, (xi - r * xr) / d};
  }
  r = yr / yi;
  d = yi + r * yr;
  return {(r * xr + xi) / d, (r * xi - xr) / d};
}

// Francis double-shift QR on Hessenberg H. On exit (d, e) hold real and
// imaginary parts of the eigenvalues; with vectors, V holds real Schur-based
// eigenvector columns (complex pairs split as real/imaginary columns).
void hessenberg_qr(Matrix& h, Matrix& v, Vector& d, Vector& e, bool vectors) {
  const int nn = static_cast<int>(h.rows());
  int n = nn - 1;
  const int low = 0, high = nn - 1;
  double exshift = 0.0;
  double p = 0, q = 0, r = 0, s = 0, z = 0, t, w, x, y;

  double norm = 0.0;
  for (int i = 0; i < nn; ++i)
    for (int j = std::max(i - 1, 0); j < nn; ++j) norm += std::abs(h(i, j));

  int iter = 0, total_iter = 0;
  const int max_total = 100 * std::max(nn, 1);
  while (n >= low) {
    int l = n;
    while (l > low) {
      s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
      if (s == 0.0) s = norm;
      if (std::abs(h(l, l - 1)) < kEps * s) break;
      --l;
    }

    if (l == n) {
      h(n, n) += exshift;
      d[n] = h(n, n);
      e[n] = 0.0;
      --n;
      iter = 0;
    } else if (l == n - 1) {
      w = h(n, n - 1) * h(n - 1, n);
      p = (h(n - 1, n - 1) - h(n, n)) / 2.0;
      q = p * p + w;
      z = std::sqrt(std::abs(q));
      h(n, n) += exshift;
      h(n - 1, n - 1) += exshift;
      x = h(n, n);
      if (q >= 0) {
        z = (p >= 0) ? p + z : p - z;
        d[n - 1] = x + z;
        d[n] = d[n - 1];
        if (z != 0.0) d[n] = x - w / z;
        e[n - 1] = 0.0;
        e[n] = 0.0;
        x = h(n, n - 1);
        s = std::abs(x) + std::abs(z);
        p = x / s;
        q = z / s;
        r = std::sqrt(p * p + q * q);
        p /= r;
        q /= r;
        for (int j = n - 1; j < nn; ++j) {
          z = h(n - 1, j);
          h(n - 1, j) = q * z + p * h(n, j);
          h(n, j) = q * h(n, j) - p * z;
        }
        for (int i = 0; i <= n; ++i) {
          z = h(i, n - 1);
          h(i, n - 1) = q * z + p * h(i, n);
          h(i, n) = q * h(i, n) - p * z;
        }
        if (vectors) {
          for (int i = low; i <= high; ++i) {
            z = v(i, n - 1);
            v(i, n - 1) = q * z + p * v(i, n);
            v(i, n) = q * v(i, n) - p * z;
          }
        }
      } else {
        d[n - 1] = x + p;
        d[n] = x + p;
        e[n - 1] = z;
        e[n] = -z;
      }
      n -= 2;
      iter = 0;
    } else {
      x = h(n, n);
      y = 0.0;
      w = 0.0;
      if (l < n) {
        y = h(n - 1, n - 1);
        w = h(n, n - 1) * h(n - 1, n);
      }
      // Exceptional shifts break cycles.
      if (iter == 10) {
        exshift += x;
        for (int i = low; i <= n; ++i) h(i, i) -= x;
        s = std::abs(h(n, n - 1)) + std::abs(h(n - 1, n - 2));
        x = y = 0.75 * s;
        w = -0.4375 * s * s;
      }
      if (iter == 30) {
        s = (y - x) / 2.0;
        s = s * s + w;
        if (s > 0) {
          s = std::sqrt(s);
          if (y < x) s = -s;
          s = x - w / ((y - x) / 2.0 + s);
          for (int i = low; i <= n; ++i) h(i, i) -= s;
          exshift += s;
          x = y = w = 0.964;
        }
      }
      ++iter;
      if (++total_iter > max_total) {
        throw NoConvergence("gen_eig: QR iteration did not converge");
      }

      int m = n - 2;
      while (m >= l) {
        z = h(m, m);
        r = x - z;
        s = y - z;
        p = (r * s - w) / h(m + 1, m) + h(m, m + 1);
        q = h(m + 1, m + 1) - z - r - s;
        r = h(m + 2, m + 1);
        s = std::abs(p) + std::abs(q) + std::abs(r);
        p /= s;
        q /= s;
        r /= s;
        if (m == l) break;
        if (std::abs(h(m, m - 1)) * (std::abs(q) + std::abs(r)) <
            kEps * (std::abs(p) * (std::abs(h(m - 1, m - 1)) + std::abs(z) +
                                   std::abs(h(m + 1, m + 1))))) {
          break;
        }
        --m;
      }
      for (int i = m + 2; i <= n; ++i) {
        h(i, i - 2) = 0.0;
        if (i > m + 2) h(i, i - 3) = 0.0;
      }

      for (int k = m; k <= n - 1; ++k) {
        const bool notlast = (k != n - 1);
        if (k != m) {
          p = h(k, k - 1);
          q = h(k + 1, k - 1);
          r = notlast ? h(k + 2, k - 1) : 0.0;
          x = std::abs(p) + std::abs(q) + std::abs(r);
          if (x == 0.0) continue;
          p /= x;
          q /= x;
          r /= x;
        }
        s = std::sqrt(p * p + q * q + r * r);
        if (p < 0) s = -s;
        if (s != 0) {
          if (k != m) {
            h(k, k - 1) = -s * x;
          } else if (l != m) {
            h(k, k - 1) = -h(k, k - 1);
          }
          p += s;
          x = p / s;
          y = q / s;
          z = r / s;
          q /= p;
          r /= p;
          for (int j = k; j < nn; ++j) {
            p = h(k, j) + q * h(k + 1, j);
            if (notlast) {
              p += r * h(k + 2, j);
              h(k + 2, j) -= p * z;
            }
            h(k, j) -= p * x;
            h(k + 1, j) -= p * y;
          }
          for (int i = 0; i <= std::min(n, k + 3); ++i) {
            p = x * h(i, k) + y * h(i, k + 1);
            if (notlast) {
              p += z * h(i, k + 2);
              h(i, k + 2) -= p * r;
            }
            h(i, k) -= p;
            h(i, k + 1) -= p * q;
          }
          if (vectors) {
            for (int i = low; i <= high; ++i) {
              p = x * v(i, k) + y * v(i, k + 1);
              if (notlast) {
                p += z * v(i, k + 2);
                v(i, k + 2) -= p * r;
              }
              v(i, k) -= p;
              v(i, k + 1) -= p * q;
            }
          }
        }
      }
    }
  }

  if (!vectors || norm == 0.0) return;

  // Back substitution: eigenvectors of the quasi-triangular Schur form.
  for (n = nn - 1; n >= 0; --n) {
    p = d[n];
    q = e[n];
    if (q == 0) {
      int l = n;
      h(n, n) = 1.0;
      for (int i = n - 1; i >= 0; --i) {
        w = h(i, i) - p;
        r = 0.0;
        for (int j = l; j <= n; ++j) r += h(i, j) * h(j, n);
        if (e[i] < 0.0) {
          z = w;
          s = r;
        } else {
          l = i;
          if (e[i] == 0.0) {
            h(i, n) = (w != 0.0) ? -r / w : -r / (kEps * norm);
          } else {
            x = h(i, i + 1);
            y = h(i + 1, i);
            q = (d[i] - p) * (d[i] - p) + e[i] * e[i];
            t = (x * s - z * r) / q;
            h(i, n) = t;
            h(i + 1, n) = (std::abs(x) > std::abs(z)) ? (-r - w * t) / x
                                                      : (-s - y * t) / z;
          }
          t = std::abs(h(i, n));
          if ((kEps * t) * t > 1) {
            for (int j = i; j <= n; ++j) h(j, n) /= t;
          }
        }
      }
    } else if (q < 0) {
      int l = n - 1;
      if (std::abs(h(n, n - 1)) > std::abs(h(n - 1, n))) {
        h(n - 1, n - 1) = q / h(n, n - 1);
        h(n - 1, n) = -(h(n, n) - p) / h(n, n - 1);
      } else {
        const Complex c = cdiv(0.0, -h(n - 1, n), h(n - 1, n - 1) - p, q);
        h(n - 1, n - 1) = c.real();
        h(n - 1, n) = c.imag();
      }
      h(n, n - 1) = 0.0;
      h(n, n) = 1.0;
      for (int i = n - 2; i >= 0; --i) {
        double ra = 0.0, sa = 0.0;
        for (int j = l; j <= n; ++j) {
          ra += h(i, j) * h(j, n - 1);
          sa += h(i, j) * h(j, n);
        }
        w = h(i, i) - p;
        if (e[i] < 0.0) {
          z = w;
          r = ra;
          s = sa;
        } else {
          l = i;
          if (e[i] == 0) {
            const Complex c = cdiv(-ra, -sa, w, q);
            h(i, n - 1) = c.real();
            h(i, n) = c.imag();
          } else {
            x = h(i, i + 1);
            y = h(i + 1, i);
            double vr = (d[i] - p) * (d[i] - p) + e[i] * e[i] - q * q;
            const double vi = (d[i] - p) * 2.0 * q;
            if (vr == 0.0 && vi == 0.0) {
              vr = kEps * norm *
                   (std::abs(w) + std::abs(q) + std::abs(x) + std::abs(y) + std::abs(z));
            }
            const Complex c =
                cdiv(x * r - z * ra + q * sa, x * s - z * sa - q * ra, vr, vi);
            h(i, n - 1) = c.real();
            h(i, n) = c.imag();
            if (std::abs(x) > (std::abs(z) + std::abs(q))) {
              h(i + 1, n - 1) = (-ra - w * h(i, n - 1) + q * h(i, n)) / x;
              h(i + 1, n) = (-sa - w * h(i, n) - q * h(i, n - 1)) / x;
            } else {
              const Complex c2 = cdiv(-r - y * h(i, n - 1), -s - y * h(i, n), z, q);
              h(i + 1, n - 1) = c2.real();
              h(i + 1, n) = c2.imag();
            }
          }
          t = std::max(std::abs(h(i, n - 1)), std::abs(h(i, n)));
          if ((kEps * t) * t > 1) {
            for (int j = i; j <= n; ++j) {
              h(j, n - 1) /= t;
              h(j, n) /= t;
            }
          }
        }
      }
    }
  }

  // Back-transform to eigenvectors of the original matrix.
  for (int j = nn - 1; j >= low; --j) {
    for (int i = low; i <= high; ++i) {
      z = 0.0;
      for (int k = low; k <= std::min(j, high); ++k) z += v(i, k) * h(k, j);
      v(i, j) = z;
    }
  }
}

}  // namespace

Matrix SymmetricEigenPairs::reconstruct() const {
  const std::size_t n = values.size();
  Matrix scaled = vectors;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scaled(i, j) *= values[j];
  return mul_nt(scaled, vectors);
}

SymmetricEigenPairs sym_eig(const Matrix& m) {
  Matrix v = checked_symmetric(m);
  const std::size_t n = v.rows();
  if (n == 0) return {};
  Vector d(n), e(n);
  if (n == 1) return {{v(0, 0)}, Matrix::identity(1)};
  tridiagonalize(v, d, e);
  tridiagonal_ql(v, d, e);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  SymmetricEigenPairs out{Vector(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = d[order[k]];
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

EigenPairs gen_eig(const Matrix& m, bool want_vectors) {
  if (!m.is_square()) throw DimensionError("gen_eig: matrix not square");
  if (!all_finite(m)) throw LinalgError("gen_eig: non-finite entries");
  const std::size_t n = m.rows();
  EigenPairs out;
  if (n == 0) return out;

  Matrix h = m;
  Matrix v;
  hessenberg(h, v, want_vectors);
  Vector d(n, 0.0), e(n, 0.0);
  hessenberg_qr(h, v, d, e, want_vectors);

  out.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.values[k] = {d[k], e[k]};
  // Pair conjugates exactly.
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (e[k] > 0.0 && e[k + 1] < 0.0) {
      out.values[k + 1] = std::conj(out.values[k]);
      ++k;
    }
  }
  if (!want_vectors) return out;

  ComplexMatrix x(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    if (e[k] == 0.0) {
      for (std::size_t i = 0; i < n; ++i) x(i, k) = v(i, k);
    } else if (e[k] > 0.0 && k + 1 < n) {
      for (std::size_t i = 0; i < n; ++i) {
        x(i, k) = {v(i, k), v(i, k + 1)};
        x(i, k + 1) = {v(i, k), -v(i, k + 1)};
      }
      ++k;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::norm(x(i, k));
    s = std::sqrt(s);
    if (s > 0.0)
      for (std::size_t i = 0; i < n; ++i) x(i, k) /= s;
  }
  out.vectors = std::move(x);
  return out;
}

}  // namespace admmgmres::linalg
