#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <utility>

#include "admmgmres/admm.hpp"
#include "admmgmres/linalg/matrix.hpp"
#include "admmgmres/solve_report.hpp"

namespace admmgmres {

/// Matrix-free square operator. apply must be linear and safe to call
/// concurrently on distinct buffers.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual std::size_t dim() const = 0;
  /// out = Op * in; buffers must not alias.
  virtual void apply(std::span<const double> in, std::span<double> out) const = 0;

  Vector apply(std::span<const double> in) const {
    Vector out(dim());
    apply(in, out);
    return out;
  }
};

/// Adapts a callable to LinearOperator.
class FunctionOperator final : public LinearOperator {
 public:
  using Fn = std::function<void(std::span<const double>, std::span<double>)>;
  FunctionOperator(std::size_t dim, Fn fn) : dim_(dim), fn_(std::move(fn)) {}
  std::size_t dim() const override { return dim_; }
  using LinearOperator::apply;
  void apply(std::span<const double> in, std::span<double> out) const override {
    fn_(in, out);
  }

 private:
  std::size_t dim_;
  Fn fn_;
};

/// Dense matrix as a LinearOperator.
class MatrixOperator final : public LinearOperator {
 public:
  explicit MatrixOperator(Matrix m);
  std::size_t dim() const override { return m_.rows(); }
  using LinearOperator::apply;
  void apply(std::span<const double> in, std::span<double> out) const override;
  const Matrix& matrix() const noexcept { return m_; }

 private:
  Matrix m_;
};

/// Dense matrix of an operator, column by column (for tests and diagnostics).
Matrix to_dense(const LinearOperator& op);

struct KrylovConfig {
  /// Relative residual target.
  double tol = 1e-6;
  std::size_t max_iters = 1000;
  /// Restart period p for GMRES; absent means full GMRES.
  std::optional<std::size_t> restart;
  /// Restarted GMRES reports `stalled` when a full cycle reduces the residual
  /// by less than this fraction.
  double stall_reduction = 1e-3;

  void validate() const;
};

/// Optional inputs shared by the Krylov solvers.
struct KrylovOptions {
  /// Applies M^{-1}. GMRES uses it on the right (it then minimizes the
  /// unpreconditioned residual); MINRES and CR require it SPD.
  const LinearOperator* preconditioner = nullptr;
  /// Initial guess; zero when absent.
  std::optional<Vector> x0;
  /// When set, called with the current iterate after every iteration. Its
  /// value replaces the native relative residual as the gating residual
  /// (recorded in residual_history and compared against tol).
  std::function<double(std::span<const double>)> monitor;
  /// Label stored in SolveReport::metric when a monitor is used.
  std::string monitor_name = "monitor";
};

/// GMRES with modified Gram-Schmidt Arnoldi (one reorthogonalization pass when
/// orthogonality loss exceeds 1e-8) and Givens rotations. At iteration k the
/// iterate minimizes ||b - Op x|| over x0 + K_k. SolveReport::mmetric_history
/// carries the native residual norm ||b - Op x_k|| (absolute). With
/// cfg.restart set this dispatches to gmres_restarted.
std::pair<Vector, SolveReport> gmres(const LinearOperator& op, std::span<const double> b,
                                     const KrylovConfig& cfg,
                                     const KrylovOptions& opts = {});

/// Cycles of cfg.restart GMRES iterations, each started from the previous
/// cycle's final iterate.
std::pair<Vector, SolveReport> gmres_restarted(const LinearOperator& op,
                                               std::span<const double> b,
                                               const KrylovConfig& cfg,
                                               const KrylovOptions& opts = {});

/// Preconditioned MINRES for symmetric (possibly indefinite) operators. The
/// native residual is measured in the M^{-1} norm. Throws
/// std::invalid_argument if a random symmetry probe fails.
std::pair<Vector, SolveReport> minres(const LinearOperator& op, std::span<const double> b,
                                      const KrylovConfig& cfg,
                                      const KrylovOptions& opts = {});

/// Preconditioned conjugate residuals for SPD operators. The native residual
/// is measured in the M^{-1} norm. Breakdown (non-positive denominator)
/// throws linalg::LinalgError naming the iteration.
std::pair<Vector, SolveReport> conjugate_residuals(const LinearOperator& op,
                                                   std::span<const double> b,
                                                   const KrylovConfig& cfg,
                                                   const KrylovOptions& opts = {});

/// The linear operator I - G of an affine map T, evaluated as
/// h - [T(u0 + h) - T(u0)] around a fixed base point u0.
class FixedPointDefect final : public LinearOperator {
 public:
  FixedPointDefect(const FixedPointMap& map, Vector u0);
  std::size_t dim() const override { return map_.dim(); }
  using LinearOperator::apply;
  void apply(std::span<const double> h, std::span<double> out) const override;
  /// T(u0), computed once.
  const Vector& t_u0() const noexcept { return t_u0_; }

 private:
  const FixedPointMap& map_;
  Vector u0_;
  Vector t_u0_;
};

/// GMRES-accelerated fixed-point iteration: with r = u0 - T(u0), solve
/// (I - G) du = r by GMRES and return u0 - du. Convergence is gated on the
/// map's saddle residual; mmetric_history is ||u_k - T(u_k)||, which GMRES
/// minimizes. With cfg.restart each cycle restarts from the current iterate.
/// With exact_mmetric the M-metric is evaluated as ||u_k - T(u_k)|| directly
/// (one extra map application per iteration) instead of taken from the Givens
/// recurrence.
std::pair<Vector, SolveReport> admm_gmres(const FixedPointMap& map,
                                          std::span<const double> u0,
                                          const KrylovConfig& cfg,
                                          bool exact_mmetric = false);

}  // namespace admmgmres
