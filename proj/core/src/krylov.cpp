#include "admmgmres/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "admmgmres/linalg/random.hpp"

namespace admmgmres {

using namespace linalg;

MatrixOperator::MatrixOperator(Matrix m) : m_(std::move(m)) {
  if (!m_.is_square()) throw DimensionError("MatrixOperator requires a square matrix");
}

void MatrixOperator::apply(std::span<const double> in, std::span<double> out) const {
  gemv(m_, in, out);
}

Matrix to_dense(const LinearOperator& op) {
  const std::size_t n = op.dim();
  Matrix out(n, n);
  Vector e(n, 0.0), col(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    op.apply(e, col);
    e[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) out(i, j) = col[i];
  }
  return out;
}

void KrylovConfig::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (restart && *restart < 1) throw std::invalid_argument("restart must be >= 1");
  if (!(stall_reduction >= 0.0 && stall_reduction < 1.0))
    throw std::invalid_argument("stall_reduction must lie in [0, 1)");
}

namespace {

constexpr double kReorthThreshold = 1e-8;
// A cycle whose recursive residual estimate has fallen this far below its
// starting residual has reached working precision; further Arnoldi steps
// cannot lower the true residual, so the cycle ends and the caller restarts
// from a recomputed residual.
constexpr double kEstimateFloor = 1e-14;

bool finite(std::span<const double> v) { return all_finite(v); }

/// Per-iterate callback: given the current iterate (empty span if the hook
/// does not need it) and the native residual norm, returns the gating
/// residual and the value to log as M-metric.
struct IterateHook {
  bool needs_x = false;
  std::function<std::pair<double, double>(std::span<const double>, double)> eval;
};

enum class CycleEnd { gate_met, breakdown, exhausted, failed };

struct CycleResult {
  Vector x;
  std::size_t steps = 0;
  double native = 0.0;  // final native residual norm
  CycleEnd end = CycleEnd::exhausted;
  std::string message;
};

void check_dims(const LinearOperator& op, std::span<const double> b,
                const KrylovOptions& opts) {
  if (b.size() != op.dim()) throw DimensionError("rhs length does not match operator");
  if (opts.x0 && opts.x0->size() != op.dim())
    throw DimensionError("x0 length does not match operator");
  if (opts.preconditioner && opts.preconditioner->dim() != op.dim())
    throw DimensionError("preconditioner dimension does not match operator");
}

// x0 + Z y with y solving the leading k x k triangle of R y = g.
Vector form_solution(const Vector& x0, const std::vector<Vector>& z,
                     const std::vector<Vector>& r, const Vector& g, std::size_t k) {
  Vector y(k);
  for (std::size_t ii = k; ii-- > 0;) {
    double s = g[ii];
    for (std::size_t jj = ii + 1; jj < k; ++jj) s -= r[jj][ii] * y[jj];
    y[ii] = s / r[ii][ii];
  }
  Vector x = x0;
  for (std::size_t jj = 0; jj < k; ++jj) axpy(y[jj], z[jj], x);
  return x;
}

// One GMRES cycle of at most max_steps Arnoldi steps from x0. Appends one
// entry per step to the report histories. The preconditioner, if any, is
// applied on the right: Op M^{-1} t = r0, x = x0 + M^{-1} t.
CycleResult gmres_cycle(const LinearOperator& op, std::span<const double> b, Vector x0,
                        std::size_t max_steps, double tol,
                        const LinearOperator* precond, const IterateHook& hook,
                        SolveReport& rep, std::size_t iteration_offset) {
  const std::size_t n = op.dim();
  CycleResult res;
  Vector r0(b.begin(), b.end());
  {
    const Vector ax = op.apply(x0);
    axpy(-1.0, ax, r0);
  }
  const double beta0 = norm2(r0);
  res.native = beta0;
  if (beta0 == 0.0 || max_steps == 0) {
    res.x = std::move(x0);
    res.end = beta0 == 0.0 ? CycleEnd::breakdown : CycleEnd::exhausted;
    return res;
  }
  const std::size_t cap = std::min(max_steps, n);
  std::vector<Vector> v;  // orthonormal Arnoldi basis
  std::vector<Vector> z;  // M^{-1} v (aliases v without a preconditioner)
  std::vector<Vector> r;  // columns of the rotated Hessenberg matrix
  Vector cs, sn, g{beta0};
  v.reserve(cap + 1);
  r.reserve(cap);
  v.push_back(r0);
  scale(1.0 / beta0, v.back());
  Vector w(n);

  for (std::size_t j = 0; j < cap; ++j) {
    if (precond) {
      z.push_back(precond->apply(v[j]));
      op.apply(z[j], w);
    } else {
      op.apply(v[j], w);
    }
    if (!finite(w)) {
      res.end = CycleEnd::failed;
      res.message = "non-finite operator output at iteration " +
                    std::to_string(iteration_offset + j + 1);
      res.x = std::move(x0);
      return res;
    }
    const double w_before = norm2(w);
    Vector h(j + 2, 0.0);
    for (std::size_t i = 0; i <= j; ++i) {
      h[i] = dot(v[i], w);
      axpy(-h[i], v[i], w);
    }
    double w_norm = norm2(w);
    {
      double loss = 0.0;
      for (std::size_t i = 0; i <= j; ++i) loss = std::max(loss, std::abs(dot(v[i], w)));
      if (w_norm > 0.0 && loss > kReorthThreshold * w_norm) {
        for (std::size_t i = 0; i <= j; ++i) {
          const double c = dot(v[i], w);
          h[i] += c;
          axpy(-c, v[i], w);
        }
        w_norm = norm2(w);
      }
    }
    h[j + 1] = w_norm;
    for (std::size_t i = 0; i < j; ++i) {
      const double t = cs[i] * h[i] + sn[i] * h[i + 1];
      h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
      h[i] = t;
    }
    const double denom = std::hypot(h[j], h[j + 1]);
    double c = 1.0, s = 0.0;
    if (denom > 0.0) {
      c = h[j] / denom;
      s = h[j + 1] / denom;
    }
    cs.push_back(c);
    sn.push_back(s);
    h[j] = denom;
    h[j + 1] = 0.0;
    g.push_back(-s * g[j]);
    g[j] = c * g[j];
    h.resize(j + 1);
    r.push_back(std::move(h));
    res.native = std::abs(g[j + 1]);
    res.steps = j + 1;

    const bool breakdown =
        w_norm <= 1e-14 * w_before || denom == 0.0 || res.native <= kEstimateFloor * beta0;
    if (denom == 0.0) {
      // Singular Hessenberg: the least-squares problem has no unique solution.
      res.end = CycleEnd::failed;
      res.message = "singular Hessenberg at iteration " + std::to_string(iteration_offset + j + 1);
      r.pop_back();
      res.steps = j;
      res.x = form_solution(x0, precond ? z : v, r, g, j);
      return res;
    }
    Vector x;
    if (hook.needs_x) x = form_solution(x0, precond ? z : v, r, g, j + 1);
    const auto [gate, mm] = hook.eval(x, res.native);
    rep.residual_history.push_back(gate);
    rep.mmetric_history.push_back(mm);
    if (!std::isfinite(gate)) {
      res.end = CycleEnd::failed;
      res.message = "non-finite residual at iteration " + std::to_string(iteration_offset + j + 1);
      res.x = hook.needs_x ? std::move(x) : form_solution(x0, precond ? z : v, r, g, j + 1);
      return res;
    }
    if (gate <= tol || breakdown) {
      res.end = gate <= tol ? CycleEnd::gate_met : CycleEnd::breakdown;
      res.x = hook.needs_x ? std::move(x) : form_solution(x0, precond ? z : v, r, g, j + 1);
      return res;
    }
    v.push_back(w);
    scale(1.0 / w_norm, v.back());
  }
  res.end = CycleEnd::exhausted;
  res.x = form_solution(x0, precond ? z : v, r, g, res.steps);
  return res;
}

// Cycle driver shared by full and restarted GMRES. `period` bounds each
// cycle; full GMRES passes the whole iteration budget and only restarts after
// a breakdown that did not meet the gate.
std::pair<Vector, SolveReport> gmres_driver(const LinearOperator& op,
                                            std::span<const double> b,
                                            const KrylovConfig& cfg,
                                            const KrylovOptions& opts,
                                            std::optional<std::size_t> period) {
  cfg.validate();
  check_dims(op, b, opts);
  const std::size_t n = op.dim();
  SolveReport rep;
  rep.metric = opts.monitor ? opts.monitor_name : "relative residual";
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    rep.residual_history.push_back(0.0);
    rep.mmetric_history.push_back(0.0);
    rep.status = SolveStatus::converged;
    return {Vector(n, 0.0), std::move(rep)};
  }
  IterateHook hook;
  hook.needs_x = static_cast<bool>(opts.monitor);
  hook.eval = [&](std::span<const double> x, double native) {
    return std::pair{opts.monitor ? opts.monitor(x) : native / bnorm, native};
  };

  Vector x = opts.x0 ? *opts.x0 : Vector(n, 0.0);
  {
    Vector r0(b.begin(), b.end());
    axpy(-1.0, op.apply(x), r0);
    const double native = norm2(r0);
    const auto [gate, mm] = hook.eval(x, native);
    rep.residual_history.push_back(gate);
    rep.mmetric_history.push_back(mm);
    if (gate <= cfg.tol) {
      rep.status = SolveStatus::converged;
      return {std::move(x), std::move(rep)};
    }
  }
  while (rep.iterations < cfg.max_iters) {
    const double start = rep.mmetric_history.back();
    const std::size_t budget = cfg.max_iters - rep.iterations;
    const std::size_t steps = period ? std::min(*period, budget) : budget;
    CycleResult cyc = gmres_cycle(op, b, std::move(x), steps, cfg.tol,
                                  opts.preconditioner, hook, rep, rep.iterations);
    x = std::move(cyc.x);
    rep.iterations += cyc.steps;
    if (cyc.end == CycleEnd::gate_met) {
      rep.status = SolveStatus::converged;
      return {std::move(x), std::move(rep)};
    }
    if (cyc.end == CycleEnd::failed) {
      rep.status = SolveStatus::failed;
      rep.message = cyc.message;
      return {std::move(x), std::move(rep)};
    }
    if (cyc.steps == 0) break;
    if (period && cyc.end == CycleEnd::exhausted && cyc.steps == *period &&
        cyc.native > (1.0 - cfg.stall_reduction) * start) {
      rep.status = SolveStatus::stalled;
      return {std::move(x), std::move(rep)};
    }
  }
  rep.status = SolveStatus::max_iters;
  return {std::move(x), std::move(rep)};
}

}  // namespace

std::pair<Vector, SolveReport> gmres(const LinearOperator& op, std::span<const double> b,
                                     const KrylovConfig& cfg, const KrylovOptions& opts) {
  if (cfg.restart) return gmres_restarted(op, b, cfg, opts);
  return gmres_driver(op, b, cfg, opts, std::nullopt);
}

std::pair<Vector, SolveReport> gmres_restarted(const LinearOperator& op,
                                               std::span<const double> b,
                                               const KrylovConfig& cfg,
                                               const KrylovOptions& opts) {
  if (!cfg.restart) throw std::invalid_argument("gmres_restarted requires cfg.restart");
  return gmres_driver(op, b, cfg, opts, cfg.restart);
}

namespace {

void probe_symmetry(const LinearOperator& op, const char* what) {
  const std::size_t n = op.dim();
  Rng rng(0x5eed);
  for (int trial = 0; trial < 2; ++trial) {
    const Vector u = rng.gaussian_vector(n);
    const Vector v = rng.gaussian_vector(n);
    const Vector au = op.apply(u);
    const Vector av = op.apply(v);
    const double lhs = dot(au, v), rhs = dot(u, av);
    const double scale = norm2(au) * norm2(v) + norm2(u) * norm2(av);
    if (std::abs(lhs - rhs) > 1e-8 * scale)
      throw std::invalid_argument(std::string(what) + " failed the symmetry probe");
  }
}

Vector apply_precond(const LinearOperator* m, std::span<const double> r) {
  return m ? m->apply(r) : Vector(r.begin(), r.end());
}

}  // namespace

std::pair<Vector, SolveReport> minres(const LinearOperator& op, std::span<const double> b,
                                      const KrylovConfig& cfg, const KrylovOptions& opts) {
  cfg.validate();
  check_dims(op, b, opts);
  probe_symmetry(op, "MINRES operator");
  if (opts.preconditioner) probe_symmetry(*opts.preconditioner, "MINRES preconditioner");
  const std::size_t n = op.dim();
  const double eps = std::numeric_limits<double>::epsilon();
  SolveReport rep;
  rep.metric = opts.monitor ? opts.monitor_name : "relative preconditioned residual";
  Vector x = opts.x0 ? *opts.x0 : Vector(n, 0.0);
  if (norm2(b) == 0.0) {
    rep.residual_history.push_back(0.0);
    rep.mmetric_history.push_back(0.0);
    rep.status = SolveStatus::converged;
    return {Vector(n, 0.0), std::move(rep)};
  }

  Vector r1(b.begin(), b.end());
  axpy(-1.0, op.apply(x), r1);
  Vector y = apply_precond(opts.preconditioner, r1);
  const double rty = dot(r1, y);
  if (rty < 0.0) throw std::invalid_argument("MINRES preconditioner is not positive definite");
  double beta1 = std::sqrt(rty);
  // Normalize by the preconditioned norm of b so the native residual is relative.
  const Vector mb = apply_precond(opts.preconditioner, b);
  const double bnorm = std::sqrt(std::max(dot(b, mb), 0.0));

  auto gate_of = [&](double native) {
    return opts.monitor ? opts.monitor(x) : native / bnorm;
  };
  rep.residual_history.push_back(gate_of(beta1));
  rep.mmetric_history.push_back(beta1);
  if (rep.residual_history.back() <= cfg.tol || beta1 == 0.0) {
    rep.status = SolveStatus::converged;
    return {std::move(x), std::move(rep)};
  }

  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0;
  Vector w(n, 0.0), w1(n, 0.0), w2(n, 0.0), r2 = r1, v(n);
  for (std::size_t itn = 1; itn <= cfg.max_iters; ++itn) {
    for (std::size_t i = 0; i < n; ++i) v[i] = y[i] / beta;
    y = op.apply(v);
    if (itn >= 2) axpy(-beta / oldb, r1, y);
    const double alfa = dot(v, y);
    axpy(-alfa / beta, r2, y);
    r1 = r2;
    r2 = y;
    y = apply_precond(opts.preconditioner, r2);
    oldb = beta;
    const double r2y = dot(r2, y);
    if (r2y < 0.0) throw std::invalid_argument("MINRES preconditioner is not positive definite");
    beta = std::sqrt(r2y);

    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    const double gamma = std::max(std::hypot(gbar, beta), eps);
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;

    w1 = w2;
    w2 = w;
    for (std::size_t i = 0; i < n; ++i) w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) / gamma;
    axpy(phi, w, x);

    rep.iterations = itn;
    const double gate = gate_of(phibar);
    rep.residual_history.push_back(gate);
    rep.mmetric_history.push_back(phibar);
    if (!std::isfinite(gate) || !finite(x)) {
      rep.status = SolveStatus::failed;
      rep.message = "non-finite value at iteration " + std::to_string(itn);
      return {std::move(x), std::move(rep)};
    }
    if (gate <= cfg.tol || beta == 0.0) {
      rep.status = gate <= cfg.tol ? SolveStatus::converged : SolveStatus::stalled;
      return {std::move(x), std::move(rep)};
    }
  }
  rep.status = SolveStatus::max_iters;
  return {std::move(x), std::move(rep)};
}

std::pair<Vector, SolveReport> conjugate_residuals(const LinearOperator& op,
                                                   std::span<const double> b,
                                                   const KrylovConfig& cfg,
                                                   const KrylovOptions& opts) {
  cfg.validate();
  check_dims(op, b, opts);
  const std::size_t n = op.dim();
  SolveReport rep;
  rep.metric = opts.monitor ? opts.monitor_name : "relative preconditioned residual";
  Vector x = opts.x0 ? *opts.x0 : Vector(n, 0.0);
  if (norm2(b) == 0.0) {
    rep.residual_history.push_back(0.0);
    rep.mmetric_history.push_back(0.0);
    rep.status = SolveStatus::converged;
    return {Vector(n, 0.0), std::move(rep)};
  }
  const Vector mb = apply_precond(opts.preconditioner, b);
  const double bnorm = std::sqrt(std::max(dot(b, mb), 0.0));

  Vector r(b.begin(), b.end());
  axpy(-1.0, op.apply(x), r);
  Vector z = apply_precond(opts.preconditioner, r);
  Vector p = z;
  Vector az = op.apply(z);
  Vector ap = az;
  double rho = dot(z, az);

  auto native_of = [&] { return std::sqrt(std::max(dot(r, z), 0.0)); };
  auto gate_of = [&](double native) {
    return opts.monitor ? opts.monitor(x) : native / bnorm;
  };
  {
    const double native = native_of();
    rep.residual_history.push_back(gate_of(native));
    rep.mmetric_history.push_back(native);
    if (rep.residual_history.back() <= cfg.tol || native == 0.0) {
      rep.status = SolveStatus::converged;
      return {std::move(x), std::move(rep)};
    }
  }
  for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
    const Vector q = apply_precond(opts.preconditioner, ap);
    const double denom = dot(ap, q);
    if (!(denom > 0.0) || !(rho > 0.0))
      throw LinalgError("conjugate residuals breakdown at iteration " + std::to_string(k));
    const double alpha = rho / denom;
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    axpy(-alpha, q, z);
    op.apply(z, az);
    const double rho_new = dot(z, az);
    const double beta = rho_new / rho;
    rho = rho_new;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = z[i] + beta * p[i];
      ap[i] = az[i] + beta * ap[i];
    }
    rep.iterations = k;
    const double native = native_of();
    const double gate = gate_of(native);
    rep.residual_history.push_back(gate);
    rep.mmetric_history.push_back(native);
    if (!std::isfinite(gate)) {
      rep.status = SolveStatus::failed;
      rep.message = "non-finite value at iteration " + std::to_string(k);
      return {std::move(x), std::move(rep)};
    }
    if (gate <= cfg.tol || native == 0.0) {
      rep.status = gate <= cfg.tol ? SolveStatus::converged : SolveStatus::stalled;
      return {std::move(x), std::move(rep)};
    }
  }
  rep.status = SolveStatus::max_iters;
  return {std::move(x), std::move(rep)};
}

FixedPointDefect::FixedPointDefect(const FixedPointMap& map, Vector u0)
    : map_(map), u0_(std::move(u0)), t_u0_(map.apply(u0_)) {}

void FixedPointDefect::apply(std::span<const double> h, std::span<double> out) const {
  Vector shifted = add(u0_, h);
  map_.apply(shifted, out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = h[i] - (out[i] - t_u0_[i]);
}

std::pair<Vector, SolveReport> admm_gmres(const FixedPointMap& map,
                                          std::span<const double> u0,
                                          const KrylovConfig& cfg, bool exact_mmetric) {
  cfg.validate();
  if (u0.size() != map.dim()) throw DimensionError("u0 has the wrong length");
  SolveReport rep;
  rep.metric = "saddle relative residual";
  Vector u(u0.begin(), u0.end());

  {
    const Vector tu = map.apply(u);
    rep.residual_history.push_back(map.saddle_residual(u));
    rep.mmetric_history.push_back(norm2(sub(u, tu)));
    if (rep.residual_history.back() <= cfg.tol || rep.mmetric_history.back() == 0.0) {
      rep.status = rep.residual_history.back() <= cfg.tol ? SolveStatus::converged
                                                          : SolveStatus::stalled;
      return {std::move(u), std::move(rep)};
    }
  }

  while (rep.iterations < cfg.max_iters) {
    const FixedPointDefect defect(map, u);
    const Vector r = sub(u, defect.t_u0());
    const double start = norm2(r);
    IterateHook hook;
    hook.needs_x = true;
    hook.eval = [&](std::span<const double> du, double native) {
      const Vector uk = sub(u, du);
      const double mm = exact_mmetric ? residual_metric(map, uk) : native;
      return std::pair{map.saddle_residual(uk), mm};
    };
    const std::size_t budget = cfg.max_iters - rep.iterations;
    const std::size_t steps = cfg.restart ? std::min(*cfg.restart, budget) : budget;
    CycleResult cyc = gmres_cycle(defect, r, Vector(u.size(), 0.0), steps, cfg.tol, nullptr,
                                  hook, rep, rep.iterations);
    u = sub(u, cyc.x);
    rep.iterations += cyc.steps;
    if (cyc.end == CycleEnd::gate_met) {
      rep.status = SolveStatus::converged;
      return {std::move(u), std::move(rep)};
    }
    if (cyc.end == CycleEnd::failed) {
      rep.status = SolveStatus::failed;
      rep.message = cyc.message;
      return {std::move(u), std::move(rep)};
    }
    if (cyc.steps == 0) break;
    if (cfg.restart && cyc.end == CycleEnd::exhausted && cyc.steps == *cfg.restart &&
        cyc.native > (1.0 - cfg.stall_reduction) * start) {
      rep.status = SolveStatus::stalled;
      return {std::move(u), std::move(rep)};
    }
  }
  rep.status = SolveStatus::max_iters;
  return {std::move(u), std::move(rep)};
}

}  // namespace admmgmres
