#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "admmgmres/admm.hpp"
#include "admmgmres/diagnostics.hpp"
#include "admmgmres/precond.hpp"
#include "admmgmres/problem.hpp"
#include "admmgmres/sdp.hpp"
#include "admmgmres/solve_report.hpp"

namespace admmgmres::cli {

enum class SolverKind { admm, sor, admm_gmres, blkdiag, constr1, constr2, hss };

/// One solver selection. `restart` applies to admm_gmres only.
struct SolverSpec {
  SolverKind kind = SolverKind::admm_gmres;
  std::optional<std::size_t> restart;

  /// Canonical name, e.g. "admm", "gmres", "gmres(25)", "constr1".
  std::string name() const;
  /// admm and sor use RunConfig::admm_max_iters when set.
  bool is_fixed_point() const noexcept {
    return kind == SolverKind::admm || kind == SolverKind::sor;
  }
  /// The preconditioned saddle-point solvers.
  bool needs_reduction() const noexcept { return !is_fixed_point() && kind != SolverKind::admm_gmres; }
  friend bool operator==(const SolverSpec&, const SolverSpec&) = default;
};

/// Accepts the canonical names plus "admm-gmres" and "admm-gmres(k)" as
/// aliases of "gmres" and "gmres(k)". Throws std::invalid_argument.
SolverSpec parse_solver(std::string_view name);
/// Comma-separated list; "all" expands to all_solvers(restart) and
/// "restarted" to gmres(restart). Duplicates are dropped. Throws
/// std::invalid_argument on an empty list or an unknown name.
std::vector<SolverSpec> parse_solver_list(std::string_view list, std::size_t restart = 25);
/// admm, blkdiag, constr1, constr2, hss, gmres, gmres(restart)
std::vector<SolverSpec> all_solvers(std::size_t restart);
std::string join_solver_names(const std::vector<SolverSpec>& solvers);

struct RunConfig {
  double tol = 1e-6;
  std::size_t max_iters = 1000;
  /// Iteration cap for admm and sor; max_iters when unset.
  std::optional<std::size_t> admm_max_iters;
  double sor_omega = 2.0;
  /// Plain fixed-point solvers are skipped (status "skipped") above this kappa.
  std::optional<double> admm_kappa_max;
  /// Keep the residual history of every run in SolverRun::history.
  bool keep_history = false;

  /// Throws std::invalid_argument.
  void validate() const;
};

struct SolverRun {
  SolverSpec solver;
  std::size_t iterations = 0;
  /// to_string(SolveStatus), or "skipped" / "error".
  std::string status = "error";
  double final_residual = 0.0;
  double seconds = 0.0;
  std::string message;
  /// Gating residual per iteration when RunConfig::keep_history is set.
  std::vector<double> history;

  bool converged() const noexcept { return status == "converged"; }
};

struct InstanceResult {
  std::size_t index = 0;
  InstanceParams params;
  double kappa = 0.0;
  std::vector<SolverRun> runs;
  std::optional<DiagnosticsReport> diagnostics;
  /// Non-empty when the instance could not be built; runs is then empty.
  std::string error;
};

/// Runs one solver from the zero start. The fixed-point solvers iterate `map`;
/// `red` may be null unless solver.needs_reduction(). Exceptions become
/// status "error".
SolverRun run_solver(const FixedPointMap& map, const SaddleReduction* red, const SolverSpec& solver,
                     const RunConfig& cfg);

/// Factorizes once and runs every solver; diagnostics of K(sqrt(mu L)) when asked.
InstanceResult run_instance(const EcqpProblem& prob, const std::vector<SolverSpec>& solvers,
                            const RunConfig& cfg, bool diagnostics);

/// Seeded random instances: m and l uniform unless fixed, s uniform on
/// [s_min, s_max]. With m and l free this coincides with sample_instance.
struct SweepSpec {
  std::size_t n = 200;
  std::optional<std::size_t> m;
  std::optional<std::size_t> l;
  double s_min = 0.0;
  double s_max = 2.0;
  std::size_t count = 50;
  std::uint64_t seed = 1;

  void validate() const;
  InstanceParams instance(std::size_t index) const;
};

/// Progress callback, invoked from worker threads after each instance.
using ProgressFn = std::function<void(const InstanceResult&)>;

/// Runs count instances on `threads` workers. Results are ordered by instance
/// index and do not depend on the thread count.
std::vector<InstanceResult> run_sweep(const SweepSpec& spec, const std::vector<SolverSpec>& solvers,
                                      const RunConfig& cfg, bool diagnostics, std::size_t threads,
                                      const ProgressFn& progress = {});

/// Least-squares slope of log10 y against log10 x. Requires two distinct x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Converged (kappa, iterations) pairs of one solver with kappa in [lo, hi].
struct ScalingData {
  std::vector<double> kappa;
  std::vector<double> iterations;
};
ScalingData scaling_data(const std::vector<InstanceResult>& results, const SolverSpec& solver,
                         double kappa_lo, double kappa_hi);

/// log10 kappa bins [0,2], (2,4], (4,6], (6,8], (8,10], (10,inf).
struct KappaBin {
  double lo;
  double hi;
  std::string label;
};
const std::vector<KappaBin>& kappa_bins();
std::size_t kappa_bin_index(double kappa);

struct CompareCell {
  std::string bin;
  std::string solver;
  std::size_t instances = 0;
  std::size_t converged = 0;
  /// Largest iteration count over the bin, converged or not.
  std::size_t max_iterations = 0;
  double max_seconds = 0.0;
};

/// One cell per non-empty bin and solver, bins ascending, solvers in input order.
std::vector<CompareCell> compare_table(const std::vector<InstanceResult>& results,
                                       const std::vector<SolverSpec>& solvers);

void write_sweep_csv(std::ostream& os, const std::vector<InstanceResult>& results, bool timing);
void write_compare_csv(std::ostream& os, const std::vector<CompareCell>& cells, bool timing);
/// Bins as rows, solvers as columns; ">N" marks a bin where some run did not converge.
void print_compare_table(std::ostream& os, const std::vector<CompareCell>& cells,
                         const std::vector<SolverSpec>& solvers);

/// exp of the least-squares slope of ln h[k] over k in [from, to], clipped to
/// the history length. NaN with fewer than two positive entries.
double fit_geometric_rate(const std::vector<double>& h, std::size_t from, std::size_t to);

/// M-metric curves ||u_k - T(u_k)|| / ||u_0 - T(u_0)|| of ADMM, SOR(omega)
/// and ADMM-GMRES from the zero start on worst_case_problem(m, kappa), with
/// the rate line a^k, a = (sqrt(kappa) - 1) / (sqrt(kappa) + 1).
struct WorstCaseRun {
  double a = 0.0;
  std::vector<double> admm;
  std::vector<double> sor;
  std::vector<double> gmres;
  std::vector<double> rate_line;
  double rate_admm = 0.0;
  double rate_sor = 0.0;
  double rate_gmres = 0.0;
};
WorstCaseRun run_worstcase(std::size_t m, double kappa, const RunConfig& cfg,
                           std::size_t fit_from, std::size_t fit_to);

/// Synthetic Newton subproblems: `count` seeds per kappa.
struct SdpSpec {
  std::size_t n = 10;
  std::size_t m = 20;
  std::vector<double> kappas = {1e2, 1e4, 1e6};
  std::size_t count = 1;
  std::uint64_t seed = 1;

  void validate() const;
};
struct SdpResult {
  double kappa = 0.0;
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::vector<SolverRun> runs;
  std::string error;
};
/// Fixed-point solvers run the specialized SDP sweep; the saddle-point
/// solvers run on the equivalent ECQP.
std::vector<SdpResult> run_sdp(const SdpSpec& spec, const std::vector<SolverSpec>& solvers,
                               const RunConfig& cfg, std::size_t threads);
void write_sdp_csv(std::ostream& os, const SdpSpec& spec, const std::vector<SdpResult>& results,
                   bool timing);

}  // namespace admmgmres::cli
