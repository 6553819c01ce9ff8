#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cli/experiment.hpp"
#include "cli/svg.hpp"

namespace admmgmres::cli {

enum class Command { sweep, compare, worstcase, diagnose, sdp, solve };

std::string_view to_string(Command c);

/// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 2;

/// Everything a command needs; a run is reproducible from this alone.
struct ExperimentConfig {
  Command command = Command::sweep;

  // Instances
  std::size_t n = 200;
  std::optional<std::size_t> m;
  std::optional<std::size_t> l;
  double s_min = 0.0;
  double s_max = 2.0;
  std::size_t count = 50;
  std::uint64_t seed = 1;
  /// diagnose: which sweep instance to build when no problem file is given.
  std::size_t index = 0;
  /// worstcase
  double kappa = 1e4;
  /// sdp
  std::vector<double> kappas = {1e2, 1e4, 1e6};
  /// solve, and diagnose when set
  std::string problem_file;

  // Solvers
  std::string solvers = "admm,gmres";
  std::size_t restart = 25;
  double tol = 1e-6;
  std::size_t max_iters = 1000;
  std::optional<std::size_t> admm_max_iters;
  double omega = 2.0;
  std::size_t fit_from = 10;
  std::size_t fit_to = 40;

  // Output and execution
  std::string out_csv;
  std::string out_svg;
  std::size_t threads = 1;
  bool diagnostics = true;
  bool timing = false;
  bool verbose = false;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  SweepSpec sweep_spec() const;
  SdpSpec sdp_spec() const;
  RunConfig run_config() const;
  std::vector<SolverSpec> solver_list() const;
};

/// The config as a "[command]" section of key=value lines using the CLI
/// option names; reading it back with --config reproduces the run.
std::string to_config_string(const ExperimentConfig& cfg);

/// Per-command defaults (solver list, dimensions, tolerances).
ExperimentConfig default_config(Command c);

/// Validates and dispatches. CSV goes to cfg.out_csv, or to `out` when that
/// is empty; summaries and per-instance failures go to `log`. Returns one of
/// the exit codes above; exceptions are reported on `log` as kExitError.
int run_command(const ExperimentConfig& cfg, std::ostream& out, std::ostream& log);

int cmd_sweep(const ExperimentConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_compare(const ExperimentConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_worstcase(const ExperimentConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_diagnose(const ExperimentConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_sdp(const ExperimentConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_solve(const ExperimentConfig& cfg, std::ostream& out, std::ostream& log);

/// Scatter of iterations against kappa, one marker per CSV row, with the
/// reference lines 10 sqrt(kappa) and 6 kappa^{1/4}.
Plot sweep_plot(const std::vector<InstanceResult>& results, const std::vector<SolverSpec>& solvers);

}  // namespace admmgmres::cli
