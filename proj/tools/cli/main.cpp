#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include "cli/commands.hpp"

using namespace admmgmres::cli;

namespace {

struct CommandInfo {
  Command command;
  const char* description;
};

constexpr CommandInfo kCommands[] = {
    {Command::sweep, "Run solvers on seeded random instances; CSV per (instance, solver)"},
    {Command::compare, "Max iterations per log10(kappa) bin for each solver"},
    {Command::worstcase, "Residual curves of ADMM, SOR(2) and ADMM-GMRES on the worst-case construction"},
    {Command::diagnose, "Spectral diagnostics of K(beta) for one instance"},
    {Command::sdp, "ADMM-GMRES on synthetic semidefinite Newton subproblems"},
    {Command::solve, "Solve a problem file with the selected solvers"},
};

void add_options(CLI::App& sub, ExperimentConfig& cfg, std::size_t default_threads) {
  cfg.threads = default_threads;
  sub.add_option("--n", cfg.n, "Primal dimension (sdp: matrix order)");
  sub.add_option("--m", cfg.m, "Constraint rows (random when unset)");
  sub.add_option("--l", cfg.l, "Columns of B (random when unset)");
  sub.add_option("--s-min", cfg.s_min, "Smallest log-normal spread s");
  sub.add_option("--s-max", cfg.s_max, "Largest log-normal spread s");
  sub.add_option("--count", cfg.count, "Number of instances (sdp: per kappa)");
  sub.add_option("--seed", cfg.seed, "Base seed");
  sub.add_option("--tol", cfg.tol, "Relative saddle residual target");
  sub.add_option("--max-iters", cfg.max_iters, "Iteration cap");
  sub.add_option("--admm-max-iters", cfg.admm_max_iters, "Iteration cap for admm and sor");
  sub.add_option("--solvers", cfg.solvers,
                 "Comma list of admm, sor, gmres, gmres(k), restarted, blkdiag, constr1, constr2, "
                 "hss, all");
  sub.add_option("--restart", cfg.restart, "Restart period used by 'restarted' and 'all'");
  sub.add_option("--omega", cfg.omega, "Relaxation factor for sor");
  sub.add_option("--out-csv", cfg.out_csv, "CSV output path (stdout when unset)");
  sub.add_option("--out-svg", cfg.out_svg, "SVG plot output path");
  sub.add_option("--threads", cfg.threads, "Worker threads")->envname("ADMMGMRES_THREADS");
  sub.add_flag("--diagnostics,!--no-diagnostics", cfg.diagnostics,
               "Record delta, delta_lb, kappa_X, nu per instance");
  sub.add_flag("--timing", cfg.timing, "Add wall-clock seconds to CSV output");
  sub.add_flag("-v,--verbose", cfg.verbose, "Log each instance as it finishes")->configurable(false);
  switch (cfg.command) {
    case Command::worstcase:
      sub.add_option("--kappa", cfg.kappa, "Condition number");
      sub.add_option("--fit-from", cfg.fit_from, "First iteration of the rate fit");
      sub.add_option("--fit-to", cfg.fit_to, "Last iteration of the rate fit");
      break;
    case Command::diagnose:
      sub.add_option("--index", cfg.index, "Sweep instance index to diagnose");
      sub.add_option("--problem", cfg.problem_file, "Problem file (instead of a random instance)");
      break;
    case Command::sdp:
      sub.add_option("--kappas", cfg.kappas, "Condition numbers, comma separated")->delimiter(',');
      break;
    case Command::solve:
      sub.add_option("problem-file", cfg.problem_file, "Problem file")->required();
      break;
    default:
      break;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark and reproduction harness for GMRES-accelerated ADMM", "admmgmres"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a key=value file with [command] sections");
  std::string write_config;
  app.add_option("--write-config", write_config, "Write the effective options to a file")
      ->configurable(false);

  const unsigned hw = std::thread::hardware_concurrency();
  std::map<Command, ExperimentConfig> configs;
  std::map<Command, CLI::App*> subs;
  for (const auto& info : kCommands) {
    ExperimentConfig& cfg = configs[info.command] = default_config(info.command);
    CLI::App* sub = app.add_subcommand(std::string(to_string(info.command)), info.description);
    add_options(*sub, cfg, hw ? hw : 1);
    subs[info.command] = sub;
  }

  CLI11_PARSE(app, argc, argv);

  for (const auto& [command, sub] : subs) {
    if (!sub->parsed()) continue;
    if (!write_config.empty()) {
      std::ofstream f(write_config);
      f << to_config_string(configs.at(command));
      if (!f) {
        std::cerr << "error: cannot write '" << write_config << "'\n";
        return kExitError;
      }
    }
    return run_command(configs.at(command), std::cout, std::cerr);
  }
  return kExitError;
}
