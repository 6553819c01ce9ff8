#include "cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "admmgmres/diagnostics.hpp"
#include "admmgmres/linalg/matrix_io.hpp"

namespace admmgmres::cli {

using linalg::format_double;

namespace {

/// Calls fn with the file at `path`, or with `fallback` when path is empty.
void with_output(const std::string& path, std::ostream& fallback,
                 const std::function<void(std::ostream&)>& fn) {
  if (path.empty()) {
    fn(fallback);
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  fn(f);
  f.flush();
  if (!f) throw std::runtime_error("error writing '" + path + "'");
}

void write_svg(const std::string& path, const Plot& plot) {
  if (path.empty()) return;
  with_output(path, std::cout, [&](std::ostream& os) { plot.write(os); });
}

bool settled(const SolverRun& run) { return run.converged() || run.status == "skipped"; }

int exit_code(const std::vector<InstanceResult>& results) {
  for (const auto& r : results) {
    if (!r.error.empty()) return kExitNotConverged;
    for (const auto& run : r.runs)
      if (!settled(run)) return kExitNotConverged;
  }
  return kExitOk;
}

MarkerShape shape_for(const SolverSpec& s, std::size_t i) {
  if (s.kind == SolverKind::admm) return MarkerShape::circle;
  if (s.kind == SolverKind::admm_gmres && !s.restart) return MarkerShape::cross;
  static constexpr MarkerShape others[] = {MarkerShape::square, MarkerShape::triangle,
                                           MarkerShape::diamond, MarkerShape::plus};
  return others[i % 4];
}

void log_instance(std::ostream& log, const InstanceResult& r) {
  if (!r.error.empty()) {
    log << "instance " << r.index << ": error: " << r.error << '\n';
    return;
  }
  log << "instance " << r.index << ": m=" << r.params.m << " l=" << r.params.l
      << " s=" << std::setprecision(3) << r.params.s << " kappa=" << std::setprecision(4)
      << r.kappa;
  for (const auto& run : r.runs) log << ' ' << run.solver.name() << '=' << run.iterations << ':' << run.status;
  log << '\n';
}

void log_failures(std::ostream& log, const std::vector<InstanceResult>& results) {
  for (const auto& r : results) {
    if (!r.error.empty()) log << "instance " << r.index << " failed: " << r.error << '\n';
    for (const auto& run : r.runs)
      if (run.status == "error")
        log << "instance " << r.index << ' ' << run.solver.name() << " failed: " << run.message
            << '\n';
  }
}

void log_scaling_summary(std::ostream& log, const std::vector<InstanceResult>& results,
                         const std::vector<SolverSpec>& solvers) {
  log << "solver        runs  converged  slope[1e2,1e8]  <=10sqrt(k)+50  <=6k^(1/4)+20\n";
  for (const auto& s : solvers) {
    std::size_t runs = 0, conv = 0, in_sqrt = 0, in_quarter = 0;
    for (const auto& r : results)
      for (const auto& run : r.runs) {
        if (!(run.solver == s) || run.status == "skipped") continue;
        ++runs;
        if (!run.converged()) continue;
        ++conv;
        const double it = static_cast<double>(run.iterations);
        if (it <= 10.0 * std::sqrt(r.kappa) + 50.0) ++in_sqrt;
        if (it <= 6.0 * std::pow(r.kappa, 0.25) + 20.0) ++in_quarter;
      }
    const ScalingData d = scaling_data(results, s, 1e2, 1e8);
    std::string slope = "-";
    try {
      std::ostringstream os;
      os << std::fixed << std::setprecision(3) << loglog_slope(d.kappa, d.iterations);
      slope = os.str();
    } catch (const std::invalid_argument&) {
    }
    auto pct = [&](std::size_t k) {
      std::ostringstream os;
      os << std::fixed << std::setprecision(1) << (conv ? 100.0 * k / conv : 0.0) << '%';
      return os.str();
    };
    log << std::left << std::setw(12) << s.name() << std::right << std::setw(6) << runs
        << std::setw(11) << conv << std::setw(16) << slope << std::setw(16) << pct(in_sqrt)
        << std::setw(15) << pct(in_quarter) << '\n';
  }
}

EcqpProblem load_or_sample(const ExperimentConfig& cfg) {
  if (!cfg.problem_file.empty()) return load_problem(cfg.problem_file);
  return random_problem(cfg.sweep_spec().instance(cfg.index));
}

}  // namespace

std::string_view to_string(Command c) {
  switch (c) {
    case Command::sweep: return "sweep";
    case Command::compare: return "compare";
    case Command::worstcase: return "worstcase";
    case Command::diagnose: return "diagnose";
    case Command::sdp: return "sdp";
    case Command::solve: return "solve";
  }
  return "?";
}

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, end) : format_double(v);
}

std::string quoted(const std::string& v) {
  std::string out = "\"";
  for (char c : v) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::string to_config_string(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << '[' << to_string(cfg.command) << "]\n"
     << "n=" << cfg.n << '\n';
  if (cfg.m) os << "m=" << *cfg.m << '\n';
  if (cfg.l) os << "l=" << *cfg.l << '\n';
  os << "s-min=" << shortest(cfg.s_min) << "\ns-max=" << shortest(cfg.s_max) << '\n'
     << "count=" << cfg.count << "\nseed=" << cfg.seed << '\n'
     << "tol=" << shortest(cfg.tol) << "\nmax-iters=" << cfg.max_iters << '\n';
  if (cfg.admm_max_iters) os << "admm-max-iters=" << *cfg.admm_max_iters << '\n';
  os << "solvers=" << quoted(cfg.solvers) << "\nrestart=" << cfg.restart << '\n'
     << "omega=" << shortest(cfg.omega) << '\n';
  if (!cfg.out_csv.empty()) os << "out-csv=" << quoted(cfg.out_csv) << '\n';
  if (!cfg.out_svg.empty()) os << "out-svg=" << quoted(cfg.out_svg) << '\n';
  os << "threads=" << cfg.threads << '\n'
     << "diagnostics=" << (cfg.diagnostics ? "true" : "false") << '\n'
     << "timing=" << (cfg.timing ? "true" : "false") << '\n';
  switch (cfg.command) {
    case Command::worstcase:
      os << "kappa=" << shortest(cfg.kappa) << "\nfit-from=" << cfg.fit_from
         << "\nfit-to=" << cfg.fit_to << '\n';
      break;
    case Command::diagnose:
      os << "index=" << cfg.index << '\n';
      if (!cfg.problem_file.empty()) os << "problem=" << quoted(cfg.problem_file) << '\n';
      break;
    case Command::sdp:
      os << "kappas=[";
      for (std::size_t i = 0; i < cfg.kappas.size(); ++i)
        os << (i ? "," : "") << shortest(cfg.kappas[i]);
      os << "]\n";
      break;
    case Command::solve:
      os << "problem-file=" << quoted(cfg.problem_file) << '\n';
      break;
    default:
      break;
  }
  return os.str();
}

ExperimentConfig default_config(Command c) {
  ExperimentConfig cfg;
  cfg.command = c;
  switch (c) {
    case Command::sweep:
      break;
    case Command::compare:
      cfg.solvers = "all";
      break;
    case Command::worstcase:
      cfg.m = 64;
      cfg.tol = 1e-10;
      cfg.max_iters = 200;
      cfg.diagnostics = false;
      break;
    case Command::diagnose:
      break;
    case Command::sdp:
      cfg.n = 10;
      cfg.m = 20;
      cfg.count = 1;
      cfg.solvers = "gmres,restarted";
      cfg.diagnostics = false;
      break;
    case Command::solve:
      cfg.solvers = "gmres";
      cfg.diagnostics = false;
      break;
  }
  return cfg;
}

SweepSpec ExperimentConfig::sweep_spec() const {
  SweepSpec s;
  s.n = n;
  s.m = m;
  s.l = l;
  s.s_min = s_min;
  s.s_max = s_max;
  s.count = count;
  s.seed = seed;
  return s;
}

SdpSpec ExperimentConfig::sdp_spec() const {
  SdpSpec s;
  s.n = n;
  s.m = m.value_or(1);
  s.kappas = kappas;
  s.count = count;
  s.seed = seed;
  return s;
}

RunConfig ExperimentConfig::run_config() const {
  RunConfig r;
  r.tol = tol;
  r.max_iters = max_iters;
  r.admm_max_iters = admm_max_iters;
  r.sor_omega = omega;
  return r;
}

std::vector<SolverSpec> ExperimentConfig::solver_list() const {
  return parse_solver_list(solvers, restart);
}

void ExperimentConfig::validate() const {
  run_config().validate();
  if (threads == 0) throw std::invalid_argument("threads must be positive");
  switch (command) {
    case Command::sweep:
    case Command::compare:
      sweep_spec().validate();
      (void)solver_list();
      break;
    case Command::worstcase:
      if (!m || *m == 0 || *m % 2 != 0) throw std::invalid_argument("worstcase needs an even m");
      if (!(kappa > 1.0) || !std::isfinite(kappa))
        throw std::invalid_argument("worstcase needs kappa > 1");
      if (fit_to <= fit_from) throw std::invalid_argument("fit window needs fit-from < fit-to");
      break;
    case Command::diagnose:
      if (problem_file.empty()) {
        SweepSpec s = sweep_spec();
        s.count = index + 1;
        s.validate();
      }
      break;
    case Command::sdp:
      sdp_spec().validate();
      (void)solver_list();
      break;
    case Command::solve:
      if (problem_file.empty()) throw std::invalid_argument("solve needs a problem file");
      (void)solver_list();
      break;
  }
}

Plot sweep_plot(const std::vector<InstanceResult>& results, const std::vector<SolverSpec>& solvers) {
  Plot plot("Iterations to tolerance", {"condition number kappa", true}, {"iterations", true});
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < solvers.size(); ++i) {
    ScatterSeries s;
    s.name = solvers[i].name();
    s.color = palette(i);
    s.shape = shape_for(solvers[i], i);
    for (const auto& r : results)
      for (const auto& run : r.runs) {
        if (!(run.solver == solvers[i])) continue;
        s.x.push_back(r.kappa);
        s.y.push_back(static_cast<double>(run.iterations));
        lo = std::min(lo, r.kappa);
        hi = std::max(hi, r.kappa);
      }
    plot.add(std::move(s));
  }
  if (lo <= hi) {
    if (hi <= lo) hi = lo * 10.0;
    LineSeries a = sample_curve("10 sqrt(kappa)", [](double k) { return 10.0 * std::sqrt(k); }, lo, hi, 64, true);
    a.dashed = true;
    LineSeries b = sample_curve("6 kappa^(1/4)", [](double k) { return 6.0 * std::pow(k, 0.25); }, lo, hi, 64, true);
    b.dashed = true;
    b.color = "#999999";
    plot.add(std::move(a));
    plot.add(std::move(b));
  }
  return plot;
}

int cmd_sweep(const ExperimentConfig& cfg, std::ostream& out, std::ostream& log) {
  const auto solvers = cfg.solver_list();
  ProgressFn progress;
  if (cfg.verbose) progress = [&](const InstanceResult& r) { log_instance(log, r); };
  const auto results = run_sweep(cfg.sweep_spec(), solvers, cfg.run_config(), cfg.diagnostics,
                                 cfg.threads, progress);
  with_output(cfg.out_csv, out, [&](std::ostream& os) { write_sweep_csv(os, results, cfg.timing); });
  write_svg(cfg.out_svg, sweep_plot(results, solvers));
  log_failures(log, results);
  log_scaling_summary(log, results, solvers);
  return exit_code(results);
}

int cmd_compare(const ExperimentConfig& cfg, std::ostream& out, std::ostream& log) {
  const auto solvers = cfg.solver_list();
  ProgressFn progress;
  if (cfg.verbose) progress = [&](const InstanceResult& r) { log_instance(log, r); };
  const auto results =
      run_sweep(cfg.sweep_spec(), solvers, cfg.run_config(), false, cfg.threads, progress);
  const auto cells = compare_table(results, solvers);
  with_output(cfg.out_csv, out, [&](std::ostream& os) { write_compare_csv(os, cells, cfg.timing); });
  write_svg(cfg.out_svg, sweep_plot(results, solvers));
  log_failures(log, results);
  log << "Max iterations per log10(kappa) bin (>N: some runs hit the cap)\n";
  print_compare_table(log, cells, solvers);
  return exit_code(results);
}

int cmd_worstcase(const ExperimentConfig& cfg, std::ostream& out, std::ostream& log) {
  RunConfig rc = cfg.run_config();
  const WorstCaseRun wc = run_worstcase(*cfg.m, cfg.kappa, rc, cfg.fit_from, cfg.fit_to);
  const std::vector<const std::vector<double>*> curves = {&wc.admm, &wc.sor, &wc.gmres,
                                                          &wc.rate_line};
  with_output(cfg.out_csv, out, [&](std::ostream& os) {
    os << "iteration,admm,sor,gmres,rate_line\n";
    for (std::size_t k = 0; k < wc.rate_line.size(); ++k) {
      os << k;
      for (const auto* c : curves) {
        os << ',';
        if (k < c->size()) os << format_double((*c)[k]);
      }
      os << '\n';
    }
  });
  if (!cfg.out_svg.empty()) {
    Plot plot("Worst-case construction, m = " + std::to_string(*cfg.m),
              {"iteration k", false}, {"||u_k - T(u_k)|| / ||u_0 - T(u_0)||", true});
    const char* names[] = {"ADMM", "SOR (omega = 2)", "ADMM-GMRES", "a^k"};
    for (std::size_t i = 0; i < curves.size(); ++i) {
      LineSeries l;
      l.name = names[i];
      l.color = palette(i);
      l.dashed = i == 3;
      for (std::size_t k = 0; k < curves[i]->size(); ++k) {
        l.x.push_back(static_cast<double>(k));
        l.y.push_back((*curves[i])[k]);
      }
      plot.add(std::move(l));
    }
    write_svg(cfg.out_svg, plot);
  }
  log << std::setprecision(6) << "a = (sqrt(kappa)-1)/(sqrt(kappa)+1) = " << wc.a << '\n'
      << "fitted rates over iterations " << cfg.fit_from << ".." << cfg.fit_to
      << ": admm " << wc.rate_admm << ", sor " << wc.rate_sor << ", gmres " << wc.rate_gmres
      << '\n';
  return kExitOk;
}

int cmd_diagnose(const ExperimentConfig& cfg, std::ostream& out, std::ostream& log) {
  const EcqpProblem prob = load_or_sample(cfg);
  const DiagnosticsReport rep = diagnose(prob);
  with_output(cfg.out_csv, out, [&](std::ostream& os) {
    write_diagnostics_csv_header(os);
    write_diagnostics_csv_row(os, rep);
  });
  if (!cfg.out_svg.empty()) {
    Plot plot("Eigenvalues of K", {"real part", false}, {"imaginary part", false});
    ScatterSeries s;
    s.name = "eigenvalues";
    s.shape = MarkerShape::cross;
    for (const auto& z : rep.eigenvalues) {
      s.x.push_back(z.real());
      s.y.push_back(z.imag());
    }
    plot.add(std::move(s));
    plot.add_circle(rep.norm_K, "|z| = ||K||");
    write_svg(cfg.out_svg, plot);
  }
  log << std::setprecision(6) << "n=" << prob.n() << " m=" << prob.m() << " l=" << prob.l()
      << "\nkappa    " << rep.kappa << "\nbeta     " << rep.beta << "\n||K||    " << rep.norm_K
      << "\ndelta    " << rep.delta << "\ndelta_lb " << rep.delta_lb << "\nkappa_X  "
      << rep.kappa_X << "\nnu       " << rep.nu << " (bound " << rep.nu_bound << ")\n";
  if (!rep.warning.empty()) log << "warning: " << rep.warning << '\n';
  return kExitOk;
}

int cmd_sdp(const ExperimentConfig& cfg, std::ostream& out, std::ostream& log) {
  const auto solvers = cfg.solver_list();
  const SdpSpec spec = cfg.sdp_spec();
  const auto results = run_sdp(spec, solvers, cfg.run_config(), cfg.threads);
  with_output(cfg.out_csv, out, [&](std::ostream& os) { write_sdp_csv(os, spec, results, cfg.timing); });
  int code = kExitOk;
  Plot plot("Newton subproblems", {"condition number kappa", true}, {"iterations", true});
  for (std::size_t i = 0; i < solvers.size(); ++i) {
    ScatterSeries s;
    s.name = solvers[i].name();
    s.color = palette(i);
    s.shape = shape_for(solvers[i], i);
    for (const auto& r : results)
      for (const auto& run : r.runs)
        if (run.solver == solvers[i]) {
          s.x.push_back(r.kappa);
          s.y.push_back(static_cast<double>(run.iterations));
        }
    plot.add(std::move(s));
  }
  const auto [lo, hi] = std::minmax_element(spec.kappas.begin(), spec.kappas.end());
  LineSeries ref = sample_curve("6 kappa^(1/4) + 20",
                                [](double k) { return 6.0 * std::pow(k, 0.25) + 20.0; }, *lo,
                                std::max(*hi, *lo * 10.0), 64, true);
  ref.dashed = true;
  plot.add(std::move(ref));
  write_svg(cfg.out_svg, plot);
  for (const auto& r : results) {
    if (!r.error.empty()) {
      log << "kappa " << r.kappa << " instance " << r.index << " failed: " << r.error << '\n';
      code = kExitNotConverged;
      continue;
    }
    log << "kappa " << std::setprecision(3) << r.kappa << ':';
    for (const auto& run : r.runs) {
      log << ' ' << run.solver.name() << '=' << run.iterations << ':' << run.status;
      if (!run.converged()) code = kExitNotConverged;
    }
    log << '\n';
  }
  return code;
}

int cmd_solve(const ExperimentConfig& cfg, std::ostream& out, std::ostream& log) {
  const EcqpProblem prob = load_problem(cfg.problem_file);
  RunConfig rc = cfg.run_config();
  rc.keep_history = true;
  const auto solvers = cfg.solver_list();
  const InstanceResult res = run_instance(prob, solvers, rc, false);
  if (!res.error.empty()) throw std::runtime_error(res.error);
  with_output(cfg.out_csv, out, [&](std::ostream& os) {
    os << "solver,iteration,residual\n";
    for (const auto& run : res.runs)
      for (std::size_t k = 0; k < run.history.size(); ++k)
        os << run.solver.name() << ',' << k << ',' << format_double(run.history[k]) << '\n';
  });
  log << "n=" << prob.n() << " m=" << prob.m() << " l=" << prob.l() << " kappa="
      << std::setprecision(6) << res.kappa << '\n';
  int code = kExitOk;
  for (const auto& run : res.runs) {
    log << std::left << std::setw(12) << run.solver.name() << std::right << std::setw(8)
        << run.iterations << "  " << std::setw(10) << run.status << "  " << std::setprecision(3)
        << run.final_residual;
    if (!run.message.empty()) log << "  " << run.message;
    log << '\n';
    if (!run.converged()) code = kExitNotConverged;
  }
  return code;
}

int run_command(const ExperimentConfig& cfg, std::ostream& out, std::ostream& log) {
  try {
    cfg.validate();
    switch (cfg.command) {
      case Command::sweep: return cmd_sweep(cfg, out, log);
      case Command::compare: return cmd_compare(cfg, out, log);
      case Command::worstcase: return cmd_worstcase(cfg, out, log);
      case Command::diagnose: return cmd_diagnose(cfg, out, log);
      case Command::sdp: return cmd_sdp(cfg, out, log);
      case Command::solve: return cmd_solve(cfg, out, log);
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
  }
  return kExitError;
}

}  // namespace admmgmres::cli
