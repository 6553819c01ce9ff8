#include "cli/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "admmgmres/krylov.hpp"
#include "admmgmres/linalg/matrix_io.hpp"

namespace admmgmres::cli {

using linalg::format_double;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Runs body(i) for i in [0, count) on up to `threads` workers pulling indices
// from a shared counter. Callers write to pre-sized slots, so output order does
// not depend on scheduling.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body) {
  const std::size_t nt = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
  if (nt == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(nt);
  for (std::size_t t = 0; t < nt; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
}

}  // namespace

std::string SolverSpec::name() const {
  switch (kind) {
    case SolverKind::admm: return "admm";
    case SolverKind::sor: return "sor";
    case SolverKind::admm_gmres:
      return restart ? "gmres(" + std::to_string(*restart) + ")" : "gmres";
    case SolverKind::blkdiag: return "blkdiag";
    case SolverKind::constr1: return "constr1";
    case SolverKind::constr2: return "constr2";
    case SolverKind::hss: return "hss";
  }
  return "?";
}

SolverSpec parse_solver(std::string_view name) {
  name = trim(name);
  if (name == "admm") return {SolverKind::admm, std::nullopt};
  if (name == "sor") return {SolverKind::sor, std::nullopt};
  if (name == "gmres" || name == "admm-gmres") return {SolverKind::admm_gmres, std::nullopt};
  if (const auto m = parse_saddle_method(name)) {
    switch (*m) {
      case SaddleMethod::blkdiag: return {SolverKind::blkdiag, std::nullopt};
      case SaddleMethod::constr1: return {SolverKind::constr1, std::nullopt};
      case SaddleMethod::constr2: return {SolverKind::constr2, std::nullopt};
      case SaddleMethod::hss: return {SolverKind::hss, std::nullopt};
    }
  }
  for (std::string_view prefix : {"gmres(", "admm-gmres("}) {
    if (!name.starts_with(prefix) || !name.ends_with(")")) continue;
    const std::string_view digits = name.substr(prefix.size(), name.size() - prefix.size() - 1);
    std::size_t k = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || k == 0)
      throw std::invalid_argument("bad restart period in solver '" + std::string(name) + "'");
    return {SolverKind::admm_gmres, k};
  }
  throw std::invalid_argument("unknown solver '" + std::string(name) +
                              "' (expected admm, sor, gmres, gmres(k), blkdiag, constr1, "
                              "constr2, hss or all)");
}

std::vector<SolverSpec> all_solvers(std::size_t restart) {
  return {{SolverKind::admm, std::nullopt},    {SolverKind::blkdiag, std::nullopt},
          {SolverKind::constr1, std::nullopt}, {SolverKind::constr2, std::nullopt},
          {SolverKind::hss, std::nullopt},     {SolverKind::admm_gmres, std::nullopt},
          {SolverKind::admm_gmres, restart}};
}

std::vector<SolverSpec> parse_solver_list(std::string_view list, std::size_t restart) {
  if (restart == 0) throw std::invalid_argument("restart must be positive");
  std::vector<SolverSpec> out;
  while (!list.empty()) {
    const std::size_t comma = list.find(',');
    const std::string_view item = trim(list.substr(0, comma));
    list = comma == std::string_view::npos ? std::string_view{} : list.substr(comma + 1);
    if (item.empty()) continue;
    std::vector<SolverSpec> add;
    if (item == "all")
      add = all_solvers(restart);
    else if (item == "restarted")
      add = {{SolverKind::admm_gmres, restart}};
    else
      add = {parse_solver(item)};
    for (const auto& s : add)
      if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  if (out.empty()) throw std::invalid_argument("empty solver list");
  return out;
}

std::string join_solver_names(const std::vector<SolverSpec>& solvers) {
  std::string out;
  for (const auto& s : solvers) {
    if (!out.empty()) out += ',';
    out += s.name();
  }
  return out;
}

void RunConfig::validate() const {
  if (!(tol > 0.0) || !std::isfinite(tol)) throw std::invalid_argument("tol must be positive");
  if (max_iters == 0) throw std::invalid_argument("max_iters must be positive");
  if (admm_max_iters && *admm_max_iters == 0)
    throw std::invalid_argument("admm_max_iters must be positive");
  if (!(sor_omega > 0.0 && sor_omega <= 2.0))
    throw std::invalid_argument("sor omega must lie in (0, 2]");
  if (admm_kappa_max && !(*admm_kappa_max >= 1.0))
    throw std::invalid_argument("admm_kappa_max must be >= 1");
}

SolverRun run_solver(const FixedPointMap& map, const SaddleReduction* red, const SolverSpec& solver,
                     const RunConfig& cfg) {
  SolverRun run;
  run.solver = solver;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (solver.needs_reduction() && !red)
      throw std::invalid_argument(solver.name() + " needs a saddle reduction");
    SolveReport rep;
    const Vector u0(map.dim(), 0.0);
    KrylovConfig kc;
    kc.tol = cfg.tol;
    kc.max_iters = cfg.max_iters;
    switch (solver.kind) {
      case SolverKind::admm:
        rep = solve_admm(map, u0, cfg.tol, cfg.admm_max_iters.value_or(cfg.max_iters)).second;
        break;
      case SolverKind::sor:
        rep = solve_sor(map, u0, cfg.sor_omega, cfg.tol, cfg.admm_max_iters.value_or(cfg.max_iters))
                  .second;
        break;
      case SolverKind::admm_gmres:
        kc.restart = solver.restart;
        rep = admm_gmres(map, u0, kc).second;
        break;
      case SolverKind::blkdiag:
        rep = solve_preconditioned(*red, SaddleMethod::blkdiag, kc).second;
        break;
      case SolverKind::constr1:
        rep = solve_preconditioned(*red, SaddleMethod::constr1, kc).second;
        break;
      case SolverKind::constr2:
        rep = solve_preconditioned(*red, SaddleMethod::constr2, kc).second;
        break;
      case SolverKind::hss:
        rep = solve_preconditioned(*red, SaddleMethod::hss, kc).second;
        break;
    }
    run.iterations = rep.iterations;
    run.status = std::string(to_string(rep.status));
    run.final_residual = rep.final_residual();
    run.message = rep.message;
    if (cfg.keep_history) run.history = std::move(rep.residual_history);
  } catch (const std::exception& e) {
    run.status = "error";
    run.message = e.what();
  }
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

InstanceResult run_instance(const EcqpProblem& prob, const std::vector<SolverSpec>& solvers,
                            const RunConfig& cfg, bool diagnostics) {
  InstanceResult res;
  try {
    const AdmmOperator op(prob);
    res.kappa = op.factors().constants().kappa;
    std::optional<SaddleReduction> red;
    for (const auto& s : solvers) {
      if (s.is_fixed_point() && cfg.admm_kappa_max && res.kappa > *cfg.admm_kappa_max) {
        SolverRun skipped;
        skipped.solver = s;
        skipped.status = "skipped";
        res.runs.push_back(skipped);
        continue;
      }
      if (s.needs_reduction() && !red) red.emplace(prob);
      res.runs.push_back(run_solver(op, red ? &*red : nullptr, s, cfg));
    }
    if (diagnostics) {
      try {
        res.diagnostics = diagnose(build_K(op.factors(), prob.B, op.beta()), res.kappa);
      } catch (const std::exception&) {
        res.diagnostics.reset();
      }
    }
  } catch (const std::exception& e) {
    res.runs.clear();
    res.error = e.what();
  }
  return res;
}

void SweepSpec::validate() const {
  if (n == 0) throw std::invalid_argument("n must be positive");
  if (m && (*m == 0 || *m > n)) throw std::invalid_argument("m must lie in [1, n]");
  if (l && (*l == 0 || *l > m.value_or(n)))
    throw std::invalid_argument("l must lie in [1, m]");
  if (!(0.0 <= s_min && s_min <= s_max) || !std::isfinite(s_max))
    throw std::invalid_argument("need 0 <= s_min <= s_max");
  if (count == 0) throw std::invalid_argument("count must be positive");
}

InstanceParams SweepSpec::instance(std::size_t index) const {
  linalg::Rng rng(linalg::derive_seed(seed, index));
  InstanceParams ip;
  ip.n = n;
  ip.m = m ? *m : rng.uniform_int(1, n);
  if (l && *l > ip.m) throw std::invalid_argument("l exceeds m");
  ip.l = l ? *l : rng.uniform_int(1, ip.m);
  ip.s = rng.uniform(s_min, s_max);
  ip.seed = rng.next_u64();
  return ip;
}

std::vector<InstanceResult> run_sweep(const SweepSpec& spec, const std::vector<SolverSpec>& solvers,
                                      const RunConfig& cfg, bool diagnostics, std::size_t threads,
                                      const ProgressFn& progress) {
  spec.validate();
  cfg.validate();
  std::vector<InstanceResult> results(spec.count);
  std::mutex progress_mutex;
  parallel_for(spec.count, threads, [&](std::size_t i) {
    InstanceResult res;
    try {
      const InstanceParams ip = spec.instance(i);
      res = run_instance(random_problem(ip), solvers, cfg, diagnostics);
      res.params = ip;
    } catch (const std::exception& e) {
      res.error = e.what();
    }
    res.index = i;
    if (progress) {
      const std::lock_guard lock(progress_mutex);
      progress(res);
    }
    results[i] = std::move(res);
  });
  return results;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("loglog_slope needs two or more paired points");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("loglog_slope needs positive data");
    mx += std::log10(x[i]) / n;
    my += std::log10(y[i]) / n;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log10(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log10(y[i]) - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("loglog_slope needs two distinct x values");
  return sxy / sxx;
}

ScalingData scaling_data(const std::vector<InstanceResult>& results, const SolverSpec& solver,
                         double kappa_lo, double kappa_hi) {
  ScalingData out;
  for (const auto& r : results) {
    if (!r.error.empty() || r.kappa < kappa_lo || r.kappa > kappa_hi) continue;
    for (const auto& run : r.runs) {
      if (!(run.solver == solver) || !run.converged() || run.iterations == 0) continue;
      out.kappa.push_back(r.kappa);
      out.iterations.push_back(static_cast<double>(run.iterations));
    }
  }
  return out;
}

const std::vector<KappaBin>& kappa_bins() {
  static const std::vector<KappaBin> bins = {
      {0, 2, "(0,2]"}, {2, 4, "(2,4]"}, {4, 6, "(4,6]"}, {6, 8, "(6,8]"}, {8, 10, "(8,10]"},
      {10, std::numeric_limits<double>::infinity(), "(10,inf)"}};
  return bins;
}

std::size_t kappa_bin_index(double kappa) {
  const double e = std::log10(std::max(kappa, 1.0));
  const auto& bins = kappa_bins();
  for (std::size_t i = 0; i < bins.size(); ++i)
    if (e <= bins[i].hi) return i;
  return bins.size() - 1;
}

std::vector<CompareCell> compare_table(const std::vector<InstanceResult>& results,
                                       const std::vector<SolverSpec>& solvers) {
  const auto& bins = kappa_bins();
  std::vector<std::vector<CompareCell>> grid(bins.size(), std::vector<CompareCell>(solvers.size()));
  for (const auto& r : results) {
    if (!r.error.empty()) continue;
    const std::size_t b = kappa_bin_index(r.kappa);
    for (const auto& run : r.runs) {
      const auto it = std::find(solvers.begin(), solvers.end(), run.solver);
      if (it == solvers.end() || run.status == "skipped") continue;
      CompareCell& c = grid[b][static_cast<std::size_t>(it - solvers.begin())];
      ++c.instances;
      if (run.converged()) ++c.converged;
      c.max_iterations = std::max(c.max_iterations, run.iterations);
      c.max_seconds = std::max(c.max_seconds, run.seconds);
    }
  }
  std::vector<CompareCell> out;
  for (std::size_t b = 0; b < bins.size(); ++b) {
    bool any = false;
    for (const auto& c : grid[b]) any = any || c.instances > 0;
    if (!any) continue;
    for (std::size_t s = 0; s < solvers.size(); ++s) {
      CompareCell c = grid[b][s];
      c.bin = bins[b].label;
      c.solver = solvers[s].name();
      out.push_back(std::move(c));
    }
  }
  return out;
}

void write_sweep_csv(std::ostream& os, const std::vector<InstanceResult>& results, bool timing) {
  os << "index,seed,n,m,l,s,kappa,solver,iterations,status,final_residual,delta,delta_lb,"
        "kappa_X,nu";
  if (timing) os << ",seconds";
  os << '\n';
  for (const auto& r : results) {
    if (!r.error.empty()) continue;
    for (const auto& run : r.runs) {
      os << r.index << ',' << r.params.seed << ',' << r.params.n << ',' << r.params.m << ','
         << r.params.l << ',' << format_double(r.params.s) << ',' << format_double(r.kappa) << ','
         << run.solver.name() << ',' << run.iterations << ',' << run.status << ','
         << format_double(run.final_residual) << ',';
      if (r.diagnostics) {
        const auto& d = *r.diagnostics;
        os << format_double(d.delta) << ',' << format_double(d.delta_lb) << ','
           << format_double(d.kappa_X) << ',' << format_double(d.nu);
      } else {
        os << ",,,";
      }
      if (timing) os << ',' << format_double(run.seconds);
      os << '\n';
    }
  }
}

void write_compare_csv(std::ostream& os, const std::vector<CompareCell>& cells, bool timing) {
  os << "bin,solver,instances,converged,max_iterations";
  if (timing) os << ",max_seconds";
  os << '\n';
  for (const auto& c : cells) {
    os << '"' << c.bin << "\"," << c.solver << ',' << c.instances << ',' << c.converged << ','
       << c.max_iterations;
    if (timing) os << ',' << format_double(c.max_seconds);
    os << '\n';
  }
}

void print_compare_table(std::ostream& os, const std::vector<CompareCell>& cells,
                         const std::vector<SolverSpec>& solvers) {
  os << std::left << std::setw(10) << "log10(k)";
  for (const auto& s : solvers) os << std::right << std::setw(12) << s.name();
  os << '\n';
  for (std::size_t i = 0; i < cells.size(); i += solvers.size()) {
    os << std::left << std::setw(10) << cells[i].bin;
    for (std::size_t j = 0; j < solvers.size() && i + j < cells.size(); ++j) {
      const auto& c = cells[i + j];
      std::string v = c.instances == 0 ? "-"
                      : c.converged < c.instances ? ">" + std::to_string(c.max_iterations)
                                                  : std::to_string(c.max_iterations);
      os << std::right << std::setw(12) << v;
    }
    os << '\n';
  }
}

double fit_geometric_rate(const std::vector<double>& h, std::size_t from, std::size_t to) {
  double sk = 0.0, sy = 0.0, skk = 0.0, sky = 0.0, n = 0.0;
  for (std::size_t k = from; k <= to && k < h.size(); ++k) {
    if (!(h[k] > 0.0) || !std::isfinite(h[k])) continue;
    const double x = static_cast<double>(k), y = std::log(h[k]);
    sk += x;
    sy += y;
    skk += x * x;
    sky += x * y;
    n += 1.0;
  }
  const double den = n * skk - sk * sk;
  if (n < 2.0 || !(den > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::exp((n * sky - sk * sy) / den);
}

namespace {

std::vector<double> normalized(std::vector<double> h) {
  const double h0 = h.empty() ? 0.0 : h.front();
  if (h0 > 0.0)
    for (double& v : h) v /= h0;
  return h;
}

}  // namespace

WorstCaseRun run_worstcase(std::size_t m, double kappa, const RunConfig& cfg,
                           std::size_t fit_from, std::size_t fit_to) {
  cfg.validate();
  if (fit_to <= fit_from) throw std::invalid_argument("fit window must satisfy from < to");
  const AdmmOperator op(worst_case_problem(m, kappa));
  const Vector u0(op.dim(), 0.0);
  const std::size_t cap = cfg.admm_max_iters.value_or(cfg.max_iters);
  WorstCaseRun out;
  const double sk = std::sqrt(kappa);
  out.a = (sk - 1.0) / (sk + 1.0);
  out.admm = normalized(solve_admm(op, u0, cfg.tol, cap).second.mmetric_history);
  out.sor = normalized(solve_sor(op, u0, cfg.sor_omega, cfg.tol, cap).second.mmetric_history);
  KrylovConfig kc;
  kc.tol = cfg.tol;
  kc.max_iters = cfg.max_iters;
  out.gmres = normalized(admm_gmres(op, u0, kc, true).second.mmetric_history);
  const std::size_t len = std::max({out.admm.size(), out.sor.size(), out.gmres.size()});
  for (std::size_t k = 0; k < len; ++k) out.rate_line.push_back(std::pow(out.a, static_cast<double>(k)));
  out.rate_admm = fit_geometric_rate(out.admm, fit_from, fit_to);
  out.rate_sor = fit_geometric_rate(out.sor, fit_from, fit_to);
  out.rate_gmres = fit_geometric_rate(out.gmres, fit_from, fit_to);
  return out;
}

void SdpSpec::validate() const {
  if (n == 0 || m == 0 || m > svec_dim(n))
    throw std::invalid_argument("sdp needs n >= 1 and 1 <= m <= n(n+1)/2");
  if (kappas.empty()) throw std::invalid_argument("sdp needs at least one kappa");
  for (double k : kappas)
    if (!(k >= 1.0) || !std::isfinite(k)) throw std::invalid_argument("sdp kappas must be >= 1");
  if (n == 1)
    for (double k : kappas)
      if (k != 1.0) throw std::invalid_argument("n = 1 only admits kappa = 1");
  if (count == 0) throw std::invalid_argument("count must be positive");
}

std::vector<SdpResult> run_sdp(const SdpSpec& spec, const std::vector<SolverSpec>& solvers,
                               const RunConfig& cfg, std::size_t threads) {
  spec.validate();
  cfg.validate();
  const std::size_t total = spec.kappas.size() * spec.count;
  std::vector<SdpResult> results(total);
  parallel_for(total, threads, [&](std::size_t i) {
    SdpResult& res = results[i];
    res.kappa = spec.kappas[i / spec.count];
    res.index = i;
    res.seed = linalg::derive_seed(spec.seed, i);
    try {
      const SdpNewtonProblem prob = synthetic_newton(spec.n, spec.m, res.kappa, res.seed);
      const SdpAdmmOperator op(prob);
      std::optional<SaddleReduction> red;
      for (const auto& s : solvers) {
        if (s.needs_reduction() && !red) red.emplace(to_ecqp(prob));
        res.runs.push_back(run_solver(op, red ? &*red : nullptr, s, cfg));
      }
    } catch (const std::exception& e) {
      res.runs.clear();
      res.error = e.what();
    }
  });
  return results;
}

void write_sdp_csv(std::ostream& os, const SdpSpec& spec, const std::vector<SdpResult>& results,
                   bool timing) {
  os << "index,seed,n,m,kappa,solver,iterations,status,final_residual";
  if (timing) os << ",seconds";
  os << '\n';
  for (const auto& r : results) {
    for (const auto& run : r.runs) {
      os << r.index << ',' << r.seed << ',' << spec.n << ',' << spec.m << ','
         << format_double(r.kappa) << ',' << run.solver.name() << ',' << run.iterations << ','
         << run.status << ',' << format_double(run.final_residual);
      if (timing) os << ',' << format_double(run.seconds);
      os << '\n';
    }
  }
}

}  // namespace admmgmres::cli
