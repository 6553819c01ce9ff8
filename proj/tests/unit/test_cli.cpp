#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "admmgmres/linalg/random.hpp"
#include "cli/commands.hpp"
#include "cli/experiment.hpp"
#include "cli/svg.hpp"

using namespace admmgmres;
using namespace admmgmres::cli;

namespace {

std::size_t count_substr(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

// Element nesting check: every open tag is closed in order; comments, the
// XML declaration and self-closing tags are skipped.
bool tags_balanced(const std::string& xml) {
  std::vector<std::string> stack;
  std::size_t pos = 0;
  while ((pos = xml.find('<', pos)) != std::string::npos) {
    const std::size_t end = xml.find('>', pos);
    if (end == std::string::npos) return false;
    const std::string tag = xml.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.empty()) return false;
    if (tag[0] == '?' || tag[0] == '!' || tag.back() == '/') continue;
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
      continue;
    }
    stack.push_back(tag.substr(0, tag.find_first_of(" \t\n")));
  }
  return stack.empty();
}

RunConfig quick_config() {
  RunConfig cfg;
  cfg.tol = 1e-6;
  cfg.max_iters = 2000;
  return cfg;
}

SweepSpec small_sweep(std::size_t count) {
  SweepSpec spec;
  spec.n = 24;
  spec.count = count;
  spec.seed = 7;
  spec.s_max = 1.5;
  return spec;
}

}  // namespace

TEST(SolverParsing, CanonicalNamesRoundTrip) {
  for (const auto& s : all_solvers(17)) EXPECT_EQ(parse_solver(s.name()), s) << s.name();
  EXPECT_EQ(parse_solver("sor").kind, SolverKind::sor);
  EXPECT_EQ(parse_solver("gmres(17)").name(), "gmres(17)");
}

TEST(SolverParsing, AliasesAndWhitespace) {
  EXPECT_EQ(parse_solver("admm-gmres"), parse_solver("gmres"));
  EXPECT_EQ(parse_solver("admm-gmres(10)"), parse_solver("gmres(10)"));
  const auto list = parse_solver_list(" admm , gmres(10) ");
  ASSERT_EQ(list.size(), 2u);
  EXPECT_EQ(list[1].restart, std::optional<std::size_t>(10));
}

TEST(SolverParsing, ListExpansionDropsDuplicates) {
  EXPECT_EQ(parse_solver_list("all", 30), all_solvers(30));
  const auto list = parse_solver_list("gmres,restarted,gmres(12),admm,gmres", 12);
  EXPECT_EQ(join_solver_names(list), "gmres,gmres(12),admm");
}

TEST(SolverParsing, RejectsBadInput) {
  EXPECT_THROW(parse_solver("cg"), std::invalid_argument);
  EXPECT_THROW(parse_solver("gmres(0)"), std::invalid_argument);
  EXPECT_THROW(parse_solver("gmres(x)"), std::invalid_argument);
  EXPECT_THROW(parse_solver_list(""), std::invalid_argument);
  EXPECT_THROW(parse_solver_list(" , "), std::invalid_argument);
}

TEST(Slope, RecoversPowerLaw) {
  linalg::Rng rng(3);
  for (double p : {0.25, 0.5, 1.0}) {
    std::vector<double> x, y;
    for (int i = 0; i < 30; ++i) {
      const double k = std::pow(10.0, rng.uniform(0, 8));
      x.push_back(k);
      y.push_back(4.0 * std::pow(k, p));
    }
    EXPECT_NEAR(loglog_slope(x, y), p, 1e-12);
  }
}

TEST(Slope, MatchesTwoPointFormula) {
  const std::vector<double> x = {10.0, 1000.0};
  const std::vector<double> y = {7.0, 90.0};
  const double want = (std::log10(90.0) - std::log10(7.0)) / 2.0;
  EXPECT_NEAR(loglog_slope(x, y), want, 1e-14);
  EXPECT_THROW(loglog_slope({5.0, 5.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST(GeometricRate, ExactOnGeometricSequence) {
  std::vector<double> h;
  for (int k = 0; k < 60; ++k) h.push_back(3.0 * std::pow(0.93, k));
  EXPECT_NEAR(fit_geometric_rate(h, 10, 40), 0.93, 1e-12);
  EXPECT_NEAR(fit_geometric_rate(h, 50, 500), 0.93, 1e-12);
  EXPECT_TRUE(std::isnan(fit_geometric_rate(h, 59, 80)));
}

TEST(KappaBins, BoundariesBelongToLowerBin) {
  EXPECT_EQ(kappa_bins().size(), 6u);
  EXPECT_EQ(kappa_bin_index(1.0), 0u);
  EXPECT_EQ(kappa_bin_index(100.0), 0u);
  EXPECT_EQ(kappa_bin_index(100.0 * (1 + 1e-12)), 1u);
  EXPECT_EQ(kappa_bin_index(1e4), 1u);
  EXPECT_EQ(kappa_bin_index(1e9), 4u);
  EXPECT_EQ(kappa_bin_index(1e10), 4u);
  EXPECT_EQ(kappa_bin_index(1e14), 5u);
}

TEST(SweepSpec, MatchesSampleInstanceWhenFree) {
  const SweepSpec spec = small_sweep(5);
  for (std::size_t i = 0; i < spec.count; ++i) {
    const InstanceParams a = spec.instance(i);
    const InstanceParams b = sample_instance(spec.n, spec.s_min, spec.s_max, spec.seed, i);
    EXPECT_EQ(a.m, b.m);
    EXPECT_EQ(a.l, b.l);
    EXPECT_EQ(a.s, b.s);
    EXPECT_EQ(a.seed, b.seed);
  }
}

TEST(SweepSpec, FixedDimensionsAreHonoured) {
  SweepSpec spec = small_sweep(6);
  spec.m = 10;
  spec.l = 4;
  for (std::size_t i = 0; i < spec.count; ++i) {
    EXPECT_EQ(spec.instance(i).m, 10u);
    EXPECT_EQ(spec.instance(i).l, 4u);
  }
  spec.m = 30;
  EXPECT_THROW(spec.validate(), std::invalid_argument);
}

TEST(Sweep, ResultsIndependentOfThreadCount) {
  const SweepSpec spec = small_sweep(8);
  const auto solvers = parse_solver_list("admm,gmres,gmres(5)");
  const auto one = run_sweep(spec, solvers, quick_config(), true, 1);
  const auto four = run_sweep(spec, solvers, quick_config(), true, 4);
  std::ostringstream a, b;
  write_sweep_csv(a, one, false);
  write_sweep_csv(b, four, false);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Sweep, CsvHasOneRowPerInstanceAndSolver) {
  const SweepSpec spec = small_sweep(5);
  const auto solvers = parse_solver_list("admm,sor,gmres,constr2");
  const auto results = run_sweep(spec, solvers, quick_config(), false, 2);
  std::ostringstream os;
  write_sweep_csv(os, results, true);
  const auto lines = lines_of(os.str());
  ASSERT_EQ(lines.size(), 1 + spec.count * solvers.size());
  EXPECT_EQ(lines[0].rfind("index,seed,n,m,l,s,kappa,solver,iterations,status", 0), 0u);
  EXPECT_NE(lines[0].find(",seconds"), std::string::npos);
  for (std::size_t i = 1; i < lines.size(); ++i)
    EXPECT_EQ(count_substr(lines[i], ","), count_substr(lines[0], ",")) << lines[i];
}

TEST(Sweep, GmresNeverSlowerThanAdmm) {
  const auto results = run_sweep(small_sweep(10), parse_solver_list("admm,gmres"), quick_config(),
                                 false, 2);
  for (const auto& r : results) {
    ASSERT_EQ(r.runs.size(), 2u);
    ASSERT_TRUE(r.runs[1].converged()) << "instance " << r.index;
    if (r.runs[0].converged()) EXPECT_LE(r.runs[1].iterations, r.runs[0].iterations);
  }
}

TEST(Sweep, KappaCapSkipsFixedPointSolvers) {
  RunConfig cfg = quick_config();
  cfg.admm_kappa_max = 1.0;
  const auto results = run_sweep(small_sweep(2), parse_solver_list("admm,gmres"), cfg, false, 1);
  for (const auto& r : results) {
    EXPECT_EQ(r.runs[0].status, "skipped");
    EXPECT_TRUE(r.runs[1].converged());
  }
}

TEST(Compare, CellsAggregateIterations) {
  const SweepSpec spec = small_sweep(12);
  const auto solvers = parse_solver_list("admm,gmres");
  const auto results = run_sweep(spec, solvers, quick_config(), false, 2);
  const auto cells = compare_table(results, solvers);
  std::size_t instances = 0;
  for (const auto& c : cells) {
    std::size_t want_max = 0, want_n = 0;
    for (const auto& r : results) {
      if (kappa_bins()[kappa_bin_index(r.kappa)].label != c.bin) continue;
      for (const auto& run : r.runs)
        if (run.solver.name() == c.solver) {
          ++want_n;
          want_max = std::max(want_max, run.iterations);
        }
    }
    EXPECT_EQ(c.instances, want_n);
    EXPECT_EQ(c.max_iterations, want_max);
    if (c.solver == "admm") instances += c.instances;
  }
  EXPECT_EQ(instances, spec.count);

  std::ostringstream csv;
  write_compare_csv(csv, cells, false);
  EXPECT_EQ(lines_of(csv.str()).size(), 1 + cells.size());
}

TEST(Svg, WellFormedWithOneMarkerPerPoint) {
  Plot plot("iterations & <kappa>", {"kappa", true}, {"iterations", true});
  plot.add(ScatterSeries{"a", {1, 10, 100}, {2, 3, 4}, palette(0), MarkerShape::circle});
  plot.add(ScatterSeries{"b", {5, 50}, {0.0, 9}, palette(1), MarkerShape::cross});
  plot.add(sample_curve("sqrt", [](double k) { return std::sqrt(k); }, 1, 100, 20, true));
  const std::string svg = plot.str();
  EXPECT_TRUE(tags_balanced(svg));
  EXPECT_EQ(count_substr(svg, "class=\"marker\""), 5u);
  EXPECT_NE(svg.find("&amp; &lt;kappa&gt;"), std::string::npos);
  EXPECT_EQ(svg.find("nan"), std::string::npos);
}

TEST(Svg, SweepPlotMarkersMatchCsvRows) {
  const auto solvers = parse_solver_list("admm,gmres");
  const auto results = run_sweep(small_sweep(6), solvers, quick_config(), false, 2);
  const std::string svg = sweep_plot(results, solvers).str();
  EXPECT_TRUE(tags_balanced(svg));
  EXPECT_EQ(count_substr(svg, "class=\"marker\""), 12u);
}

TEST(Svg, EscapesAllSpecialCharacters) {
  EXPECT_EQ(xml_escape("a<b>&\"'"), "a&lt;b&gt;&amp;&quot;&apos;");
}

TEST(WorstCase, SorMatchesRateLine) {
  RunConfig cfg;
  cfg.tol = 1e-10;
  cfg.max_iters = 80;
  const WorstCaseRun wc = run_worstcase(16, 100.0, cfg, 10, 40);
  EXPECT_NEAR(wc.a, 9.0 / 11.0, 1e-15);
  EXPECT_NEAR(wc.rate_sor, wc.a, 0.05 * wc.a);
  ASSERT_FALSE(wc.gmres.empty());
  EXPECT_DOUBLE_EQ(wc.admm.front(), 1.0);
  const std::size_t n = std::min(wc.admm.size(), wc.gmres.size());
  for (std::size_t k = 0; k < n; ++k) EXPECT_LE(wc.gmres[k], wc.admm[k] * (1 + 1e-9) + 1e-12);
}

TEST(Sdp, RowsPerKappaAndSolver) {
  SdpSpec spec;
  spec.n = 4;
  spec.m = 5;
  spec.kappas = {1e2, 1e4};
  spec.count = 2;
  const auto solvers = parse_solver_list("admm,gmres,constr2");
  RunConfig cfg = quick_config();
  const auto results = run_sdp(spec, solvers, cfg, 2);
  ASSERT_EQ(results.size(), 4u);
  std::ostringstream os;
  write_sdp_csv(os, spec, results, false);
  EXPECT_EQ(lines_of(os.str()).size(), 1 + 4 * solvers.size());
  for (const auto& r : results) EXPECT_TRUE(r.runs[1].converged()) << r.kappa;
}

TEST(Commands, ExitCodes) {
  ExperimentConfig cfg = default_config(Command::sweep);
  cfg.n = 20;
  cfg.count = 3;
  cfg.s_max = 1.0;
  cfg.max_iters = 5000;
  cfg.threads = 2;
  cfg.diagnostics = false;
  std::ostringstream out, log;
  EXPECT_EQ(run_command(cfg, out, log), kExitOk) << log.str();
  EXPECT_EQ(lines_of(out.str()).size(), 1u + 3 * 2);

  cfg.max_iters = 1;
  EXPECT_EQ(run_command(cfg, out, log), kExitNotConverged);

  cfg.count = 0;
  EXPECT_EQ(run_command(cfg, out, log), kExitError);

  ExperimentConfig bad = default_config(Command::sweep);
  bad.solvers = "nosuch";
  EXPECT_EQ(run_command(bad, out, log), kExitError);
}

TEST(Commands, ConfigTextListsOnlySetValues) {
  ExperimentConfig cfg = default_config(Command::sdp);
  cfg.kappas = {100, 1e6};
  cfg.tol = 1e-7;
  const std::string text = to_config_string(cfg);
  EXPECT_EQ(text.rfind("[sdp]\n", 0), 0u);
  EXPECT_NE(text.find("kappas=[100,1e+06]"), std::string::npos);
  EXPECT_NE(text.find("tol=1e-07"), std::string::npos);
  EXPECT_EQ(text.find("\nl="), std::string::npos);
  EXPECT_EQ(text.find("admm-max-iters"), std::string::npos);
}

TEST(Commands, DefaultsPerCommand) {
  EXPECT_EQ(default_config(Command::compare).solvers, "all");
  EXPECT_EQ(default_config(Command::worstcase).m, std::optional<std::size_t>(64));
  EXPECT_EQ(default_config(Command::solve).solvers, "gmres");
  for (Command c : {Command::sweep, Command::compare, Command::worstcase, Command::diagnose,
                    Command::sdp})
    EXPECT_NO_THROW(default_config(c).validate()) << to_string(c);
}
