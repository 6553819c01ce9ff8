#include <benchmark/benchmark.h>

#include <cmath>

#include "admmgmres/admm.hpp"
#include "admmgmres/diagnostics.hpp"
#include "admmgmres/krylov.hpp"
#include "admmgmres/linalg/decompositions.hpp"
#include "admmgmres/linalg/eigen.hpp"
#include "admmgmres/precond.hpp"
#include "admmgmres/sdp.hpp"

using namespace admmgmres;
using namespace admmgmres::linalg;

namespace {

// n, m = 3n/4, l = n/2, s = 1 (kappa around 1e4).
EcqpProblem bench_problem(std::size_t n) { return random_problem(n, 3 * n / 4, n / 2, 1.0, 42); }

void BM_ApplyT(benchmark::State& state) {
  const auto route = state.range(1) ? XSolveRoute::woodbury : XSolveRoute::eigen;
  const EcqpProblem prob = bench_problem(state.range(0));
  const AdmmOperator op(prob, optimal_beta(spectral_constants(prob)), route);
  Rng rng(1);
  const Vector u = rng.gaussian_vector(op.dim());
  Vector out(op.dim());
  for (auto _ : state) {
    op.apply(u, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_ApplyT)->ArgsProduct({{50, 100, 200, 400}, {0, 1}});

void BM_OperatorSetup(benchmark::State& state) {
  const EcqpProblem prob = bench_problem(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(AdmmOperator(prob).beta());
}
BENCHMARK(BM_OperatorSetup)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_AdmmGmresSolve(benchmark::State& state) {
  const AdmmOperator op(bench_problem(state.range(0)));
  const Vector u0(op.dim(), 0.0);
  KrylovConfig cfg;
  cfg.tol = 1e-6;
  if (state.range(1)) cfg.restart = state.range(1);
  std::size_t iters = 0;
  for (auto _ : state) iters = admm_gmres(op, u0, cfg).second.iterations;
  state.counters["iterations"] = static_cast<double>(iters);
}
BENCHMARK(BM_AdmmGmresSolve)
    ->ArgsProduct({{50, 200}, {0, 25}})
    ->Unit(benchmark::kMillisecond);

void BM_AdmmSolve(benchmark::State& state) {
  const AdmmOperator op(bench_problem(state.range(0)));
  const Vector u0(op.dim(), 0.0);
  std::size_t iters = 0;
  for (auto _ : state) iters = solve_admm(op, u0, 1e-6, 100000).second.iterations;
  state.counters["iterations"] = static_cast<double>(iters);
}
BENCHMARK(BM_AdmmSolve)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_Preconditioned(benchmark::State& state) {
  const SaddleReduction red(bench_problem(100));
  const auto method = static_cast<SaddleMethod>(state.range(0));
  KrylovConfig cfg;
  cfg.tol = 1e-6;
  std::size_t iters = 0;
  for (auto _ : state) iters = solve_preconditioned(red, method, cfg).second.iterations;
  state.SetLabel(std::string(to_string(method)));
  state.counters["iterations"] = static_cast<double>(iters);
}
BENCHMARK(BM_Preconditioned)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_DenseSaddleSolve(benchmark::State& state) {
  const EcqpProblem prob = bench_problem(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_saddle_dense(prob).data());
}
BENCHMARK(BM_DenseSaddleSolve)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_GeneralEigen(benchmark::State& state) {
  Rng rng(2);
  const Matrix a = rng.gaussian_matrix(state.range(0), state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gen_eig(a, state.range(1) != 0).values.data());
}
BENCHMARK(BM_GeneralEigen)->ArgsProduct({{50, 150}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_Diagnose(benchmark::State& state) {
  const EcqpProblem prob = bench_problem(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(diagnose(prob).delta);
}
BENCHMARK(BM_Diagnose)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_KronSolve(benchmark::State& state) {
  Rng rng(3);
  const std::size_t n = state.range(0);
  const SdpNewtonProblem prob = synthetic_newton(n, n, 1e4, 5);
  const auto eig = sym_eig(prob.W);
  const Matrix c = symmetrized(rng.gaussian_matrix(n, n));
  for (auto _ : state) benchmark::DoNotOptimize(kron_solve(eig, 1.0, c).data());
}
BENCHMARK(BM_KronSolve)->Arg(10)->Arg(40)->Arg(100);

void BM_SdpAdmmGmres(benchmark::State& state) {
  const SdpAdmmOperator op(synthetic_newton(state.range(0), 2 * state.range(0), 1e4, 7));
  const Vector u0(op.dim(), 0.0);
  KrylovConfig cfg;
  cfg.tol = 1e-6;
  std::size_t iters = 0;
  for (auto _ : state) iters = admm_gmres(op, u0, cfg).second.iterations;
  state.counters["iterations"] = static_cast<double>(iters);
}
BENCHMARK(BM_SdpAdmmGmres)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
