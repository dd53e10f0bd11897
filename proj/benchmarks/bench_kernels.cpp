#include <random>

#include <benchmark/benchmark.h>

#include "helmopt/analysis.hpp"
#include "helmopt/problems.hpp"
#include "helmopt/solve.hpp"
#include "helmopt/specfun.hpp"

using namespace helmopt;
using namespace helmopt::specfun;

namespace {

DiscreteSystem system_for(const char* name, int m_rho, int m_theta) {
  ProblemSpec p = make_problem(name);
  p.m_rho = m_rho;
  p.m_theta = m_theta;
  return make_system(p);
}

Eigen::MatrixXcd random_field(int rows, int cols) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = Complex(nd(rng), nd(rng));
  return m;
}

void BM_ConstraintApply(benchmark::State& state) {
  const DiscreteSystem sys = system_for("PVR1", static_cast<int>(state.range(0)), 21);
  const Eigen::MatrixXcd v = random_field(sys.grid.m_rho, sys.grid.m_theta);
  for (auto _ : state) benchmark::DoNotOptimize(sys.constraint.apply(v));
}
BENCHMARK(BM_ConstraintApply)->Arg(100)->Arg(300)->Arg(800)->Unit(benchmark::kMicrosecond);

void BM_FunctionalHessian(benchmark::State& state) {
  const DiscreteSystem sys = system_for("PVR1", static_cast<int>(state.range(0)), 21);
  const Eigen::MatrixXcd v = random_field(sys.grid.m_rho, sys.grid.m_theta);
  for (auto _ : state) benchmark::DoNotOptimize(sys.functional.hessian(v));
}
BENCHMARK(BM_FunctionalHessian)->Arg(100)->Arg(300)->Arg(800)->Unit(benchmark::kMicrosecond);

void BM_ModalSetup(benchmark::State& state) {
  const DiscreteSystem sys = system_for("f1", static_cast<int>(state.range(0)), 21);
  for (auto _ : state) benchmark::DoNotOptimize(ModalKktSolver(sys));
}
BENCHMARK(BM_ModalSetup)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_ModalSolve(benchmark::State& state) {
  const DiscreteSystem sys = system_for("f1", static_cast<int>(state.range(0)), 21);
  const ModalKktSolver m(sys);
  const KktSystem kkt(sys);
  const Eigen::VectorXcd b = kkt.rhs();
  for (auto _ : state) benchmark::DoNotOptimize(m.solve(b));
}
BENCHMARK(BM_ModalSolve)->Arg(100)->Arg(300)->Unit(benchmark::kMicrosecond);

void BM_SolveKkt(benchmark::State& state) {
  const KktSystem kkt(system_for("PVR1", static_cast<int>(state.range(0)), 21));
  for (auto _ : state) benchmark::DoNotOptimize(solve_kkt(kkt));
}
BENCHMARK(BM_SolveKkt)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_ToSpectral(benchmark::State& state) {
  const DiskGrid g = build_disk_grid(4.0, 21, static_cast<int>(state.range(0)));
  const Eigen::MatrixXcd v = random_field(g.m_rho, g.m_theta);
  for (auto _ : state) benchmark::DoNotOptimize(to_spectral(v, g));
}
BENCHMARK(BM_ToSpectral)->Arg(100)->Arg(400)->Unit(benchmark::kMicrosecond);

void BM_EvaluateAt(benchmark::State& state) {
  const DiskGrid g = build_disk_grid(4.0, 21, 100);
  const SpectralCoefficients c = to_spectral(random_field(g.m_rho, g.m_theta), g);
  double t = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_at(c, 0.7, t));
    t += 0.01;
  }
}
BENCHMARK(BM_EvaluateAt);

void BM_HankelH0(benchmark::State& state) {
  const double x = static_cast<double>(state.range(0)) / 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(hankel_h0(x));
}
BENCHMARK(BM_HankelH0)->Arg(5)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
