#include <benchmark/benchmark.h>

#include "bbeig/eigensolver.hpp"
#include "bbeig/limit_problem.hpp"
#include "bbeig/placement.hpp"
#include "bbeig/special_functions.hpp"

using namespace bbeig;

namespace {

DomainPtr square(double h) {
  const Shape s = Shape::unit_square();
  return build_domain(s, make_grid(s, h));
}

void BM_BesselK0(benchmark::State& state) {
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bessel_k(BesselOrder(0), x));
    x = x < 40.0 ? x * 1.01 : 0.1;
  }
}
BENCHMARK(BM_BesselK0);

void BM_BesselJ0(benchmark::State& state) {
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bessel_j(BesselOrder(0), x));
    x = x < 40.0 ? x * 1.01 : 0.1;
  }
}
BENCHMARK(BM_BesselJ0);

void BM_LimitProblem(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(solve_limit_problem(WeightParams::standard(2, 1.0, 0.25)).phi);
}
BENCHMARK(BM_LimitProblem);

void BM_Rasterize(benchmark::State& state) {
  const auto d = square(1.0 / state.range(0));
  const auto ball = BallSpec::with_measure(2, {0.5, 0.5}, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(rasterize_weight(*d, ball, 1.0, 0.25).values.data());
}
BENCHMARK(BM_Rasterize)->Arg(64)->Arg(256);

void BM_Factorize(benchmark::State& state) {
  const auto op = assemble(square(1.0 / state.range(0)));
  for (auto _ : state) {
    SpdSolver s;
    s.compute(op.matrix);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_Factorize)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_PrincipalEigenvalue(benchmark::State& state) {
  const auto d = square(1.0 / state.range(0));
  const auto op = assemble(d);
  const auto w = rasterize_weight(*d, BallSpec::with_measure(2, {0.5, 0.5}, 0.05), 1.0, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(principal_eigenvalue(op, w).lambda);
}
BENCHMARK(BM_PrincipalEigenvalue)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

// Fresh problem per iteration: lambda values are cached per center.
void BM_PlacementEvaluation(benchmark::State& state) {
  const double eps = 0.05;
  const auto d = square(ball_radius(2, eps) / 8);
  for (auto _ : state) {
    PlacementProblem prob(d, eps, 1.0, 0.25);
    benchmark::DoNotOptimize(prob.lambda({0.5, 0.5}));
  }
}
BENCHMARK(BM_PlacementEvaluation)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
