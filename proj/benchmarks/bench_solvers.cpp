#include <ballsaddle/ballsaddle.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace ballsaddle;

namespace {

Matrix random_matrix(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = g(rng);
  return m;
}

/// x -> 0.3 A x + b with ||b|| well above the linear part, so sigma > 0.
SmoothMap bench_map(Eigen::Index n) {
  Point b = Point::Zero(n);
  b(0) = 2.0;
  return make_affine(0.3 * random_matrix(n, 7) / static_cast<double>(n), b, 1.0);
}

SaddleConfig vi_config(const ConstantsReport& rep) {
  SaddleConfig sc;
  sc.r = rep.r_max;
  sc.T = ConvexSet::ball(rep.r_max);
  sc.L = rep.M->value;
  return sc;
}

}  // namespace

static void BM_OpNorm(benchmark::State& state) {
  const Matrix A = random_matrix(state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(op_norm(A));
}
BENCHMARK(BM_OpNorm)->RangeMultiplier(4)->Range(4, 256);

static void BM_SolveSaddleVi(benchmark::State& state) {
  const SmoothMap phi = bench_map(state.range(0));
  const ConstantsReport rep = vi_report(phi);
  const Payoff J = vi_payoff(phi, *rep.M, rep.theta->value);
  const SaddleConfig sc = vi_config(rep);
  for (auto _ : state) benchmark::DoNotOptimize(solve_saddle(J, sc));
}
BENCHMARK(BM_SolveSaddleVi)->Arg(2)->Arg(8)->Arg(16);

static void BM_CheckSaddle(benchmark::State& state) {
  const SmoothMap phi = bench_map(4);
  const ConstantsReport rep = vi_report(phi);
  const Payoff J = vi_payoff(phi, *rep.M, rep.theta->value);
  const SaddleConfig sc = vi_config(rep);
  const SaddlePoint sp = solve_saddle(J, sc);
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_saddle(J, sp, sc, static_cast<std::size_t>(state.range(0)), 0));
  }
}
BENCHMARK(BM_CheckSaddle)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_CheckVi(benchmark::State& state) {
  const SmoothMap phi = bench_map(4);
  const ConstantsReport rep = vi_report(phi);
  const SaddlePoint sp = solve_saddle(vi_payoff(phi, *rep.M, rep.theta->value), vi_config(rep));
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_vi(phi, sp.x_star, rep.r_max, 10000, 0));
  }
}
BENCHMARK(BM_CheckVi)->Unit(benchmark::kMillisecond);

static void BM_GridViOracle(benchmark::State& state) {
  const SmoothMap phi = bench_map(2);
  const GridSpec g{static_cast<std::size_t>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(grid_vi_oracle(phi, 0.25, g));
}
BENCHMARK(BM_GridViOracle)->Arg(51)->Arg(101)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
