// Microbenchmarks for the hot paths: chain application, preliminary
// construction, and the sweep pipeline.

#include <benchmark/benchmark.h>

#include <random>

#include "ibf/butterfly.hpp"
#include "ibf/sweep.hpp"

namespace {

using namespace ibf;

Box interval(double center, double width) {
  Box b;
  b.dim = 1;
  b.center = Point(center);
  b.width = Point(width);
  return b;
}

struct Setup {
  std::vector<Point> x;
  std::vector<Point> omega;
  Box x_domain{interval(0.5, 1.0)};
  Box omega_domain;

  explicit Setup(std::int64_t n) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::int64_t i = 0; i < n; ++i) x.emplace_back(unit(rng));
    for (std::int64_t j = -n / 2; j < n / 2; ++j) omega.emplace_back(static_cast<double>(j));
    omega_domain = interval(0.0, static_cast<double>(n));
  }
};

Eigen::VectorXcd random_vector(std::int64_t n) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXcd v(n);
  for (std::int64_t i = 0; i < n; ++i) v[i] = Complex(gauss(rng), gauss(rng));
  return v;
}

void bm_build_preliminary(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  const Setup s(n);
  const BuildPlan plan =
      make_plan(PhaseSpec::nufft1d(), s.x, s.x_domain, s.omega, s.omega_domain, 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_preliminary(plan, 3e-4));
  }
  state.SetComplexityN(n);
}

void bm_sweep_pipeline(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  const Setup s(n);
  const BuildPlan plan =
      make_plan(PhaseSpec::nufft1d(), s.x, s.x_domain, s.omega, s.omega_domain, 6);
  const Factorization pre = build_preliminary(plan, 3e-4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sweep_in(sweep_out(Factorization(pre), 3e-4), 3e-4));
  }
  state.SetComplexityN(n);
}

void bm_apply_optimal(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  const Setup s(n);
  const BuildPlan plan =
      make_plan(PhaseSpec::nufft1d(), s.x, s.x_domain, s.omega, s.omega_domain, 6);
  const Factorization opt =
      sweep_in(sweep_out(build_preliminary(plan, 3e-4), 3e-4), 3e-4);
  const Eigen::VectorXcd g = random_vector(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(apply_factorization(opt, g));
  }
  state.SetComplexityN(n);
}

void bm_blocksparse_matvec(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  const Setup s(n);
  const BuildPlan plan =
      make_plan(PhaseSpec::nufft1d(), s.x, s.x_domain, s.omega, s.omega_domain, 6);
  const Factorization pre = build_preliminary(plan, 3e-4);
  const auto& mid = pre.factors[static_cast<std::size_t>(1 + plan.depth() - plan.switch_level())];
  const Eigen::VectorXcd g = random_vector(mid.cols());
  for (auto _ : state) {
    benchmark::DoNotOptimize(mid.matvec(g));
  }
}

BENCHMARK(bm_build_preliminary)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_sweep_pipeline)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_apply_optimal)->Arg(256)->Arg(1024)->Arg(4096)->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_blocksparse_matvec)->Arg(1024)->Arg(4096)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
