#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ibf/bench.hpp"

using namespace ibf;

TEST_CASE("relative error reduces to the plain norm ratio under full sampling") {
  Eigen::VectorXcd u(3);
  u << Complex(1.0, 0.0), Complex(0.0, 2.0), Complex(2.0, 0.0);
  const auto exact = [](std::int64_t i) {
    switch (i) {
      case 0: return Complex(1.0, 0.0);
      case 1: return Complex(0.0, 2.0);
      default: return Complex(2.0, 1.0);
    }
  };
  // Only the last entry differs: error 1, reference norm sqrt(1+4+5) = 3.1623.
  const double err = relative_error(u, exact, 16, 0);
  CHECK(err == doctest::Approx(1.0 / std::sqrt(10.0)).epsilon(1e-12));

  const auto zero = [](std::int64_t) { return Complex(0.0, 0.0); };
  CHECK_THROWS_AS(relative_error(u, zero, 16, 0), std::domain_error);
  CHECK_THROWS_AS(relative_error(u, exact, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(relative_error(Eigen::VectorXcd(), exact, 4, 0), std::invalid_argument);
}

TEST_CASE("subsampled error estimates are deterministic in the seed") {
  Eigen::VectorXcd u(64);
  for (int i = 0; i < 64; ++i) u[i] = Complex(i, -i);
  const auto exact = [](std::int64_t i) { return Complex(static_cast<double>(i), -1.0 - i); };
  const double a = relative_error(u, exact, 8, 7);
  const double b = relative_error(u, exact, 8, 7);
  CHECK(a == b);
}

TEST_CASE("direct application is the dense sum") {
  const PhaseSpec spec = PhaseSpec::nufft1d();
  const std::vector<Point> x = {Point(0.0), Point(0.5)};
  const std::vector<Point> omega = {Point(-1.0), Point(0.0), Point(2.0)};
  Eigen::VectorXcd g(3);
  g << Complex(1.0, 0.0), Complex(0.0, 1.0), Complex(-1.0, 0.5);

  const Eigen::VectorXcd u = direct_apply(spec, x, omega, g);
  REQUIRE(u.size() == 2);
  for (int i = 0; i < 2; ++i) {
    Complex want = 0.0;
    for (int j = 0; j < 3; ++j) want += kernel(spec, x[static_cast<std::size_t>(i)], omega[static_cast<std::size_t>(j)]) * g[j];
    CHECK(std::abs(u[i] - want) <= 1e-14);
  }
  CHECK_THROWS_AS(direct_apply(spec, x, omega, Eigen::VectorXcd::Ones(2)), std::invalid_argument);
}

TEST_CASE("compression ratio and default tolerances") {
  CHECK(compression_ratio(100, 50) == doctest::Approx(2.0));
  CHECK(compression_ratio(0, 0) == doctest::Approx(1.0));
  CHECK(default_tol_for_order(6) == doctest::Approx(3e-4));
  CHECK(default_tol_for_order(7) == doctest::Approx(3e-4));
  CHECK(default_tol_for_order(9) == doctest::Approx(1e-8));
  CHECK(default_tol_for_order(10) == doctest::Approx(1e-8));
  CHECK_THROWS_AS(default_tol_for_order(8), std::invalid_argument);
  CHECK_THROWS_AS(default_tol_for_order(2), std::invalid_argument);
}

TEST_CASE("csv rows carry every field under the fixed header") {
  CHECK(csv_header() ==
        "transform,N,d,q,tol,stage,eps,r_comp,nnz_pre,nnz_opt,t_factor_s,t_apply_s,seed");
  BenchRecord r;
  r.transform = "fio1d";
  r.n = 1024;
  r.d = 1;
  r.q = 7;
  r.tol = 3e-4;
  r.stage = "optimal";
  r.eps = 1.25e-3;
  r.r_comp = 2.5;
  r.nnz_pre = 1000;
  r.nnz_opt = 400;
  r.t_factor_s = 1.5;
  r.t_apply_s = 0.25;
  r.seed = 11;
  const std::string row = to_csv_row(r);
  CHECK(row.find("fio1d,1024,1,7,") == 0);
  CHECK(std::count(row.begin(), row.end(), ',') == 12);
  CHECK(row.find("optimal") != std::string::npos);
  CHECK(row.find(",11") == row.size() - 3);
}

TEST_CASE("the benchmark runner produces accurate records end to end") {
  BenchConfig config;
  config.transform = PhaseVariant::Nufft1d;
  config.sizes = {64};
  config.q = 5;
  config.tol = 1e-5;
  config.seed = 3;
  config.sample = 64;

  const auto records = run_benchmark(config);
  REQUIRE(records.size() == 1);
  const auto& r = records[0];
  CHECK(r.transform == "nufft1d");
  CHECK(r.n == 64);
  CHECK(r.d == 1);
  CHECK(r.stage == "optimal");
  CHECK(r.eps <= 2e-2);
  CHECK(r.nnz_pre >= r.nnz_opt);
  CHECK(r.r_comp >= 1.0);
  CHECK(r.t_factor_s > 0.0);
  CHECK(r.t_apply_s > 0.0);
}

TEST_CASE("the runner validates its configuration") {
  BenchConfig config;
  config.transform = PhaseVariant::Nufft1d;
  CHECK_THROWS_AS(run_benchmark(config), std::invalid_argument);  // no sizes

  config.sizes = {48};  // not a power of two
  CHECK_THROWS_AS(run_benchmark(config), std::invalid_argument);

  config.sizes = {64};
  config.q = 8;  // no default tolerance for this order
  CHECK_THROWS_AS(run_benchmark(config), std::invalid_argument);

  config.q = 6;
  config.tol = 2.0;
  CHECK_THROWS_AS(run_benchmark(config), std::invalid_argument);

  BenchConfig flat;
  flat.transform = PhaseVariant::Fio2d;
  flat.sizes = {1000};  // not a square of a power of two
  flat.tol = 1e-4;
  CHECK_THROWS_AS(run_benchmark(flat), std::invalid_argument);

  flat.sizes = {256};
  flat.save_path = "nope.ibf";
  CHECK_THROWS_AS(run_benchmark(flat), std::invalid_argument);

  BenchConfig custom;
  custom.transform = PhaseVariant::Custom;
  custom.sizes = {64};
  custom.tol = 1e-4;
  CHECK_THROWS_AS(run_benchmark(custom), std::invalid_argument);
}

TEST_CASE("saving and reloading reproduces the transform bit for bit") {
  const std::string path = "bench_roundtrip.ibf";
  BenchConfig config;
  config.transform = PhaseVariant::Fio1d;
  config.sizes = {64};
  config.q = 5;
  config.tol = 1e-5;
  config.seed = 9;
  config.sample = 64;
  config.save_path = path;

  const auto built = run_benchmark(config);
  REQUIRE(built.size() == 1);

  BenchConfig reload = config;
  reload.save_path.clear();
  reload.load_path = path;
  const auto loaded = run_benchmark(reload);
  REQUIRE(loaded.size() == 1);

  // The loaded factors are byte-identical, so the sampled error must agree
  // exactly; a load has nothing left to compress.
  CHECK(loaded[0].eps == built[0].eps);
  CHECK(loaded[0].r_comp == doctest::Approx(1.0));
  CHECK(loaded[0].nnz_pre == loaded[0].nnz_opt);
  CHECK(loaded[0].nnz_opt == built[0].nnz_opt);

  // A mismatched configuration is rejected rather than silently misused.
  BenchConfig wrong = reload;
  wrong.q = 6;
  wrong.tol = 1e-5;
  CHECK_THROWS_AS(run_benchmark(wrong), std::invalid_argument);
  std::remove(path.c_str());
}

TEST_CASE("csv output lands in the requested file with one header") {
  const std::string path = "bench_out_test.csv";
  std::remove(path.c_str());
  BenchConfig config;
  config.transform = PhaseVariant::Nufft1d;
  config.sizes = {64};
  config.q = 5;
  config.tol = 1e-4;
  config.sample = 32;
  config.out_csv = path;

  run_benchmark(config);
  run_benchmark(config);  // append: no second header

  std::ifstream is(path);
  REQUIRE(is.good());
  std::string line;
  int lines = 0, headers = 0;
  while (std::getline(is, line)) {
    if (line == csv_header()) ++headers;
    if (!line.empty()) ++lines;
  }
  CHECK(headers == 1);
  CHECK(lines == 3);
  std::remove(path.c_str());
}
