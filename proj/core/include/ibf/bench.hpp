//
// bench : direct reference apply, error/compression metrics, benchmark runner
//

#pragma once

#include <functional>
#include <string>

#include "ibf/blocksparse.hpp"

namespace ibf {

// u_i = sum_j K(x_i, xi_j) g_j, evaluated in the given orders.
Eigen::VectorXcd direct_apply(const PhaseSpec& spec, std::span<const Point> x,
                              std::span<const Point> omega, const Eigen::VectorXcd& g);

// Relative l2 error over a seeded sample of rows drawn without replacement
// (all rows when the vector is short). Throws std::domain_error if the
// sampled exact values are all zero.
double relative_error(const Eigen::VectorXcd& u_approx,
                      const std::function<Complex(std::int64_t)>& u_exact,
                      std::int64_t sample_size, std::uint64_t seed);

double compression_ratio(std::int64_t nnz_preliminary, std::int64_t nnz_final);

struct BenchConfig {
  PhaseVariant transform{PhaseVariant::Nufft1d};
  std::vector<std::int64_t> sizes;  // N per run
  int q{6};
  double tol{-1.0};  // <= 0: default by q (3e-4 for q in {6,7}, 1e-8 for {9,10})
  std::uint64_t seed{0};
  Stage stage{Stage::Optimal};
  std::int64_t sample{256};
  int depth{-1};  // <= 0: default depth rule
  std::string out_csv;    // append records when nonempty
  std::string save_path;  // serialize the built factorization (1D transforms)
  std::string load_path;  // deserialize instead of building (1D transforms)
};

struct BenchRecord {
  std::string transform;
  std::int64_t n{0};
  int d{1};
  int q{0};
  double tol{0.0};
  std::string stage;
  double eps{0.0};
  double r_comp{1.0};
  std::int64_t nnz_pre{0};
  std::int64_t nnz_opt{0};  // nnz at the reported stage
  double t_factor_s{0.0};
  double t_apply_s{0.0};
  std::uint64_t seed{0};
};

std::string csv_header();
std::string to_csv_row(const BenchRecord& r);

// One record per configured size. Point sets, input vector, and the error
// sample are all drawn deterministically from the seed. Configuration
// problems throw std::invalid_argument; degenerate accuracy measurements
// throw std::domain_error.
std::vector<BenchRecord> run_benchmark(const BenchConfig& config);

double default_tol_for_order(int q);

}  // namespace ibf
