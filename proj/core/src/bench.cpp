#include "ibf/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <stdexcept>

#include "ibf/butterfly.hpp"
#include "ibf/multiscale.hpp"
#include "ibf/sweep.hpp"

namespace ibf {

Eigen::VectorXcd direct_apply(const PhaseSpec& spec, std::span<const Point> x,
                              std::span<const Point> omega, const Eigen::VectorXcd& g) {
  if (static_cast<std::int64_t>(omega.size()) != g.size()) {
    throw std::invalid_argument("input length does not match the point set");
  }
  Eigen::VectorXcd u(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    Complex acc = 0.0;
    for (std::size_t j = 0; j < omega.size(); ++j) {
      acc += kernel(spec, x[i], omega[j]) * g[static_cast<Eigen::Index>(j)];
    }
    u[static_cast<Eigen::Index>(i)] = acc;
  }
  return u;
}

double relative_error(const Eigen::VectorXcd& u_approx,
                      const std::function<Complex(std::int64_t)>& u_exact,
                      std::int64_t sample_size, std::uint64_t seed) {
  if (sample_size < 1) throw std::invalid_argument("sample size must be positive");
  const std::int64_t n = u_approx.size();
  if (n == 0) throw std::invalid_argument("empty vector");

  std::vector<std::int64_t> rows;
  if (n <= sample_size) {
    rows.resize(static_cast<std::size_t>(n));
    std::iota(rows.begin(), rows.end(), 0);
  } else {
    std::vector<std::int64_t> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    std::mt19937_64 rng(seed);
    std::sample(all.begin(), all.end(), std::back_inserter(rows),
                static_cast<std::size_t>(sample_size), rng);
  }

  double num = 0.0, den = 0.0;
  for (auto i : rows) {
    const Complex exact = u_exact(i);
    num += std::norm(u_approx[i] - exact);
    den += std::norm(exact);
  }
  if (den == 0.0) throw std::domain_error("sampled reference values are all zero");
  return std::sqrt(num / den);
}

double compression_ratio(std::int64_t nnz_preliminary, std::int64_t nnz_final) {
  if (nnz_preliminary <= 0 || nnz_final <= 0) return 1.0;
  return static_cast<double>(nnz_preliminary) / static_cast<double>(nnz_final);
}

double default_tol_for_order(int q) {
  if (q == 6 || q == 7) return 3e-4;
  if (q == 9 || q == 10) return 1e-8;
  throw std::invalid_argument("no default tolerance for this Chebyshev order; pass one");
}

std::string csv_header() {
  return "transform,N,d,q,tol,stage,eps,r_comp,nnz_pre,nnz_opt,t_factor_s,t_apply_s,seed";
}

std::string to_csv_row(const BenchRecord& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%s,%lld,%d,%d,%.6g,%s,%.6e,%.6g,%lld,%lld,%.6f,%.6f,%llu",
                r.transform.c_str(), static_cast<long long>(r.n), r.d, r.q, r.tol,
                r.stage.c_str(), r.eps, r.r_comp, static_cast<long long>(r.nnz_pre),
                static_cast<long long>(r.nnz_opt), r.t_factor_s, r.t_apply_s,
                static_cast<unsigned long long>(r.seed));
  return buf;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string transform_name(PhaseVariant v) {
  switch (v) {
    case PhaseVariant::Nufft1d: return "nufft1d";
    case PhaseVariant::Fio1d: return "fio1d";
    case PhaseVariant::Fio2d: return "fio2d";
    case PhaseVariant::Custom: return "custom";
  }
  return "unknown";
}

std::string stage_name(Stage s) {
  switch (s) {
    case Stage::Preliminary: return "prelim";
    case Stage::SweptOut: return "sweepout";
    case Stage::Optimal: return "optimal";
  }
  return "unknown";
}

bool is_pow2(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

Eigen::VectorXcd random_input(std::mt19937_64& rng, std::int64_t n) {
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(2.0));
  Eigen::VectorXcd g(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    g[i] = Complex(re, im);
  }
  return g;
}

struct Problem {
  PhaseSpec spec;
  std::vector<Point> x;
  std::vector<Point> omega;
  Box x_domain;
  Box omega_domain;  // 1D only
  int grid_side{0};  // 2D only
};

Problem make_problem(PhaseVariant transform, std::int64_t n, std::mt19937_64& rng) {
  Problem p;
  switch (transform) {
    case PhaseVariant::Nufft1d:
    case PhaseVariant::Fio1d: {
      if (!is_pow2(n) || n < 4) {
        throw std::invalid_argument("1D transforms need N a power of 2, N >= 4");
      }
      p.spec = transform == PhaseVariant::Nufft1d ? PhaseSpec::nufft1d() : PhaseSpec::fio1d();
      p.x.reserve(static_cast<std::size_t>(n));
      if (transform == PhaseVariant::Nufft1d) {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (std::int64_t i = 0; i < n; ++i) p.x.emplace_back(unit(rng));
      } else {
        for (std::int64_t i = 0; i < n; ++i) {
          p.x.emplace_back(static_cast<double>(i) / static_cast<double>(n));
        }
      }
      p.omega.reserve(static_cast<std::size_t>(n));
      for (std::int64_t j = -n / 2; j < n / 2; ++j) p.omega.emplace_back(static_cast<double>(j));
      p.x_domain.dim = 1;
      p.x_domain.center = Point(0.5);
      p.x_domain.width = Point(1.0);
      p.omega_domain.dim = 1;
      p.omega_domain.center = Point(0.0);
      p.omega_domain.width = Point(static_cast<double>(n));
      break;
    }
    case PhaseVariant::Fio2d: {
      const auto side = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(n))));
      if (side * side != n || !is_pow2(side) || side < 4) {
        throw std::invalid_argument("fio2d needs N = n^2 with n a power of 2, n >= 4");
      }
      p.spec = PhaseSpec::fio2d();
      p.grid_side = static_cast<int>(side);
      p.x.reserve(static_cast<std::size_t>(n));
      for (std::int64_t i = 0; i < side; ++i) {
        for (std::int64_t j = 0; j < side; ++j) {
          p.x.emplace_back(static_cast<double>(i) / static_cast<double>(side),
                           static_cast<double>(j) / static_cast<double>(side));
        }
      }
      p.omega.reserve(static_cast<std::size_t>(n));
      for (std::int64_t i = -side / 2; i < side / 2; ++i) {
        for (std::int64_t j = -side / 2; j < side / 2; ++j) {
          p.omega.emplace_back(static_cast<double>(i), static_cast<double>(j));
        }
      }
      p.x_domain.dim = 2;
      p.x_domain.center = Point(0.5, 0.5);
      p.x_domain.width = Point(1.0, 1.0);
      break;
    }
    case PhaseVariant::Custom:
      throw std::invalid_argument("the benchmark runner drives the named transforms only");
  }
  return p;
}

BenchRecord run_one_1d(const BenchConfig& config, std::int64_t n, double tol) {
  std::mt19937_64 rng(config.seed);
  Problem p = make_problem(config.transform, n, rng);
  const Eigen::VectorXcd g = random_input(rng, n);

  BenchRecord rec;
  rec.transform = transform_name(config.transform);
  rec.n = n;
  rec.d = 1;
  rec.q = config.q;
  rec.tol = tol;
  rec.seed = config.seed;

  Factorization f;
  std::vector<std::uint32_t> xorder, worder;
  if (!config.load_path.empty()) {
    const auto start = Clock::now();
    f = load_factorization(config.load_path);
    rec.t_factor_s = seconds_since(start);
    if (f.meta.n != n || f.meta.q != config.q || f.meta.d != 1 ||
        f.meta.phase_id != static_cast<std::uint16_t>(config.transform)) {
      throw std::invalid_argument("loaded factorization does not match the configuration");
    }
    const DyadicTree tx(p.x, p.x_domain, f.meta.l);
    const DyadicTree tw(p.omega, p.omega_domain, f.meta.l);
    xorder = tx.leaf_order();
    worder = tw.leaf_order();
    rec.nnz_pre = rec.nnz_opt = nnz(f);
    rec.r_comp = 1.0;
    rec.stage = stage_name(f.stage);
  } else {
    const auto start = Clock::now();
    auto plan = make_plan(p.spec, p.x, p.x_domain, p.omega, p.omega_domain, config.q,
                          config.depth);
    f = build_preliminary(plan, tol);
    rec.nnz_pre = nnz(f);
    if (config.stage != Stage::Preliminary) {
      f = sweep_out(std::move(f), tol);
      if (config.stage == Stage::Optimal) f = sweep_in(std::move(f), tol);
    }
    rec.t_factor_s = seconds_since(start);
    rec.nnz_opt = nnz(f);
    rec.r_comp = compression_ratio(rec.nnz_pre, rec.nnz_opt);
    rec.stage = stage_name(config.stage);
    xorder = plan.tx().leaf_order();
    worder = plan.tomega().leaf_order();
  }

  Eigen::VectorXcd g_leaf(n);
  for (std::int64_t k = 0; k < n; ++k) g_leaf[k] = g[worder[static_cast<std::size_t>(k)]];
  const auto apply_start = Clock::now();
  const Eigen::VectorXcd u_leaf = apply_factorization(f, g_leaf);
  rec.t_apply_s = seconds_since(apply_start);
  Eigen::VectorXcd u(n);
  for (std::int64_t k = 0; k < n; ++k) u[xorder[static_cast<std::size_t>(k)]] = u_leaf[k];

  rec.eps = relative_error(
      u,
      [&](std::int64_t i) {
        Complex acc = 0.0;
        for (std::int64_t j = 0; j < n; ++j) {
          acc += kernel(p.spec, p.x[static_cast<std::size_t>(i)],
                        p.omega[static_cast<std::size_t>(j)]) * g[j];
        }
        return acc;
      },
      config.sample, config.seed);

  if (!config.save_path.empty()) save_factorization(f, config.save_path);
  return rec;
}

BenchRecord run_one_2d(const BenchConfig& config, std::int64_t n, double tol) {
  if (!config.save_path.empty() || !config.load_path.empty()) {
    throw std::invalid_argument("save/load supports the 1D transforms only");
  }
  std::mt19937_64 rng(config.seed);
  Problem p = make_problem(config.transform, n, rng);
  const Eigen::VectorXcd g = random_input(rng, n);

  BenchRecord rec;
  rec.transform = transform_name(config.transform);
  rec.n = n;
  rec.d = 2;
  rec.q = config.q;
  rec.tol = tol;
  rec.seed = config.seed;
  rec.stage = stage_name(config.stage);

  const auto start = Clock::now();
  const MibfBuild build = build_mibf(p.spec, p.x, p.x_domain, p.omega, p.grid_side, config.q,
                                     tol, config.stage, config.depth);
  rec.t_factor_s = seconds_since(start);
  rec.nnz_pre = build.nnz_preliminary;
  rec.nnz_opt = build.nnz_final;
  rec.r_comp = compression_ratio(rec.nnz_pre, rec.nnz_opt);

  const auto apply_start = Clock::now();
  const Eigen::VectorXcd u = apply_mibf(build, g);
  rec.t_apply_s = seconds_since(apply_start);

  rec.eps = relative_error(
      u,
      [&](std::int64_t i) {
        Complex acc = 0.0;
        for (std::int64_t j = 0; j < n; ++j) {
          acc += kernel(p.spec, p.x[static_cast<std::size_t>(i)],
                        p.omega[static_cast<std::size_t>(j)]) * g[j];
        }
        return acc;
      },
      config.sample, config.seed);
  return rec;
}

}  // namespace

std::vector<BenchRecord> run_benchmark(const BenchConfig& config) {
  if (config.sizes.empty()) throw std::invalid_argument("no problem sizes configured");
  if (config.q < 2) throw std::invalid_argument("Chebyshev order must be at least 2");
  if (config.sample < 1) throw std::invalid_argument("sample size must be positive");
  const double tol = config.tol > 0.0 ? config.tol : default_tol_for_order(config.q);
  if (!(tol > 0.0) || !(tol < 1.0)) throw std::invalid_argument("tolerance must be in (0,1)");

  std::vector<BenchRecord> records;
  records.reserve(config.sizes.size());
  for (auto n : config.sizes) {
    records.push_back(config.transform == PhaseVariant::Fio2d ? run_one_2d(config, n, tol)
                                                              : run_one_1d(config, n, tol));
  }

  if (!config.out_csv.empty()) {
    const bool fresh = !std::filesystem::exists(config.out_csv) ||
                       std::filesystem::file_size(config.out_csv) == 0;
    std::ofstream os(config.out_csv, std::ios::app);
    if (!os) throw std::invalid_argument("cannot open CSV output: " + config.out_csv);
    if (fresh) os << csv_header() << '\n';
    for (const auto& r : records) os << to_csv_row(r) << '\n';
  }
  return records;
}

}  // namespace ibf
