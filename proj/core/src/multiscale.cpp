#include "ibf/multiscale.hpp"

#include <cmath>
#include <stdexcept>

namespace ibf {

CoronaDecomposition corona_decompose(std::span<const Point> omega, int n) {
  if (n < 2 || (n & (n - 1)) != 0) throw std::invalid_argument("grid side must be a power of 2");
  CoronaDecomposition out;
  out.n = n;
  // Peel while the remaining center is at least 16 wide: n/2^{t+1} >= 16.
  int t_max = -1;
  while (n / (1 << (t_max + 2)) >= 16) ++t_max;
  out.t_max = t_max;
  out.corona_points.resize(static_cast<std::size_t>(t_max + 1));
  for (std::uint32_t id = 0; id < omega.size(); ++id) {
    const auto& p = omega[id];
    if (p.dim != 2) throw std::invalid_argument("corona decomposition is two-dimensional");
    const double m = std::max(std::abs(p[0]), std::abs(p[1]));
    bool placed = false;
    for (int t = 0; t <= t_max; ++t) {
      const double outer = static_cast<double>(n) / (1 << (t + 1));
      const double inner = static_cast<double>(n) / (1 << (t + 2));
      if (m > inner && m <= outer) {
        out.corona_points[static_cast<std::size_t>(t)].push_back(id);
        placed = true;
        break;
      }
    }
    if (!placed) out.center_points.push_back(id);
  }
  return out;
}

MibfBuild build_mibf(const PhaseSpec& spec, std::vector<Point> x_points, const Box& x_domain,
                     std::vector<Point> omega_points, int n, int q, double tol, Stage target,
                     int depth_override) {
  if (spec.dim != 2) throw std::invalid_argument("multiscale build is two-dimensional");
  MibfBuild out;
  out.stage = target;
  out.num_x = static_cast<std::int64_t>(x_points.size());
  out.decomp = corona_decompose(omega_points, n);

  const auto& dec = out.decomp;
  for (int t = 0; t <= dec.t_max; ++t) {
    const auto& ids = dec.corona_points[static_cast<std::size_t>(t)];
    std::vector<Point> sub;
    sub.reserve(ids.size());
    for (auto id : ids) sub.push_back(omega_points[id]);

    // Bounding box [-W/2, W/2)^2 with W = n / 2^t: unit-width leaves at
    // depth ceil(log2 W).
    const double w = static_cast<double>(n) / (1 << t);
    Box obox;
    obox.dim = 2;
    obox.center = Point(0.0, 0.0);
    obox.width = Point(w, w);
    const int depth =
        depth_override > 0 ? depth_override : std::max(2, static_cast<int>(std::ceil(std::log2(w))));

    auto plan = make_plan(spec, x_points, x_domain, std::move(sub), obox, q, depth);
    auto f = build_preliminary(plan, tol);
    out.nnz_preliminary += nnz(f);
    if (target != Stage::Preliminary) {
      f = sweep_out(std::move(f), tol);
      if (target == Stage::Optimal) f = sweep_in(std::move(f), tol);
    }
    out.nnz_final += nnz(f);

    // Leaf orders translate between the chain's vector layout and the
    // original point ids.
    std::vector<std::uint32_t> omega_order(ids.size());
    const auto& worder = plan.tomega().leaf_order();
    for (std::size_t k = 0; k < worder.size(); ++k) omega_order[k] = ids[worder[k]];
    out.corona_omega_order.push_back(std::move(omega_order));
    out.corona_x_order.push_back(plan.tx().leaf_order());
    out.coronas.push_back(std::move(f));
  }

  // Dense center block in original orders.
  out.center_ids = dec.center_points;
  out.k_center.resize(static_cast<Eigen::Index>(x_points.size()),
                      static_cast<Eigen::Index>(dec.center_points.size()));
  for (Eigen::Index j = 0; j < out.k_center.cols(); ++j) {
    const auto& xi = omega_points[dec.center_points[static_cast<std::size_t>(j)]];
    for (Eigen::Index i = 0; i < out.k_center.rows(); ++i) {
      out.k_center(i, j) = kernel(spec, x_points[static_cast<std::size_t>(i)], xi);
    }
  }
  return out;
}

Eigen::VectorXcd apply_mibf(const MibfBuild& build, const Eigen::VectorXcd& g) {
  const auto nx = build.num_x;
  if (g.size() != build.k_center.cols() + [&] {
        std::int64_t s = 0;
        for (const auto& o : build.corona_omega_order) s += static_cast<std::int64_t>(o.size());
        return s;
      }()) {
    throw std::invalid_argument("input length does not match the decomposition");
  }
  Eigen::VectorXcd u = Eigen::VectorXcd::Zero(nx);
  for (std::size_t t = 0; t < build.coronas.size(); ++t) {
    const auto& order = build.corona_omega_order[t];
    Eigen::VectorXcd gt(static_cast<Eigen::Index>(order.size()));
    for (std::size_t k = 0; k < order.size(); ++k) {
      gt[static_cast<Eigen::Index>(k)] = g[order[k]];
    }
    const Eigen::VectorXcd ut = apply_factorization(build.coronas[t], gt);
    const auto& xorder = build.corona_x_order[t];
    for (std::size_t k = 0; k < xorder.size(); ++k) {
      u[xorder[k]] += ut[static_cast<Eigen::Index>(k)];
    }
  }
  if (build.k_center.cols() > 0) {
    Eigen::VectorXcd gc(static_cast<Eigen::Index>(build.center_ids.size()));
    for (std::size_t k = 0; k < build.center_ids.size(); ++k) {
      gc[static_cast<Eigen::Index>(k)] = g[build.center_ids[k]];
    }
    u.noalias() += build.k_center * gc;
  }
  return u;
}

}  // namespace ibf
