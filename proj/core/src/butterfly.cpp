#include "ibf/butterfly.hpp"

#include <cmath>
#include <stdexcept>

#include "ibf/lowrank.hpp"

namespace ibf {

namespace {

// 1D transfer from a parent grid to one child half, in normalized
// coordinates (box center 0, width 1): child nodes are z/2 -+ 1/4.
Eigen::MatrixXd child_transfer_1d(int q, int half) {
  const auto parent = cheb_nodes_1d(q, 0.0, 1.0);
  const auto child = cheb_nodes_1d(q, half ? 0.25 : -0.25, 0.5);
  Eigen::MatrixXd t(q, q);
  for (int s = 0; s < q; ++s) {
    t.col(s) = lagrange_eval_1d(parent, child[static_cast<std::size_t>(s)]);
  }
  return t;
}

std::vector<Eigen::MatrixXd> make_lag_children(int q, int dim) {
  std::vector<Eigen::MatrixXd> out;
  const Eigen::MatrixXd t0 = child_transfer_1d(q, 0);
  const Eigen::MatrixXd t1 = child_transfer_1d(q, 1);
  if (dim == 1) {
    out = {t0, t1};
    return out;
  }
  // Child bit k belongs to dimension k; grids flatten dimension 0 major.
  out.reserve(4);
  for (int c = 0; c < 4; ++c) {
    const Eigen::MatrixXd& a = (c & 1) ? t1 : t0;        // dimension 0
    const Eigen::MatrixXd& b = ((c >> 1) & 1) ? t1 : t0; // dimension 1
    Eigen::MatrixXd k(q * q, q * q);
    for (int i0 = 0; i0 < q; ++i0)
      for (int i1 = 0; i1 < q; ++i1)
        for (int j0 = 0; j0 < q; ++j0)
          for (int j1 = 0; j1 < q; ++j1) k(i0 * q + i1, j0 * q + j1) = a(i0, j0) * b(i1, j1);
    out.push_back(std::move(k));
  }
  return out;
}

}  // namespace

BuildPlan::BuildPlan(PhaseSpec phase, std::vector<Point> x_points, const Box& x_domain,
                     std::vector<Point> omega_points, const Box& omega_domain, int q, int depth)
    : phase_(std::move(phase)),
      q_(q),
      l_(depth <= 0 ? default_depth(x_domain, omega_domain) : depth),
      h_((l_ + 1) / 2),
      r_eps_(1),
      tx_(std::move(x_points), x_domain, l_),
      tomega_(std::move(omega_points), omega_domain, l_),
      lag_child_(make_lag_children(q, x_domain.dim)) {
  if (q_ < 2) throw std::invalid_argument("Chebyshev order must be at least 2");
  if (x_domain.dim != omega_domain.dim) throw std::invalid_argument("domain dimension mismatch");
  if (phase_.dim != x_domain.dim) throw std::invalid_argument("phase dimension mismatch");
  for (int k = 0; k < dim(); ++k) r_eps_ *= q_;
}

BuildPlan make_plan(PhaseSpec phase, std::vector<Point> x_points, const Box& x_domain,
                    std::vector<Point> omega_points, const Box& omega_domain, int q, int depth) {
  return BuildPlan(std::move(phase), std::move(x_points), x_domain, std::move(omega_points),
                   omega_domain, q, depth);
}

BlockSparseMatrix build_v0(const BuildPlan& plan) {
  const auto& tw = plan.tomega();
  const int l = plan.depth();
  const std::uint64_t leaves = tw.num_boxes(l);
  const Box x_root = plan.tx().box(0, 0);

  std::vector<std::int64_t> row_sizes(leaves, plan.r_eps());
  std::vector<std::int64_t> col_sizes(leaves);
  std::vector<Block> blocks;
  std::vector<Point> pts;
  for (std::uint64_t j = 0; j < leaves; ++j) {
    const auto ids = tw.leaf_points(j);
    col_sizes[j] = static_cast<std::int64_t>(ids.size());
    if (ids.empty()) continue;
    pts.clear();
    for (auto id : ids) pts.push_back(tw.points()[id]);
    auto fac = interp_factor_xi(plan.phase(), x_root, tw.box(l, j), pts, plan.q());
    blocks.push_back({static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(j),
                      std::move(fac.block)});
  }
  return BlockSparseMatrix::from_blocks(std::move(row_sizes), std::move(col_sizes),
                                        std::move(blocks), FactorLabel::V0, 0);
}

BlockSparseMatrix build_h_level(const BuildPlan& plan, int level) {
  if (level < 1 || level > plan.switch_level()) {
    throw std::invalid_argument("H level out of range");
  }
  const int d = plan.dim();
  const int l = plan.depth();
  const auto& tx = plan.tx();
  const auto& tw = plan.tomega();
  const std::int64_t r = plan.r_eps();
  const std::uint64_t nx = tx.num_boxes(level);          // X boxes at output level
  const std::uint64_t nw = tw.num_boxes(l - level);      // Omega boxes at output level
  const int children = 1 << d;

  std::vector<std::int64_t> sizes(plan.num_pairs(), r);
  std::vector<Block> blocks;

  Eigen::VectorXcd left(r), right(r);
  for (std::uint64_t b = 0; b < nw; ++b) {
    if (tw.empty_box(l - level, b)) continue;
    const ChebGrid grid_b = cheb_grid(plan.q(), tw.box(l - level, b));
    // Child grids, kept for all children with points.
    std::vector<std::pair<int, ChebGrid>> kids;
    for (int c = 0; c < children; ++c) {
      const std::uint64_t cb = (b << d) | static_cast<std::uint64_t>(c);
      if (!tw.empty_box(l - level + 1, cb)) {
        kids.emplace_back(c, cheb_grid(plan.q(), tw.box(l - level + 1, cb)));
      }
    }
    for (std::uint64_t a = 0; a < nx; ++a) {
      const Point c_a = tx.box(level, a).center;
      for (std::int64_t t = 0; t < r; ++t) {
        left[t] = std::polar(1.0, -kTau * phase(plan.phase(), c_a,
                                                grid_b.nodes[static_cast<std::size_t>(t)]));
      }
      const std::uint64_t row = plan.xi_major_pos(level, a, b);
      for (const auto& [c, grid_c] : kids) {
        const std::uint64_t col =
            plan.xi_major_pos(level - 1, a >> d, (b << d) | static_cast<std::uint64_t>(c));
        for (std::int64_t s = 0; s < r; ++s) {
          right[s] = std::polar(1.0, kTau * phase(plan.phase(), c_a,
                                                  grid_c.nodes[static_cast<std::size_t>(s)]));
        }
        const Eigen::MatrixXd& lag = plan.lag_child(c);
        Eigen::MatrixXcd m(r, r);
        for (std::int64_t s = 0; s < r; ++s) {
          for (std::int64_t t = 0; t < r; ++t) m(t, s) = left[t] * lag(t, s) * right[s];
        }
        blocks.push_back({static_cast<std::uint32_t>(row), static_cast<std::uint32_t>(col),
                          std::move(m)});
      }
    }
  }
  return BlockSparseMatrix::from_blocks(sizes, sizes, std::move(blocks), FactorLabel::H, level);
}

BlockSparseMatrix build_switch(const BuildPlan& plan) {
  const int h = plan.switch_level();
  const int l = plan.depth();
  const auto& tx = plan.tx();
  const auto& tw = plan.tomega();
  const std::int64_t r = plan.r_eps();
  const std::uint64_t nx = tx.num_boxes(h);
  const std::uint64_t nw = tw.num_boxes(l - h);

  std::vector<std::int64_t> sizes(plan.num_pairs(), r);
  std::vector<Block> blocks;
  for (std::uint64_t i = 0; i < nx; ++i) {
    const ChebGrid grid_a = cheb_grid(plan.q(), tx.box(h, i));
    for (std::uint64_t j = 0; j < nw; ++j) {
      if (tw.empty_box(l - h, j)) continue;
      const ChebGrid grid_b = cheb_grid(plan.q(), tw.box(l - h, j));
      Eigen::MatrixXcd m(r, r);
      for (std::int64_t s = 0; s < r; ++s) {
        for (std::int64_t t = 0; t < r; ++t) {
          m(t, s) = std::polar(1.0, kTau * phase(plan.phase(),
                                                 grid_a.nodes[static_cast<std::size_t>(t)],
                                                 grid_b.nodes[static_cast<std::size_t>(s)]));
        }
      }
      blocks.push_back({static_cast<std::uint32_t>(plan.x_major_pos(h, i, j)),
                        static_cast<std::uint32_t>(plan.xi_major_pos(h, i, j)), std::move(m)});
    }
  }
  return BlockSparseMatrix::from_blocks(sizes, sizes, std::move(blocks), FactorLabel::M, h);
}

BlockSparseMatrix build_g_level(const BuildPlan& plan, int level) {
  if (level < plan.switch_level() || level >= plan.depth()) {
    throw std::invalid_argument("G level out of range");
  }
  const int d = plan.dim();
  const int l = plan.depth();
  const auto& tx = plan.tx();
  const auto& tw = plan.tomega();
  const std::int64_t r = plan.r_eps();
  const std::uint64_t nx = tx.num_boxes(level + 1);      // X boxes at output level
  const std::uint64_t nw = tw.num_boxes(l - level - 1);  // Omega boxes at output level
  const int children = 1 << d;

  std::vector<std::int64_t> sizes(plan.num_pairs(), r);
  std::vector<Block> blocks;

  Eigen::VectorXcd left(r), right(r);
  for (std::uint64_t a = 0; a < nx; ++a) {
    const ChebGrid grid_a = cheb_grid(plan.q(), tx.box(level + 1, a));
    const ChebGrid grid_p = cheb_grid(plan.q(), tx.box(level, a >> d));
    // Parent basis at the child's nodes, transposed to (t, s) layout.
    const Eigen::MatrixXd lag =
        plan.lag_child(static_cast<int>(a & static_cast<std::uint64_t>(children - 1))).transpose();
    for (std::uint64_t b = 0; b < nw; ++b) {
      if (tw.empty_box(l - level - 1, b)) continue;
      const std::uint64_t row = plan.x_major_pos(level + 1, a, b);
      for (int c = 0; c < children; ++c) {
        const std::uint64_t cb = (b << d) | static_cast<std::uint64_t>(c);
        if (tw.empty_box(l - level, cb)) continue;
        const Point c_c = tw.box(l - level, cb).center;
        for (std::int64_t t = 0; t < r; ++t) {
          left[t] = std::polar(1.0, kTau * phase(plan.phase(),
                                                 grid_a.nodes[static_cast<std::size_t>(t)], c_c));
        }
        for (std::int64_t s = 0; s < r; ++s) {
          right[s] = std::polar(1.0, -kTau * phase(plan.phase(),
                                                   grid_p.nodes[static_cast<std::size_t>(s)], c_c));
        }
        const std::uint64_t col = plan.x_major_pos(level, a >> d, cb);
        Eigen::MatrixXcd m(r, r);
        for (std::int64_t s = 0; s < r; ++s) {
          for (std::int64_t t = 0; t < r; ++t) m(t, s) = left[t] * lag(t, s) * right[s];
        }
        blocks.push_back({static_cast<std::uint32_t>(row), static_cast<std::uint32_t>(col),
                          std::move(m)});
      }
    }
  }
  return BlockSparseMatrix::from_blocks(sizes, sizes, std::move(blocks), FactorLabel::G, level);
}

BlockSparseMatrix build_uL(const BuildPlan& plan) {
  const auto& tx = plan.tx();
  const int l = plan.depth();
  const std::uint64_t leaves = tx.num_boxes(l);
  const Box omega_root = plan.tomega().box(0, 0);

  std::vector<std::int64_t> row_sizes(leaves);
  std::vector<std::int64_t> col_sizes(leaves, plan.r_eps());
  std::vector<Block> blocks;
  std::vector<Point> pts;
  for (std::uint64_t i = 0; i < leaves; ++i) {
    const auto ids = tx.leaf_points(i);
    row_sizes[i] = static_cast<std::int64_t>(ids.size());
    if (ids.empty()) continue;
    pts.clear();
    for (auto id : ids) pts.push_back(tx.points()[id]);
    auto fac = interp_factor_x(plan.phase(), tx.box(l, i), pts, omega_root, plan.q());
    blocks.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i),
                      std::move(fac.block)});
  }
  return BlockSparseMatrix::from_blocks(std::move(row_sizes), std::move(col_sizes),
                                        std::move(blocks), FactorLabel::UL, l);
}

Factorization build_preliminary(const BuildPlan& plan, double tol) {
  Factorization f;
  f.stage = Stage::Preliminary;
  f.meta.n = plan.tx().num_points();
  f.meta.d = plan.dim();
  f.meta.l = plan.depth();
  f.meta.q = plan.q();
  f.meta.tol = tol;
  f.meta.phase_id = static_cast<std::uint16_t>(plan.phase().variant);
  f.meta.x_fingerprint = fingerprint_points(plan.tx().points());
  f.meta.omega_fingerprint = fingerprint_points(plan.tomega().points());

  f.factors.reserve(static_cast<std::size_t>(plan.depth()) + 3);
  f.factors.push_back(build_uL(plan));
  for (int level = plan.depth() - 1; level >= plan.switch_level(); --level) {
    f.factors.push_back(build_g_level(plan, level));
  }
  f.factors.push_back(build_switch(plan));
  for (int level = plan.switch_level(); level >= 1; --level) {
    f.factors.push_back(build_h_level(plan, level));
  }
  f.factors.push_back(build_v0(plan));
  return f;
}

}  // namespace ibf
