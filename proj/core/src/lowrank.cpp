#include "ibf/lowrank.hpp"

#include <stdexcept>

namespace ibf {

TruncatedSvd truncated_svd(const Eigen::MatrixXcd& z, double tol, Eigen::Index max_rank) {
  if (!(tol > 0.0) || !(tol < 1.0)) throw std::invalid_argument("svd tolerance must be in (0,1)");
  if (max_rank < 1) throw std::invalid_argument("max_rank must be at least 1");
  if (z.rows() == 0 || z.cols() == 0) throw std::invalid_argument("svd input must be nonempty");

  TruncatedSvd out;
  if (z.norm() == 0.0) {
    out.u = Eigen::MatrixXcd::Zero(z.rows(), 1);
    out.sigma = Eigen::VectorXd::Zero(1);
    out.v = Eigen::MatrixXcd::Zero(z.cols(), 1);
    out.degenerate = true;
    return out;
  }

  Eigen::BDCSVD<Eigen::MatrixXcd> svd(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = tol * sv[0];
  Eigen::Index r = 0;
  while (r < sv.size() && sv[r] > cutoff) ++r;
  r = std::max<Eigen::Index>(1, std::min(r, max_rank));

  out.u = svd.matrixU().leftCols(r);
  out.sigma = sv.head(r);
  out.v = svd.matrixV().leftCols(r);
  return out;
}

LowRankFactors split(const TruncatedSvd& svd, SplitSide side, double tol_used) {
  if ((svd.sigma.array() < 0.0).any()) {
    throw std::invalid_argument("singular values must be nonnegative");
  }
  LowRankFactors out;
  out.rank = svd.rank();
  out.tol_used = tol_used;
  switch (side) {
    case SplitSide::Balanced: {
      const Eigen::VectorXd root = svd.sigma.array().sqrt();
      out.left = svd.u * root.asDiagonal();
      out.right = svd.v * root.asDiagonal();
      break;
    }
    case SplitSide::Left:
      out.left = svd.u * svd.sigma.asDiagonal();
      out.right = svd.v;
      break;
    case SplitSide::Right:
      out.left = svd.u;
      out.right = svd.v * svd.sigma.asDiagonal();
      break;
  }
  return out;
}

InterpBlock interp_factor_xi(const PhaseSpec& spec, const Box& a, const Box& b,
                             std::span<const Point> points_in_b, int q) {
  InterpBlock out;
  out.grid = cheb_grid(q, b);
  const auto r = out.grid.size();
  out.block.resize(r, static_cast<Eigen::Index>(points_in_b.size()));
  if (points_in_b.empty()) {
    out.empty = true;
    return out;
  }
  const Eigen::MatrixXd lag = lagrange_matrix(out.grid, points_in_b);  // |pts| x q^d
  Eigen::VectorXcd grid_phase(r);
  for (Eigen::Index t = 0; t < r; ++t) {
    grid_phase[t] = std::polar(1.0, -kTau * phase(spec, a.center, out.grid.nodes[static_cast<std::size_t>(t)]));
  }
  for (std::size_t s = 0; s < points_in_b.size(); ++s) {
    const Complex ps = std::polar(1.0, kTau * phase(spec, a.center, points_in_b[s]));
    for (Eigen::Index t = 0; t < r; ++t) {
      out.block(t, static_cast<Eigen::Index>(s)) =
          grid_phase[t] * lag(static_cast<Eigen::Index>(s), t) * ps;
    }
  }
  return out;
}

InterpBlock interp_factor_x(const PhaseSpec& spec, const Box& a,
                            std::span<const Point> points_in_a, const Box& b, int q) {
  InterpBlock out;
  out.grid = cheb_grid(q, a);
  const auto r = out.grid.size();
  out.block.resize(static_cast<Eigen::Index>(points_in_a.size()), r);
  if (points_in_a.empty()) {
    out.empty = true;
    return out;
  }
  const Eigen::MatrixXd lag = lagrange_matrix(out.grid, points_in_a);  // |pts| x q^d
  Eigen::VectorXcd grid_phase(r);
  for (Eigen::Index t = 0; t < r; ++t) {
    grid_phase[t] = std::polar(1.0, -kTau * phase(spec, out.grid.nodes[static_cast<std::size_t>(t)], b.center));
  }
  for (std::size_t s = 0; s < points_in_a.size(); ++s) {
    const Complex ps = std::polar(1.0, kTau * phase(spec, points_in_a[s], b.center));
    for (Eigen::Index t = 0; t < r; ++t) {
      out.block(static_cast<Eigen::Index>(s), t) =
          ps * lag(static_cast<Eigen::Index>(s), t) * grid_phase[t];
    }
  }
  return out;
}

}  // namespace ibf
