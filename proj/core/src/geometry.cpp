#include "ibf/geometry.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ibf {

std::array<std::uint32_t, 2> box_position(std::uint64_t index, int level, int dim) {
  std::array<std::uint32_t, 2> pos{0, 0};
  if (dim == 1) {
    pos[0] = static_cast<std::uint32_t>(index);
    return pos;
  }
  // De-interleave: bit t of pos[k] sits at bit (dim*t + k) of the index.
  for (int t = 0; t < level; ++t) {
    for (int k = 0; k < dim; ++k) {
      pos[static_cast<std::size_t>(k)] |=
          static_cast<std::uint32_t>((index >> (dim * t + k)) & 1u) << t;
    }
  }
  return pos;
}

namespace {

std::uint64_t interleave(const std::array<std::uint32_t, 2>& pos, int level, int dim) {
  if (dim == 1) return pos[0];
  std::uint64_t index = 0;
  for (int t = 0; t < level; ++t) {
    for (int k = 0; k < dim; ++k) {
      index |= static_cast<std::uint64_t>((pos[static_cast<std::size_t>(k)] >> t) & 1u)
               << (dim * t + k);
    }
  }
  return index;
}

}  // namespace

DyadicTree::DyadicTree(std::vector<Point> points, const Box& domain, int depth)
    : domain_(domain), depth_(depth), dim_(domain.dim), points_(std::move(points)) {
  if (depth_ < 2) throw std::invalid_argument("tree depth must be at least 2");
  if (dim_ != 1 && dim_ != 2) throw std::invalid_argument("tree dimension must be 1 or 2");
  for (int k = 0; k < dim_; ++k) {
    if (!(domain_.width[k] > 0.0)) throw std::invalid_argument("domain width must be positive");
  }

  const std::uint64_t leaves_per_dim = std::uint64_t{1} << depth_;
  const std::uint64_t num_leaves = num_boxes(depth_);

  point_leaf_.resize(points_.size());
  std::vector<std::int64_t> leaf_count(num_leaves, 0);
  for (std::size_t p = 0; p < points_.size(); ++p) {
    if (points_[p].dim != dim_) throw std::invalid_argument("point dimension mismatch");
    std::array<std::uint32_t, 2> pos{0, 0};
    for (int k = 0; k < dim_; ++k) {
      const double x = points_[p][k];
      if (x < domain_.lo(k) || x > domain_.hi(k)) {
        throw std::domain_error("point outside tree domain");
      }
      double rel = (x - domain_.lo(k)) / domain_.width[k] * static_cast<double>(leaves_per_dim);
      auto cell = static_cast<std::int64_t>(rel);
      // Topmost box closes its upper edge.
      if (cell >= static_cast<std::int64_t>(leaves_per_dim)) {
        cell = static_cast<std::int64_t>(leaves_per_dim) - 1;
      }
      pos[static_cast<std::size_t>(k)] = static_cast<std::uint32_t>(cell);
    }
    const std::uint64_t leaf = interleave(pos, depth_, dim_);
    point_leaf_[p] = leaf;
    ++leaf_count[leaf];
  }

  // Counting sort of point ids by leaf.
  leaf_ptr_.assign(num_leaves + 1, 0);
  for (std::uint64_t b = 0; b < num_leaves; ++b) {
    leaf_ptr_[b + 1] = leaf_ptr_[b] + static_cast<std::uint64_t>(leaf_count[b]);
  }
  leaf_order_.resize(points_.size());
  std::vector<std::uint64_t> cursor(leaf_ptr_.begin(), leaf_ptr_.end() - 1);
  for (std::size_t p = 0; p < points_.size(); ++p) {
    leaf_order_[cursor[point_leaf_[p]]++] = static_cast<std::uint32_t>(p);
  }

  // Aggregate counts upward, one vector per level.
  counts_.resize(static_cast<std::size_t>(depth_) + 1);
  counts_[static_cast<std::size_t>(depth_)] = std::move(leaf_count);
  for (int level = depth_ - 1; level >= 0; --level) {
    auto& up = counts_[static_cast<std::size_t>(level)];
    const auto& below = counts_[static_cast<std::size_t>(level) + 1];
    up.assign(num_boxes(level), 0);
    const int children = 1 << dim_;
    for (std::uint64_t b = 0; b < up.size(); ++b) {
      std::int64_t s = 0;
      for (int c = 0; c < children; ++c) s += below[(b << dim_) + static_cast<std::uint64_t>(c)];
      up[b] = s;
    }
  }
}

Box DyadicTree::box(int level, std::uint64_t index) const {
  if (level < 0 || level > depth_) throw std::invalid_argument("tree level out of range");
  if (index >= num_boxes(level)) throw std::invalid_argument("box index out of range");
  const auto pos = box_position(index, level, dim_);
  Box b;
  b.dim = dim_;
  b.level = level;
  b.index = index;
  b.center.dim = dim_;
  b.width.dim = dim_;
  const double scale = 1.0 / static_cast<double>(std::uint64_t{1} << level);
  for (int k = 0; k < dim_; ++k) {
    const double w = domain_.width[k] * scale;
    b.width.v[static_cast<std::size_t>(k)] = w;
    b.center.v[static_cast<std::size_t>(k)] =
        domain_.lo(k) + (static_cast<double>(pos[static_cast<std::size_t>(k)]) + 0.5) * w;
  }
  return b;
}

std::int64_t DyadicTree::count(int level, std::uint64_t index) const {
  if (level < 0 || level > depth_) throw std::invalid_argument("tree level out of range");
  const auto& c = counts_[static_cast<std::size_t>(level)];
  if (index >= c.size()) throw std::invalid_argument("box index out of range");
  return c[index];
}

std::span<const std::uint32_t> DyadicTree::leaf_points(std::uint64_t leaf_index) const {
  if (leaf_index >= num_boxes(depth_)) throw std::invalid_argument("box index out of range");
  const auto b = leaf_ptr_[leaf_index];
  const auto e = leaf_ptr_[leaf_index + 1];
  return {leaf_order_.data() + b, leaf_order_.data() + e};
}

DyadicTree build_tree(std::vector<Point> points, const Box& domain, int depth) {
  return DyadicTree(std::move(points), domain, depth);
}

int default_depth(const Box& x_domain, const Box& omega_domain) {
  if (x_domain.dim != omega_domain.dim) throw std::invalid_argument("domain dimension mismatch");
  double product = 0.0;
  for (int k = 0; k < x_domain.dim; ++k) {
    product = std::max(product, x_domain.width[k] * omega_domain.width[k]);
  }
  if (!(product > 0.0)) throw std::invalid_argument("domain width must be positive");
  const int depth = static_cast<int>(std::ceil(std::log2(product) - 1e-12));
  return std::max(2, depth);
}

std::vector<double> cheb_nodes_1d(int order, double center, double width) {
  if (order < 2) throw std::invalid_argument("Chebyshev order must be at least 2");
  std::vector<double> nodes(static_cast<std::size_t>(order));
  for (int t = 0; t < order; ++t) {
    nodes[static_cast<std::size_t>(t)] =
        center + width * 0.5 * std::cos(static_cast<double>(t) * M_PI / (order - 1));
  }
  return nodes;
}

ChebGrid cheb_grid(int order, const Box& box) {
  ChebGrid g;
  g.order = order;
  g.box = box;
  if (box.dim == 1) {
    const auto n0 = cheb_nodes_1d(order, box.center[0], box.width[0]);
    g.nodes.reserve(n0.size());
    for (double x : n0) g.nodes.emplace_back(x);
  } else {
    const auto n0 = cheb_nodes_1d(order, box.center[0], box.width[0]);
    const auto n1 = cheb_nodes_1d(order, box.center[1], box.width[1]);
    g.nodes.reserve(n0.size() * n1.size());
    for (double x : n0) {
      for (double y : n1) g.nodes.emplace_back(x, y);
    }
  }
  return g;
}

Eigen::VectorXd lagrange_eval_1d(const std::vector<double>& nodes, double x) {
  const auto q = static_cast<Eigen::Index>(nodes.size());
  Eigen::VectorXd out(q);
  for (Eigen::Index t = 0; t < q; ++t) {
    double p = 1.0;
    for (Eigen::Index j = 0; j < q; ++j) {
      if (j == t) continue;
      const double denom = nodes[static_cast<std::size_t>(t)] - nodes[static_cast<std::size_t>(j)];
      if (denom == 0.0) throw std::invalid_argument("duplicate interpolation nodes");
      p *= (x - nodes[static_cast<std::size_t>(j)]) / denom;
    }
    out[t] = p;
  }
  return out;
}

Eigen::MatrixXd lagrange_matrix(const ChebGrid& grid, std::span<const Point> targets) {
  const int q = grid.order;
  const int dim = grid.box.dim;
  Eigen::MatrixXd out(static_cast<Eigen::Index>(targets.size()), grid.size());
  if (dim == 1) {
    const auto n0 = cheb_nodes_1d(q, grid.box.center[0], grid.box.width[0]);
    for (std::size_t s = 0; s < targets.size(); ++s) {
      out.row(static_cast<Eigen::Index>(s)) = lagrange_eval_1d(n0, targets[s][0]).transpose();
    }
  } else {
    const auto n0 = cheb_nodes_1d(q, grid.box.center[0], grid.box.width[0]);
    const auto n1 = cheb_nodes_1d(q, grid.box.center[1], grid.box.width[1]);
    for (std::size_t s = 0; s < targets.size(); ++s) {
      const Eigen::VectorXd l0 = lagrange_eval_1d(n0, targets[s][0]);
      const Eigen::VectorXd l1 = lagrange_eval_1d(n1, targets[s][1]);
      for (int t0 = 0; t0 < q; ++t0) {
        for (int t1 = 0; t1 < q; ++t1) {
          out(static_cast<Eigen::Index>(s), t0 * q + t1) = l0[t0] * l1[t1];
        }
      }
    }
  }
  return out;
}

}  // namespace ibf
