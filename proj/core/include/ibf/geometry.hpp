//
// geometry : dyadic box trees, Chebyshev grids and Lagrange interpolation
//

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ibf {

inline constexpr double kTau = 6.283185307179586476925287;  // 2*pi

// A point in d = 1 or 2 dimensions. Unused slots stay zero.
struct Point {
  std::array<double, 2> v{0.0, 0.0};
  std::int32_t dim{1};

  Point() = default;
  explicit Point(double x) : v{x, 0.0}, dim(1) {}
  Point(double x, double y) : v{x, y}, dim(2) {}
  double operator[](int k) const { return v[static_cast<std::size_t>(k)]; }
};

// Axis-aligned box, addressed inside a dyadic tree by (level, index).
// Child indices interleave one position bit per dimension (z-order), so
// index = parent_index * 2^d + child_bits and parent(i) = i >> d.
struct Box {
  Point center;
  Point width;
  int level{0};
  std::uint64_t index{0};
  int dim{1};

  double lo(int k) const { return center[k] - 0.5 * width[k]; }
  double hi(int k) const { return center[k] + 0.5 * width[k]; }
};

// Per-dimension box positions encoded in a z-order index.
std::array<std::uint32_t, 2> box_position(std::uint64_t index, int level, int dim);

// Dyadic tree of depth L over a fixed domain box. Boxes at every level are
// implicit (computed from the index); only leaf memberships and per-level
// point counts are stored. Boxes are half-open per dimension, except that
// the topmost box in each dimension closes its upper edge.
class DyadicTree {
 public:
  // Throws std::invalid_argument for L < 2 or nonpositive widths, and
  // std::domain_error if any point falls outside the domain.
  DyadicTree(std::vector<Point> points, const Box& domain, int depth);

  const Box& domain() const { return domain_; }
  int depth() const { return depth_; }
  int dim() const { return dim_; }
  std::int64_t num_points() const { return static_cast<std::int64_t>(points_.size()); }
  const std::vector<Point>& points() const { return points_; }

  std::uint64_t num_boxes(int level) const { return std::uint64_t{1} << (dim_ * level); }
  Box box(int level, std::uint64_t index) const;

  // Number of points inside the box (level, index).
  std::int64_t count(int level, std::uint64_t index) const;
  bool empty_box(int level, std::uint64_t index) const { return count(level, index) == 0; }

  // Indices (into the original point order) of the points in a leaf box.
  std::span<const std::uint32_t> leaf_points(std::uint64_t leaf_index) const;

  // All point indices ordered leaf-by-leaf (ascending leaf index, original
  // order within a leaf). This is the vector layout the factor chain uses.
  const std::vector<std::uint32_t>& leaf_order() const { return leaf_order_; }

  // Leaf index holding a given point id.
  std::uint64_t leaf_of_point(std::uint32_t point_id) const { return point_leaf_[point_id]; }

 private:
  Box domain_;
  int depth_;
  int dim_;
  std::vector<Point> points_;
  std::vector<std::uint64_t> point_leaf_;
  std::vector<std::uint64_t> leaf_ptr_;       // CSR offsets, one per leaf + 1
  std::vector<std::uint32_t> leaf_order_;     // point ids grouped by leaf
  std::vector<std::vector<std::int64_t>> counts_;  // [level][box]
};

DyadicTree build_tree(std::vector<Point> points, const Box& domain, int depth);

// Depth that makes the wide side's leaves (at most) unit width:
// max(2, ceil(log2(max_k wx[k]*womega[k]))).
int default_depth(const Box& x_domain, const Box& omega_domain);

// Tensor-product Chebyshev grid of order q per dimension adapted to a box.
// 1D nodes: c + w/2 * cos(t*pi/(q-1)), t = 0..q-1 (descending coordinate).
// 2D nodes are flattened with the first dimension major: t = t0*q + t1.
struct ChebGrid {
  int order{0};
  Box box;
  std::vector<Point> nodes;

  std::int64_t size() const { return static_cast<std::int64_t>(nodes.size()); }
};

ChebGrid cheb_grid(int order, const Box& box);

// 1D helpers used by the tensorized assembly in the factor builders.
std::vector<double> cheb_nodes_1d(int order, double center, double width);
// Values of all q Lagrange cardinal polynomials on `nodes` at x.
Eigen::VectorXd lagrange_eval_1d(const std::vector<double>& nodes, double x);

// Rows = targets, cols = grid.size(); entry (s,t) is the t-th cardinal
// polynomial of the grid evaluated at target s (tensor product across
// dimensions). A target equal to a grid node yields an exact basis row.
Eigen::MatrixXd lagrange_matrix(const ChebGrid& grid, std::span<const Point> targets);

}  // namespace ibf
