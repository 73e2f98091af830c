#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ibf/geometry.hpp"

using namespace ibf;

namespace {

Box unit_box_1d(double center, double width) {
  Box b;
  b.dim = 1;
  b.center = Point(center);
  b.width = Point(width);
  return b;
}

Box box_2d(double cx, double cy, double wx, double wy) {
  Box b;
  b.dim = 2;
  b.center = Point(cx, cy);
  b.width = Point(wx, wy);
  return b;
}

// Evaluate a polynomial with the given coefficients (lowest degree first).
double poly_eval(const std::vector<double>& coeff, double x) {
  double acc = 0.0;
  for (auto it = coeff.rbegin(); it != coeff.rend(); ++it) acc = acc * x + *it;
  return acc;
}

}  // namespace

TEST_CASE("chebyshev nodes match the closed form") {
  // q = 3 on [-1/2, 1/2]: cos(0), cos(pi/2), cos(pi) scaled by w/2 = 1/2.
  const auto n3 = cheb_nodes_1d(3, 0.0, 1.0);
  REQUIRE(n3.size() == 3);
  CHECK(n3[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(n3[1] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(n3[2] == doctest::Approx(-0.5).epsilon(1e-15));

  // q = 2 gives the two endpoints.
  const auto n2 = cheb_nodes_1d(2, 1.5, 3.0);
  CHECK(n2[0] == doctest::Approx(3.0));
  CHECK(n2[1] == doctest::Approx(0.0));

  // Nodes stay inside the box and decrease monotonically.
  const auto n9 = cheb_nodes_1d(9, 0.25, 0.5);
  for (std::size_t t = 0; t < n9.size(); ++t) {
    CHECK(n9[t] <= 0.5 + 1e-15);
    CHECK(n9[t] >= 0.0 - 1e-15);
    if (t > 0) CHECK(n9[t] < n9[t - 1]);
  }

  CHECK_THROWS_AS(cheb_nodes_1d(1, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("lagrange weights reproduce polynomials below the node count") {
  const int q = 7;
  const auto nodes = cheb_nodes_1d(q, 0.3, 0.8);
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> in_box(0.3 - 0.4, 0.3 + 0.4);
  std::uniform_real_distribution<double> coeff_dist(-1.0, 1.0);

  std::vector<double> coeff(q);  // degree q-1
  for (auto& c : coeff) c = coeff_dist(rng);

  for (int trial = 0; trial < 20; ++trial) {
    const double x = in_box(rng);
    const Eigen::VectorXd w = lagrange_eval_1d(nodes, x);
    double interp = 0.0;
    for (int t = 0; t < q; ++t) interp += w[t] * poly_eval(coeff, nodes[static_cast<std::size_t>(t)]);
    CHECK(interp == doctest::Approx(poly_eval(coeff, x)).epsilon(1e-12));
  }
}

TEST_CASE("lagrange weights are a partition of unity and exact at the nodes") {
  const auto nodes = cheb_nodes_1d(6, -2.0, 4.0);
  const Eigen::VectorXd w = lagrange_eval_1d(nodes, -1.234);
  CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-13));

  for (std::size_t s = 0; s < nodes.size(); ++s) {
    const Eigen::VectorXd at_node = lagrange_eval_1d(nodes, nodes[s]);
    for (std::size_t t = 0; t < nodes.size(); ++t) {
      CHECK(at_node[static_cast<Eigen::Index>(t)] == doctest::Approx(t == s ? 1.0 : 0.0).epsilon(1e-12));
    }
  }

  CHECK_THROWS_AS(lagrange_eval_1d({0.0, 0.0, 1.0}, 0.5), std::invalid_argument);
}

TEST_CASE("2d chebyshev grids enumerate dimension zero as the major index") {
  const Box b = box_2d(0.0, 10.0, 2.0, 4.0);
  const int q = 4;
  const ChebGrid grid = cheb_grid(q, b);
  REQUIRE(grid.size() == q * q);
  const auto n0 = cheb_nodes_1d(q, 0.0, 2.0);
  const auto n1 = cheb_nodes_1d(q, 10.0, 4.0);
  for (int t0 = 0; t0 < q; ++t0) {
    for (int t1 = 0; t1 < q; ++t1) {
      const Point& p = grid.nodes[static_cast<std::size_t>(t0 * q + t1)];
      CHECK(p[0] == doctest::Approx(n0[static_cast<std::size_t>(t0)]));
      CHECK(p[1] == doctest::Approx(n1[static_cast<std::size_t>(t1)]));
    }
  }
}

TEST_CASE("2d lagrange matrix factors into per-dimension weights") {
  const Box b = box_2d(0.5, 0.5, 1.0, 1.0);
  const int q = 3;
  const ChebGrid grid = cheb_grid(q, b);
  const std::vector<Point> targets = {Point(0.1, 0.9), Point(0.77, 0.31)};
  const Eigen::MatrixXd m = lagrange_matrix(grid, targets);
  REQUIRE(m.rows() == 2);
  REQUIRE(m.cols() == q * q);

  const auto n0 = cheb_nodes_1d(q, 0.5, 1.0);
  for (int j = 0; j < 2; ++j) {
    const Eigen::VectorXd w0 = lagrange_eval_1d(n0, targets[static_cast<std::size_t>(j)][0]);
    const Eigen::VectorXd w1 = lagrange_eval_1d(n0, targets[static_cast<std::size_t>(j)][1]);
    for (int t0 = 0; t0 < q; ++t0) {
      for (int t1 = 0; t1 < q; ++t1) {
        CHECK(m(j, t0 * q + t1) == doctest::Approx(w0[t0] * w1[t1]).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("box_position de-interleaves z-order indices") {
  // 1D: the position along dimension zero is the index itself.
  for (std::uint64_t idx = 0; idx < 8; ++idx) {
    const auto pos = box_position(idx, 3, 1);
    CHECK(pos[0] == idx);
  }

  // 2D: recompute by extracting bit t of pos[k] from index bit 2t + k.
  for (std::uint64_t idx = 0; idx < 64; ++idx) {
    const auto pos = box_position(idx, 3, 2);
    std::array<std::uint32_t, 2> want{0, 0};
    for (int t = 0; t < 3; ++t) {
      for (int k = 0; k < 2; ++k) {
        want[static_cast<std::size_t>(k)] |=
            static_cast<std::uint32_t>((idx >> (2 * t + k)) & 1u) << t;
      }
    }
    CHECK(pos[0] == want[0]);
    CHECK(pos[1] == want[1]);
  }
}

TEST_CASE("dyadic tree assigns points to the brute-force leaf") {
  const Box domain = unit_box_1d(0.5, 1.0);
  const int depth = 4;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> pts;
  for (int i = 0; i < 200; ++i) pts.emplace_back(unit(rng));
  pts.emplace_back(0.0);  // lower edge
  pts.emplace_back(1.0);  // upper edge closes into the last leaf

  const DyadicTree tree(pts, domain, depth);
  REQUIRE(tree.num_points() == 202);

  const double leaf_w = 1.0 / 16.0;
  for (std::uint32_t id = 0; id < 202; ++id) {
    const double x = pts[id][0];
    auto want = static_cast<std::uint64_t>(std::floor(x / leaf_w));
    want = std::min<std::uint64_t>(want, 15);
    CHECK(tree.leaf_of_point(id) == want);
  }
}

TEST_CASE("dyadic tree counts aggregate upward and leaves partition the points") {
  const Box domain = box_2d(0.0, 0.0, 32.0, 32.0);
  const int depth = 3;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(-16.0, 16.0);
  std::vector<Point> pts;
  for (int i = 0; i < 333; ++i) pts.emplace_back(coord(rng), coord(rng));
  const DyadicTree tree(pts, domain, depth);

  for (int level = 0; level < depth; ++level) {
    for (std::uint64_t i = 0; i < tree.num_boxes(level); ++i) {
      std::int64_t child_sum = 0;
      for (std::uint64_t c = 0; c < 4; ++c) child_sum += tree.count(level + 1, 4 * i + c);
      CHECK(tree.count(level, i) == child_sum);
    }
  }
  CHECK(tree.count(0, 0) == 333);

  // leaf_order is a permutation consistent with leaf_points spans.
  std::vector<bool> seen(333, false);
  std::size_t total = 0;
  for (std::uint64_t leaf = 0; leaf < tree.num_boxes(depth); ++leaf) {
    for (auto id : tree.leaf_points(leaf)) {
      CHECK(!seen[id]);
      seen[id] = true;
      CHECK(tree.leaf_of_point(id) == leaf);
      ++total;
    }
  }
  CHECK(total == 333);
  CHECK(tree.leaf_order().size() == 333);
}

TEST_CASE("dyadic tree box geometry halves per level") {
  const Box domain = unit_box_1d(0.0, 64.0);
  const DyadicTree tree({Point(0.0)}, domain, 3);
  const Box b = tree.box(2, 3);  // fourth box of 4 at level 2, width 16
  CHECK(b.width[0] == doctest::Approx(16.0));
  CHECK(b.lo(0) == doctest::Approx(16.0));
  CHECK(b.hi(0) == doctest::Approx(32.0));
  CHECK(b.level == 2);
  CHECK(b.index == 3);
}

TEST_CASE("dyadic tree rejects bad input") {
  const Box domain = unit_box_1d(0.5, 1.0);
  CHECK_THROWS_AS(DyadicTree({Point(0.25)}, domain, 1), std::invalid_argument);
  CHECK_THROWS_AS(DyadicTree({Point(1.5)}, domain, 2), std::domain_error);
  CHECK_THROWS_AS(DyadicTree({Point(-0.01)}, domain, 2), std::domain_error);
  Box degenerate = domain;
  degenerate.width = Point(0.0);
  CHECK_THROWS_AS(DyadicTree({Point(0.25)}, degenerate, 2), std::invalid_argument);
  CHECK_THROWS_AS(DyadicTree({Point(0.25, 0.5)}, domain, 2), std::invalid_argument);
}

TEST_CASE("default depth covers the joint width product") {
  // Width products 256, 1024, 4096 need 8, 10, 12 halvings to reach
  // unit-product interaction boxes; small products floor out at 2.
  CHECK(default_depth(unit_box_1d(0.5, 1.0), unit_box_1d(0.0, 256.0)) == 8);
  CHECK(default_depth(unit_box_1d(0.5, 1.0), unit_box_1d(0.0, 1024.0)) == 10);
  CHECK(default_depth(unit_box_1d(0.5, 1.0), unit_box_1d(0.0, 4096.0)) == 12);
  CHECK(default_depth(box_2d(0.5, 0.5, 1.0, 1.0), box_2d(0.0, 0.0, 32.0, 32.0)) == 5);
  CHECK(default_depth(unit_box_1d(0.5, 1.0), unit_box_1d(0.0, 2.0)) == 2);
  CHECK(default_depth(unit_box_1d(0.5, 1.0), unit_box_1d(0.0, 1.0)) == 2);
}
