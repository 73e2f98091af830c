//
// lowrank : truncated SVD, balanced low-rank splits, interpolative factors
//

#pragma once

#include <span>

#include <Eigen/Dense>

#include "ibf/geometry.hpp"
#include "ibf/kernels.hpp"

namespace ibf {

// U has orthonormal columns, sigma is nonincreasing, approx = U diag(sigma) V^H.
// An all-zero input yields rank-1 zero factors with sigma = (0) and the
// degenerate flag set.
struct TruncatedSvd {
  Eigen::MatrixXcd u;
  Eigen::VectorXd sigma;
  Eigen::MatrixXcd v;
  bool degenerate{false};

  Eigen::Index rank() const { return sigma.size(); }
};

// Keep singular values > tol * sigma_max, at least one, at most max_rank.
TruncatedSvd truncated_svd(const Eigen::MatrixXcd& z, double tol, Eigen::Index max_rank);

enum class SplitSide {
  Balanced,  // left = U sqrt(S), right = V sqrt(S)
  Left,      // left = U S,       right = V
  Right,     // left = U,         right = V S
};

// approx = left * right^H (right is stored n x r, unconjugated).
struct LowRankFactors {
  Eigen::MatrixXcd left;
  Eigen::MatrixXcd right;
  Eigen::Index rank{0};
  double tol_used{0.0};
};

LowRankFactors split(const TruncatedSvd& svd, SplitSide side, double tol_used = 0.0);

// One interpolative block together with the Chebyshev grid it expands on.
struct InterpBlock {
  Eigen::MatrixXcd block;
  ChebGrid grid;
  bool empty{false};
};

// Expansion in xi on box B for sources restricted to B, recentred at c_A:
// block(t, s) = exp(-i tau Phi(cA, g_t)) * M_t(xi_s) * exp(i tau Phi(cA, xi_s)),
// shape q^d x |points|. Empty point sets give a q^d x 0 block with the flag set.
InterpBlock interp_factor_xi(const PhaseSpec& spec, const Box& a, const Box& b,
                             std::span<const Point> points_in_b, int q);

// Expansion in x on box A for targets restricted to A, recentred at c_B:
// block(s, t) = exp(i tau Phi(x_s, cB)) * M_t(x_s) * exp(-i tau Phi(g_t, cB)),
// shape |points| x q^d.
InterpBlock interp_factor_x(const PhaseSpec& spec, const Box& a,
                            std::span<const Point> points_in_a, const Box& b, int q);

}  // namespace ibf
