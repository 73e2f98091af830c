//
// butterfly : preliminary interpolative butterfly factorization
//
// The chain has L+3 factors,
//   K ~ U^L G^{L-1} ... G^h M^h (H^h)* ... (H^1)* (V^0)*,   h = ceil(L/2),
// acting on coefficient vectors indexed by (X-box, Omega-box) pairs. At
// level l the pair (i, j) couples the level-l box of T_X with the level
// (L-l) box of T_Omega; all 2^{dL} pairs get a slot. Slots are ordered
// xi-major (pos = j*2^{dl} + i) up to the switch level and x-major
// (pos = i*2^{d(L-l)} + j) from it on. Blocks whose Omega box holds no
// points are identically zero and not stored.
//

#pragma once

#include <cstdint>

#include "ibf/blocksparse.hpp"
#include "ibf/geometry.hpp"
#include "ibf/kernels.hpp"

namespace ibf {

class BuildPlan {
 public:
  // depth <= 0 selects default_depth(x_domain, omega_domain).
  BuildPlan(PhaseSpec phase, std::vector<Point> x_points, const Box& x_domain,
            std::vector<Point> omega_points, const Box& omega_domain, int q, int depth = -1);

  const PhaseSpec& phase() const { return phase_; }
  int q() const { return q_; }
  int depth() const { return l_; }
  int switch_level() const { return h_; }
  int dim() const { return tx_.dim(); }
  std::int64_t r_eps() const { return r_eps_; }  // q^d
  const DyadicTree& tx() const { return tx_; }
  const DyadicTree& tomega() const { return tomega_; }

  std::uint64_t num_pairs() const { return std::uint64_t{1} << (dim() * l_); }
  std::uint64_t xi_major_pos(int level, std::uint64_t i, std::uint64_t j) const {
    return j * (std::uint64_t{1} << (dim() * level)) + i;
  }
  std::uint64_t x_major_pos(int level, std::uint64_t i, std::uint64_t j) const {
    return i * (std::uint64_t{1} << (dim() * (l_ - level))) + j;
  }

  // Child interpolation matrix for child bits c: entry (t, s) is the t-th
  // parent cardinal polynomial at the s-th node of child c (scale invariant).
  const Eigen::MatrixXd& lag_child(int c) const { return lag_child_[static_cast<std::size_t>(c)]; }

 private:
  PhaseSpec phase_;
  int q_;
  int l_;
  int h_;
  std::int64_t r_eps_;
  DyadicTree tx_;
  DyadicTree tomega_;
  std::vector<Eigen::MatrixXd> lag_child_;
};

BuildPlan make_plan(PhaseSpec phase, std::vector<Point> x_points, const Box& x_domain,
                    std::vector<Point> omega_points, const Box& omega_domain, int q,
                    int depth = -1);

// (V^0)*: block-diagonal over Omega leaves; block j is q^d x n_j, recentred
// at the T_X root center. Input is g in T_Omega leaf order.
BlockSparseMatrix build_v0(const BuildPlan& plan);

// (H^l)*, 1 <= l <= h: maps level l-1 coefficients to level l, xi-major on
// both sides. Each stored block row holds one q^d x q^d block per nonempty
// child of its Omega box.
BlockSparseMatrix build_h_level(const BuildPlan& plan, int level);

// M^h: one q^d x q^d kernel-sample block per pair, reordering xi-major to
// x-major; the outer (i, j) slot takes its block from xi-major slot (j, i).
BlockSparseMatrix build_switch(const BuildPlan& plan);

// G^l, h <= l <= L-1: maps level l coefficients to level l+1, x-major.
BlockSparseMatrix build_g_level(const BuildPlan& plan, int level);

// U^L: block-diagonal over X leaves; block i is n_i x q^d, recentred at the
// T_Omega root center. Output is u in T_X leaf order.
BlockSparseMatrix build_uL(const BuildPlan& plan);

// Full preliminary chain [U^L, G^{L-1..h}, M^h, (H^{h..1})*, (V^0)*].
Factorization build_preliminary(const BuildPlan& plan, double tol);

}  // namespace ibf
