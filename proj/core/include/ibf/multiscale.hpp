//
// multiscale : corona decomposition in frequency for 2D kernels
//
// The frequency square is peeled into dyadic coronas
//   Omega_t = { n/2^{t+2} < max(|xi1|, |xi2|) <= n/2^{t+1} },
// peeling while the remaining center region is at least 16 wide; the center
// is applied densely. Each corona gets its own butterfly factorization over
// its bounding box.
//

#pragma once

#include "ibf/butterfly.hpp"
#include "ibf/sweep.hpp"

namespace ibf {

struct CoronaDecomposition {
  int n{0};      // frequency grid side
  int t_max{-1}; // largest corona index; -1 means a single direct block
  std::vector<std::vector<std::uint32_t>> corona_points;  // per t, ids into omega
  std::vector<std::uint32_t> center_points;

  bool degenerate() const { return t_max < 0; }
};

// Exact membership by max(|xi1|,|xi2|); every point lands in exactly one
// corona or the center. n < 32 is degenerate: everything in the center.
CoronaDecomposition corona_decompose(std::span<const Point> omega, int n);

struct MibfBuild {
  CoronaDecomposition decomp;
  std::vector<Factorization> coronas;  // one per t, at the requested stage
  // Original point ids in the leaf orders the factor chains use. Corona
  // depths differ, so each corona carries its own X order too.
  std::vector<std::vector<std::uint32_t>> corona_omega_order;
  std::vector<std::vector<std::uint32_t>> corona_x_order;
  Eigen::MatrixXcd k_center;  // |X| x |center|, original point orders
  std::vector<std::uint32_t> center_ids;
  std::int64_t nnz_preliminary{0};  // summed over coronas, butterfly factors only
  std::int64_t nnz_final{0};
  Stage stage{Stage::Optimal};
  std::int64_t num_x{0};
};

// Builds every corona factorization through the requested stage, plus the
// dense center block. Each corona gets its own depth from its bounding box
// (unit-width frequency leaves), hence its own target-side leaf order.
MibfBuild build_mibf(const PhaseSpec& spec, std::vector<Point> x_points, const Box& x_domain,
                     std::vector<Point> omega_points, int n, int q, double tol,
                     Stage target = Stage::Optimal, int depth_override = -1);

// u = sum_t IBF_t(g restricted to corona t) + K_center g_center, in the
// original point orders on both sides.
Eigen::VectorXcd apply_mibf(const MibfBuild& build, const Eigen::VectorXcd& g);

}  // namespace ibf
