//
// sweep : structure-preserving compression to the optimal factorization
//
// Sweeping out factors the switch matrix as M^h ~ C^h Mbar (R^h)* and pushes
// the C factors through the G side (G^l C^l ~ C^{l+1} Gbar^l, absorbed into
// U^L) and the R factors through the H side ((R^l)* (H^l)* ~ (Hbar^l)*
// (R^{l-1})*, absorbed into (V^0)*). Sweeping in runs the same pencils in
// the opposite direction with fresh per-stage factors, shrinking ranks near
// the leaves to the local point counts.
//

#pragma once

#include "ibf/blocksparse.hpp"

namespace ibf {

enum class PencilOrientation : std::uint8_t {
  Left,   // compress S*D per block row of S:    S D ~ D~ S~
  Right,  // compress D*S per block column of S: D S ~ S~ D~
};

// A factor pencil: S block-sparse, D block-diagonal. For Left, D's row
// partition must match S's column partition; for Right, D's column
// partition must match S's row partition.
struct Pencil {
  const BlockSparseMatrix& s;
  const BlockSparseMatrix& d;
  PencilOrientation orientation;
};

struct SpCompressResult {
  BlockSparseMatrix d_tilde;  // block-diagonal
  BlockSparseMatrix s_tilde;  // same nonzero pattern as the input S
};

// One truncated SVD per block row (Left) or block column (Right) of the
// pencil product, split balanced. All-zero or structurally empty slices get
// zero-width factors. New block dimensions never exceed max_rank.
SpCompressResult sp_compress(const Pencil& pencil, double tol, std::int64_t max_rank);

struct MiddleFactors {
  BlockSparseMatrix c;       // block-diagonal over x-major slots
  BlockSparseMatrix core;    // Mbar: identity-valued blocks, pattern of M^h
  BlockSparseMatrix r_star;  // (R^h)*, block-diagonal over xi-major slots
};

// Per-block truncated SVD of the switch factor; sigma is absorbed split
// balanced into C and R, leaving identity cores.
MiddleFactors factor_middle(const BlockSparseMatrix& m, double tol, std::int64_t max_rank);

// Preliminary -> swept-out. Consumes its argument to bound peak memory.
Factorization sweep_out(Factorization f, double tol);

// Swept-out -> optimal.
Factorization sweep_in(Factorization f, double tol);

}  // namespace ibf
