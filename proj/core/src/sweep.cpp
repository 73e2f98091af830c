#include "ibf/sweep.hpp"

#include <stdexcept>

#include "ibf/lowrank.hpp"

namespace ibf {

namespace {

// Pointer to the diagonal block (j, j), or nullptr if absent / zero-width.
const Eigen::MatrixXcd* diag_block(const BlockSparseMatrix& d, std::size_t j) {
  const auto [first, last] = d.row_range(j);
  for (std::size_t k = first; k < last; ++k) {
    const auto& b = d.blocks()[k];
    if (b.col == j) return b.a.size() > 0 ? &b.a : nullptr;
  }
  return nullptr;
}

void check_diagonal(const BlockSparseMatrix& d) {
  for (const auto& b : d.blocks()) {
    if (b.row != b.col) throw std::invalid_argument("pencil D factor must be block-diagonal");
  }
}

SpCompressResult sp_compress_left(const BlockSparseMatrix& s, const BlockSparseMatrix& d,
                                  double tol, std::int64_t max_rank) {
  if (s.block_cols() != d.block_rows()) throw std::invalid_argument("pencil partition mismatch");
  for (std::size_t j = 0; j < s.block_cols(); ++j) {
    if (s.col_size(j) != d.row_size(j)) throw std::invalid_argument("pencil partition mismatch");
  }

  const std::size_t m = s.block_rows();
  std::vector<std::int64_t> ranks(m, 0);
  std::vector<Block> d_blocks, s_blocks;

  for (std::size_t i = 0; i < m; ++i) {
    const auto [first, last] = s.row_range(i);
    // Columns of this row whose product block has width > 0.
    std::vector<std::pair<std::size_t, const Eigen::MatrixXcd*>> parts;
    std::int64_t width = 0;
    for (std::size_t k = first; k < last; ++k) {
      const auto& b = s.blocks()[k];
      const auto* dj = diag_block(d, b.col);
      if (b.a.size() == 0 || dj == nullptr) continue;
      parts.emplace_back(k, dj);
      width += dj->cols();
    }
    if (parts.empty() || s.row_size(i) == 0 || width == 0) continue;

    Eigen::MatrixXcd concat(s.row_size(i), width);
    std::int64_t off = 0;
    for (const auto& [k, dj] : parts) {
      concat.middleCols(off, dj->cols()).noalias() = s.blocks()[k].a * (*dj);
      off += dj->cols();
    }
    if (concat.norm() == 0.0) continue;

    const auto svd = truncated_svd(concat, tol, max_rank);
    if (svd.degenerate) continue;
    const auto fac = split(svd, SplitSide::Balanced, tol);
    ranks[i] = fac.rank;
    d_blocks.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i),
                        std::move(fac.left)});
    const Eigen::MatrixXcd rt = fac.right.adjoint();  // rank x width
    off = 0;
    for (const auto& [k, dj] : parts) {
      s_blocks.push_back({static_cast<std::uint32_t>(i), s.blocks()[k].col,
                          rt.middleCols(off, dj->cols())});
      off += dj->cols();
    }
  }

  SpCompressResult out;
  out.d_tilde = BlockSparseMatrix::from_blocks(s.row_sizes(), ranks, std::move(d_blocks),
                                               FactorLabel::C, s.level());
  out.s_tilde = BlockSparseMatrix::from_blocks(std::move(ranks), d.col_sizes(),
                                               std::move(s_blocks), s.label(), s.level());
  return out;
}

SpCompressResult sp_compress_right(const BlockSparseMatrix& s, const BlockSparseMatrix& d,
                                   double tol, std::int64_t max_rank) {
  if (d.block_cols() != s.block_rows()) throw std::invalid_argument("pencil partition mismatch");
  for (std::size_t i = 0; i < s.block_rows(); ++i) {
    if (d.col_size(i) != s.row_size(i)) throw std::invalid_argument("pencil partition mismatch");
  }

  // Group S's blocks by column.
  const std::size_t n = s.block_cols();
  std::vector<std::vector<std::size_t>> by_col(n);
  for (std::size_t k = 0; k < s.blocks().size(); ++k) {
    by_col[s.blocks()[k].col].push_back(k);
  }

  std::vector<std::int64_t> ranks(n, 0);
  std::vector<Block> d_blocks, s_blocks;

  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::pair<std::size_t, const Eigen::MatrixXcd*>> parts;
    std::int64_t height = 0;
    for (std::size_t k : by_col[j]) {
      const auto& b = s.blocks()[k];
      const auto* di = diag_block(d, b.row);
      if (b.a.size() == 0 || di == nullptr) continue;
      parts.emplace_back(k, di);
      height += di->rows();
    }
    if (parts.empty() || s.col_size(j) == 0 || height == 0) continue;

    Eigen::MatrixXcd concat(height, s.col_size(j));
    std::int64_t off = 0;
    for (const auto& [k, di] : parts) {
      concat.middleRows(off, di->rows()).noalias() = (*di) * s.blocks()[k].a;
      off += di->rows();
    }
    if (concat.norm() == 0.0) continue;

    const auto svd = truncated_svd(concat, tol, max_rank);
    if (svd.degenerate) continue;
    const auto fac = split(svd, SplitSide::Balanced, tol);
    ranks[j] = fac.rank;
    d_blocks.push_back({static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(j),
                        fac.right.adjoint()});
    off = 0;
    for (const auto& [k, di] : parts) {
      s_blocks.push_back({s.blocks()[k].row, static_cast<std::uint32_t>(j),
                          fac.left.middleRows(off, di->rows())});
      off += di->rows();
    }
  }

  SpCompressResult out;
  out.s_tilde = BlockSparseMatrix::from_blocks(d.row_sizes(), ranks, std::move(s_blocks),
                                               s.label(), s.level());
  out.d_tilde = BlockSparseMatrix::from_blocks(std::move(ranks), s.col_sizes(),
                                               std::move(d_blocks), FactorLabel::R, s.level());
  return out;
}

// Per-diagonal-block SVD: block_j ~ left_j * right_j.
std::pair<BlockSparseMatrix, BlockSparseMatrix> split_diagonal(const BlockSparseMatrix& m,
                                                               double tol, std::int64_t max_rank,
                                                               FactorLabel left_label,
                                                               FactorLabel right_label) {
  check_diagonal(m);
  const std::size_t n = m.block_rows();
  if (m.block_cols() != n) throw std::invalid_argument("diagonal split needs square block shape");
  std::vector<std::int64_t> ranks(n, 0);
  std::vector<Block> left_blocks, right_blocks;
  for (std::size_t i = 0; i < n; ++i) {
    const auto* bi = diag_block(m, i);
    if (bi == nullptr || bi->norm() == 0.0) continue;
    const auto svd = truncated_svd(*bi, tol, max_rank);
    if (svd.degenerate) continue;
    const auto fac = split(svd, SplitSide::Balanced, tol);
    ranks[i] = fac.rank;
    left_blocks.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i),
                           std::move(fac.left)});
    right_blocks.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i),
                            fac.right.adjoint()});
  }
  auto left = BlockSparseMatrix::from_blocks(m.row_sizes(), ranks, std::move(left_blocks),
                                             left_label, m.level());
  auto right = BlockSparseMatrix::from_blocks(std::move(ranks), m.col_sizes(),
                                              std::move(right_blocks), right_label, m.level());
  return {std::move(left), std::move(right)};
}

struct ChainIndex {
  int l{0};
  int h{0};
  std::size_t u{0};
  std::size_t m{0};
  std::size_t v0{0};
  std::size_t g(int level) const { return m - 1 - static_cast<std::size_t>(level - h); }
  std::size_t hst(int level) const { return m + 1 + static_cast<std::size_t>(h - level); }
};

ChainIndex chain_index(const Factorization& f) {
  ChainIndex idx;
  idx.l = f.meta.l;
  idx.h = (f.meta.l + 1) / 2;
  idx.u = 0;
  idx.m = 1 + static_cast<std::size_t>(idx.l - idx.h);
  idx.v0 = static_cast<std::size_t>(idx.l) + 2;
  if (f.factors.size() != static_cast<std::size_t>(idx.l) + 3) {
    throw std::invalid_argument("factor chain length does not match depth");
  }
  return idx;
}

}  // namespace

SpCompressResult sp_compress(const Pencil& pencil, double tol, std::int64_t max_rank) {
  if (max_rank < 1) throw std::invalid_argument("max_rank must be at least 1");
  check_diagonal(pencil.d);
  if (pencil.orientation == PencilOrientation::Left) {
    return sp_compress_left(pencil.s, pencil.d, tol, max_rank);
  }
  return sp_compress_right(pencil.s, pencil.d, tol, max_rank);
}

MiddleFactors factor_middle(const BlockSparseMatrix& m, double tol, std::int64_t max_rank) {
  const std::size_t nrow = m.block_rows();
  const std::size_t ncol = m.block_cols();
  std::vector<std::int64_t> row_ranks(nrow, 0), col_ranks(ncol, 0);
  std::vector<Block> c_blocks, core_blocks, r_blocks;
  for (const auto& b : m.blocks()) {
    if (b.a.size() == 0 || b.a.norm() == 0.0) continue;
    const auto svd = truncated_svd(b.a, tol, max_rank);
    if (svd.degenerate) continue;
    const auto fac = split(svd, SplitSide::Balanced, tol);
    row_ranks[b.row] = fac.rank;
    col_ranks[b.col] = fac.rank;
    c_blocks.push_back({b.row, b.row, std::move(fac.left)});
    core_blocks.push_back({b.row, b.col, Eigen::MatrixXcd::Identity(fac.rank, fac.rank)});
    r_blocks.push_back({b.col, b.col, fac.right.adjoint()});
  }
  MiddleFactors out;
  out.c = BlockSparseMatrix::from_blocks(m.row_sizes(), row_ranks, std::move(c_blocks),
                                         FactorLabel::C, m.level());
  out.core = BlockSparseMatrix::from_blocks(std::move(row_ranks), col_ranks,
                                            std::move(core_blocks), FactorLabel::Mbar, m.level());
  out.r_star = BlockSparseMatrix::from_blocks(std::move(col_ranks), m.col_sizes(),
                                              std::move(r_blocks), FactorLabel::R, m.level());
  return out;
}

Factorization sweep_out(Factorization f, double tol) {
  if (f.stage != Stage::Preliminary) {
    throw std::invalid_argument("sweep_out expects a preliminary factorization");
  }
  const auto idx = chain_index(f);
  const std::int64_t cap = f.factors[idx.m].row_size(0);  // r_eps = q^d

  auto middle = factor_middle(f.factors[idx.m], tol, cap);
  f.factors[idx.m] = std::move(middle.core);

  // G side: push C factors outward to U^L.
  BlockSparseMatrix c = std::move(middle.c);
  for (int level = idx.h; level <= idx.l - 1; ++level) {
    auto res = sp_compress({f.factors[idx.g(level)], c, PencilOrientation::Left}, tol, cap);
    f.factors[idx.g(level)] = std::move(res.s_tilde);
    c = std::move(res.d_tilde);
  }
  f.factors[idx.u] = bsm_multiply(f.factors[idx.u], c, FactorLabel::UL, idx.l);

  // H side: push R factors outward to (V^0)*.
  BlockSparseMatrix r = std::move(middle.r_star);
  for (int level = idx.h; level >= 1; --level) {
    auto res = sp_compress({f.factors[idx.hst(level)], r, PencilOrientation::Right}, tol, cap);
    f.factors[idx.hst(level)] = std::move(res.s_tilde);
    r = std::move(res.d_tilde);
  }
  f.factors[idx.v0] = bsm_multiply(r, f.factors[idx.v0], FactorLabel::V0, 0);

  f.stage = Stage::SweptOut;
  f.meta.tol = tol;
  return f;
}

Factorization sweep_in(Factorization f, double tol) {
  if (f.stage != Stage::SweptOut) {
    throw std::invalid_argument("sweep_in expects a swept-out factorization");
  }
  const auto idx = chain_index(f);
  std::int64_t cap = 1;
  for (int k = 0; k < f.meta.d; ++k) cap *= f.meta.q;

  // U side: split U off and push C factors inward.
  {
    auto [u_dot, c] = split_diagonal(f.factors[idx.u], tol, cap, FactorLabel::UL, FactorLabel::C);
    f.factors[idx.u] = std::move(u_dot);
    for (int level = idx.l - 1; level >= idx.h; --level) {
      auto res = sp_compress({f.factors[idx.g(level)], c, PencilOrientation::Right}, tol, cap);
      f.factors[idx.g(level)] = std::move(res.s_tilde);
      c = std::move(res.d_tilde);
    }
    f.factors[idx.m] = bsm_multiply(c, f.factors[idx.m], FactorLabel::Mbar, idx.h);
  }

  // V side: split V0 off and push R factors inward.
  {
    auto [r, v_dot] = split_diagonal(f.factors[idx.v0], tol, cap, FactorLabel::R, FactorLabel::V0);
    f.factors[idx.v0] = std::move(v_dot);
    for (int level = 1; level <= idx.h; ++level) {
      auto res = sp_compress({f.factors[idx.hst(level)], r, PencilOrientation::Left}, tol, cap);
      f.factors[idx.hst(level)] = std::move(res.s_tilde);
      r = std::move(res.d_tilde);
    }
    f.factors[idx.m] = bsm_multiply(f.factors[idx.m], r, FactorLabel::M, idx.h);
  }

  f.stage = Stage::Optimal;
  f.meta.tol = tol;
  return f;
}

}  // namespace ibf
