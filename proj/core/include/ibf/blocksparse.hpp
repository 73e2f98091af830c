//
// blocksparse : block-sparse factors, factor chains, binary serialization
//

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ibf/kernels.hpp"

namespace ibf {

enum class FactorLabel : std::uint8_t {
  V0 = 0,
  H = 1,
  M = 2,
  G = 3,
  UL = 4,
  C = 5,
  R = 6,
  Mbar = 7,
};

enum class Stage : std::uint8_t {
  Preliminary = 0,
  SweptOut = 1,
  Optimal = 2,
};

// One stored dense block at block coordinates (row, col).
struct Block {
  std::uint32_t row{0};
  std::uint32_t col{0};
  Eigen::MatrixXcd a;
};

// Block-sparse matrix over fixed row/column partitions. Blocks are stored
// sorted by (row, col) with a CSR index per block row; missing blocks are
// zero. Zero-sized partition entries are allowed and carry no blocks.
class BlockSparseMatrix {
 public:
  BlockSparseMatrix() = default;

  // Validates block coordinates, shapes against the partitions, and
  // duplicate coordinates. Blocks may arrive in any order.
  static BlockSparseMatrix from_blocks(std::vector<std::int64_t> row_sizes,
                                       std::vector<std::int64_t> col_sizes,
                                       std::vector<Block> blocks, FactorLabel label, int level);

  FactorLabel label() const { return label_; }
  int level() const { return level_; }

  std::int64_t rows() const { return row_offsets_.back(); }
  std::int64_t cols() const { return col_offsets_.back(); }
  std::size_t block_rows() const { return row_offsets_.size() - 1; }
  std::size_t block_cols() const { return col_offsets_.size() - 1; }

  std::int64_t row_size(std::size_t i) const { return row_offsets_[i + 1] - row_offsets_[i]; }
  std::int64_t col_size(std::size_t j) const { return col_offsets_[j + 1] - col_offsets_[j]; }
  std::int64_t row_offset(std::size_t i) const { return row_offsets_[i]; }
  std::int64_t col_offset(std::size_t j) const { return col_offsets_[j]; }
  const std::vector<std::int64_t>& row_offsets() const { return row_offsets_; }
  const std::vector<std::int64_t>& col_offsets() const { return col_offsets_; }
  std::vector<std::int64_t> row_sizes() const;
  std::vector<std::int64_t> col_sizes() const;

  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t num_blocks() const { return blocks_.size(); }
  // Range [first, last) into blocks() for one block row.
  std::pair<std::size_t, std::size_t> row_range(std::size_t i) const {
    return {row_ptr_[i], row_ptr_[i + 1]};
  }

  // Count of stored dense elements.
  std::int64_t nnz() const;

  Eigen::VectorXcd matvec(const Eigen::VectorXcd& x) const;
  Eigen::MatrixXcd densify() const;
  BlockSparseMatrix conj_transpose() const;

 private:
  std::vector<std::int64_t> row_offsets_{0};
  std::vector<std::int64_t> col_offsets_{0};
  std::vector<Block> blocks_;
  std::vector<std::size_t> row_ptr_;
  FactorLabel label_{FactorLabel::M};
  int level_{0};
};

Eigen::VectorXcd matvec(const BlockSparseMatrix& m, const Eigen::VectorXcd& x);

// Block product; requires a.col partition == b.row partition elementwise.
BlockSparseMatrix bsm_multiply(const BlockSparseMatrix& a, const BlockSparseMatrix& b,
                               FactorLabel label, int level);

struct FactorizationMeta {
  std::int64_t n{0};  // number of points on each side
  int d{1};
  int l{0};   // tree depth
  int q{0};   // Chebyshev order
  double tol{0.0};
  std::uint16_t phase_id{0};
  std::uint64_t x_fingerprint{0};
  std::uint64_t omega_fingerprint{0};
};

// A butterfly factor chain, leftmost factor first (applies right to left).
struct Factorization {
  std::vector<BlockSparseMatrix> factors;
  Stage stage{Stage::Preliminary};
  FactorizationMeta meta;
};

// u = F g with g in T_Omega leaf order and u in T_X leaf order.
Eigen::VectorXcd apply_factorization(const Factorization& f, const Eigen::VectorXcd& g);

std::int64_t nnz(const Factorization& f);

// Binary stream layout (little-endian): magic "IBF1"; u32 version (1);
// meta u32 N, u32 d, u32 L, u32 q, f64 tol, u8 stage, u16 phase-id;
// u32 factor count; per factor: u8 label, u16 level, u32 row partition
// length, u32 col partition length, the row sizes then col sizes as u32
// each, u64 block count, and per block u32 i, u32 j followed by the dense
// entries as f64 (re, im) pairs in column-major order.
void serialize(const Factorization& f, std::ostream& os);
Factorization deserialize(std::istream& is);

void save_factorization(const Factorization& f, const std::string& path);
Factorization load_factorization(const std::string& path);

std::uint64_t fingerprint_points(std::span<const Point> points);

}  // namespace ibf
