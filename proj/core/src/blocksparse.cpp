#include "ibf/blocksparse.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string_view>

namespace ibf {

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

namespace {

std::vector<std::int64_t> to_offsets(const std::vector<std::int64_t>& sizes) {
  std::vector<std::int64_t> offsets(sizes.size() + 1, 0);
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 0) throw std::invalid_argument("partition sizes must be nonnegative");
    offsets[i + 1] = offsets[i] + sizes[i];
  }
  return offsets;
}

}  // namespace

BlockSparseMatrix BlockSparseMatrix::from_blocks(std::vector<std::int64_t> row_sizes,
                                                 std::vector<std::int64_t> col_sizes,
                                                 std::vector<Block> blocks, FactorLabel label,
                                                 int level) {
  BlockSparseMatrix m;
  m.label_ = label;
  m.level_ = level;
  m.row_offsets_ = to_offsets(row_sizes);
  m.col_offsets_ = to_offsets(col_sizes);

  std::sort(blocks.begin(), blocks.end(), [](const Block& a, const Block& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto& b = blocks[k];
    if (b.row >= row_sizes.size() || b.col >= col_sizes.size()) {
      throw std::invalid_argument("block coordinates outside partition");
    }
    if (b.a.rows() != row_sizes[b.row] || b.a.cols() != col_sizes[b.col]) {
      throw std::invalid_argument("block shape does not match partition");
    }
    if (k > 0 && blocks[k - 1].row == b.row && blocks[k - 1].col == b.col) {
      throw std::invalid_argument("duplicate block coordinates");
    }
  }
  m.blocks_ = std::move(blocks);

  m.row_ptr_.assign(row_sizes.size() + 1, 0);
  for (const auto& b : m.blocks_) ++m.row_ptr_[b.row + 1];
  for (std::size_t i = 1; i < m.row_ptr_.size(); ++i) m.row_ptr_[i] += m.row_ptr_[i - 1];
  return m;
}

std::vector<std::int64_t> BlockSparseMatrix::row_sizes() const {
  std::vector<std::int64_t> s(block_rows());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = row_size(i);
  return s;
}

std::vector<std::int64_t> BlockSparseMatrix::col_sizes() const {
  std::vector<std::int64_t> s(block_cols());
  for (std::size_t j = 0; j < s.size(); ++j) s[j] = col_size(j);
  return s;
}

std::int64_t BlockSparseMatrix::nnz() const {
  std::int64_t total = 0;
  for (const auto& b : blocks_) total += b.a.size();
  return total;
}

Eigen::VectorXcd BlockSparseMatrix::matvec(const Eigen::VectorXcd& x) const {
  if (x.size() != cols()) throw std::invalid_argument("matvec dimension mismatch");
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(rows());
  for (const auto& b : blocks_) {
    if (b.a.size() == 0) continue;
    y.segment(row_offsets_[b.row], b.a.rows()).noalias() +=
        b.a * x.segment(col_offsets_[b.col], b.a.cols());
  }
  return y;
}

Eigen::MatrixXcd BlockSparseMatrix::densify() const {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(rows(), cols());
  for (const auto& b : blocks_) {
    if (b.a.size() == 0) continue;
    d.block(row_offsets_[b.row], col_offsets_[b.col], b.a.rows(), b.a.cols()) = b.a;
  }
  return d;
}

BlockSparseMatrix BlockSparseMatrix::conj_transpose() const {
  std::vector<Block> blocks;
  blocks.reserve(blocks_.size());
  for (const auto& b : blocks_) {
    blocks.push_back({b.col, b.row, b.a.adjoint()});
  }
  return from_blocks(col_sizes(), row_sizes(), std::move(blocks), label_, level_);
}

Eigen::VectorXcd matvec(const BlockSparseMatrix& m, const Eigen::VectorXcd& x) {
  return m.matvec(x);
}

BlockSparseMatrix bsm_multiply(const BlockSparseMatrix& a, const BlockSparseMatrix& b,
                               FactorLabel label, int level) {
  if (a.block_cols() != b.block_rows()) throw std::invalid_argument("block partition mismatch");
  for (std::size_t k = 0; k < a.block_cols(); ++k) {
    if (a.col_size(k) != b.row_size(k)) throw std::invalid_argument("block partition mismatch");
  }
  // Group b's blocks by row for the inner products.
  std::vector<std::pair<std::size_t, std::size_t>> b_rows(b.block_rows());
  for (std::size_t i = 0; i < b.block_rows(); ++i) b_rows[i] = b.row_range(i);

  std::map<std::pair<std::uint32_t, std::uint32_t>, Eigen::MatrixXcd> acc;
  for (const auto& ab : a.blocks()) {
    const auto [first, last] = b_rows[ab.col];
    for (std::size_t k = first; k < last; ++k) {
      const auto& bb = b.blocks()[k];
      if (ab.a.size() == 0 || bb.a.size() == 0) continue;
      const auto key = std::make_pair(ab.row, bb.col);
      auto it = acc.find(key);
      if (it == acc.end()) {
        acc.emplace(key, ab.a * bb.a);
      } else {
        it->second.noalias() += ab.a * bb.a;
      }
    }
  }
  std::vector<Block> blocks;
  blocks.reserve(acc.size());
  for (auto& [key, m] : acc) blocks.push_back({key.first, key.second, std::move(m)});
  return BlockSparseMatrix::from_blocks(a.row_sizes(), b.col_sizes(), std::move(blocks), label,
                                        level);
}

Eigen::VectorXcd apply_factorization(const Factorization& f, const Eigen::VectorXcd& g) {
  if (f.factors.empty()) throw std::invalid_argument("empty factor chain");
  Eigen::VectorXcd v = g;
  for (auto it = f.factors.rbegin(); it != f.factors.rend(); ++it) {
    v = it->matvec(v);
  }
  return v;
}

std::int64_t nnz(const Factorization& f) {
  std::int64_t total = 0;
  for (const auto& m : f.factors) total += m.nnz();
  return total;
}

namespace {

template <typename T>
void write_pod(std::ostream& os, const T& value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T value;
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw std::runtime_error("truncated factorization stream");
  return value;
}

constexpr std::uint32_t kVersion = 1;

}  // namespace

void serialize(const Factorization& f, std::ostream& os) {
  os.write("IBF1", 4);
  write_pod<std::uint32_t>(os, kVersion);
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(f.meta.n));
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(f.meta.d));
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(f.meta.l));
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(f.meta.q));
  write_pod<double>(os, f.meta.tol);
  write_pod<std::uint8_t>(os, static_cast<std::uint8_t>(f.stage));
  write_pod<std::uint16_t>(os, f.meta.phase_id);
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(f.factors.size()));
  for (const auto& m : f.factors) {
    write_pod<std::uint8_t>(os, static_cast<std::uint8_t>(m.label()));
    write_pod<std::uint16_t>(os, static_cast<std::uint16_t>(m.level()));
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(m.block_rows()));
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(m.block_cols()));
    for (std::size_t i = 0; i < m.block_rows(); ++i) {
      write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(m.row_size(i)));
    }
    for (std::size_t j = 0; j < m.block_cols(); ++j) {
      write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(m.col_size(j)));
    }
    write_pod<std::uint64_t>(os, static_cast<std::uint64_t>(m.num_blocks()));
    for (const auto& b : m.blocks()) {
      write_pod<std::uint32_t>(os, b.row);
      write_pod<std::uint32_t>(os, b.col);
      // Column-major (re, im) pairs; complex<double> has that layout.
      os.write(reinterpret_cast<const char*>(b.a.data()),
               static_cast<std::streamsize>(sizeof(Complex) * static_cast<std::size_t>(b.a.size())));
    }
  }
  if (!os) throw std::runtime_error("failed to write factorization stream");
}

Factorization deserialize(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::string_view(magic, 4) != "IBF1") {
    throw std::runtime_error("bad factorization magic");
  }
  const auto version = read_pod<std::uint32_t>(is);
  if (version != kVersion) throw std::runtime_error("unsupported factorization version");

  Factorization f;
  f.meta.n = read_pod<std::uint32_t>(is);
  f.meta.d = static_cast<int>(read_pod<std::uint32_t>(is));
  f.meta.l = static_cast<int>(read_pod<std::uint32_t>(is));
  f.meta.q = static_cast<int>(read_pod<std::uint32_t>(is));
  f.meta.tol = read_pod<double>(is);
  f.stage = static_cast<Stage>(read_pod<std::uint8_t>(is));
  f.meta.phase_id = read_pod<std::uint16_t>(is);

  const auto count = read_pod<std::uint32_t>(is);
  f.factors.reserve(count);
  for (std::uint32_t fi = 0; fi < count; ++fi) {
    const auto label = static_cast<FactorLabel>(read_pod<std::uint8_t>(is));
    const auto level = static_cast<int>(read_pod<std::uint16_t>(is));
    const auto nrows = read_pod<std::uint32_t>(is);
    const auto ncols = read_pod<std::uint32_t>(is);
    std::vector<std::int64_t> row_sizes(nrows), col_sizes(ncols);
    for (auto& s : row_sizes) s = read_pod<std::uint32_t>(is);
    for (auto& s : col_sizes) s = read_pod<std::uint32_t>(is);
    const auto nblocks = read_pod<std::uint64_t>(is);
    std::vector<Block> blocks;
    blocks.reserve(nblocks);
    for (std::uint64_t k = 0; k < nblocks; ++k) {
      Block b;
      b.row = read_pod<std::uint32_t>(is);
      b.col = read_pod<std::uint32_t>(is);
      if (b.row >= nrows || b.col >= ncols) {
        throw std::runtime_error("block coordinates outside partition");
      }
      b.a.resize(row_sizes[b.row], col_sizes[b.col]);
      is.read(reinterpret_cast<char*>(b.a.data()),
              static_cast<std::streamsize>(sizeof(Complex) * static_cast<std::size_t>(b.a.size())));
      if (!is) throw std::runtime_error("truncated factorization stream");
      blocks.push_back(std::move(b));
    }
    f.factors.push_back(BlockSparseMatrix::from_blocks(std::move(row_sizes), std::move(col_sizes),
                                                       std::move(blocks), label, level));
  }
  return f;
}

void save_factorization(const Factorization& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open file for writing: " + path);
  serialize(f, os);
}

Factorization load_factorization(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open file for reading: " + path);
  return deserialize(is);
}

std::uint64_t fingerprint_points(std::span<const Point> points) {
  // FNV-1a over the coordinate bytes.
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](double value) {
    std::uint64_t bits;
    std::memcpy(&bits, &value, sizeof(bits));
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  for (const auto& p : points) {
    for (int k = 0; k < p.dim; ++k) mix(p[k]);
  }
  return h;
}

}  // namespace ibf
