#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "ibf/blocksparse.hpp"

using namespace ibf;

namespace {

Eigen::MatrixXcd random_complex(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = Complex(gauss(rng), gauss(rng));
  }
  return m;
}

Eigen::VectorXcd random_vector(std::mt19937_64& rng, Eigen::Index n) {
  return random_complex(rng, n, 1).col(0);
}

// A scattered test matrix over irregular partitions, with one empty block row.
BlockSparseMatrix sample_matrix(std::mt19937_64& rng) {
  const std::vector<std::int64_t> row_sizes = {2, 3, 0, 4};
  const std::vector<std::int64_t> col_sizes = {1, 2, 3};
  std::vector<Block> blocks;
  blocks.push_back({0, 1, random_complex(rng, 2, 2)});
  blocks.push_back({1, 0, random_complex(rng, 3, 1)});
  blocks.push_back({1, 2, random_complex(rng, 3, 3)});
  blocks.push_back({3, 2, random_complex(rng, 4, 3)});
  return BlockSparseMatrix::from_blocks(row_sizes, col_sizes, std::move(blocks), FactorLabel::M, 2);
}

}  // namespace

TEST_CASE("from_blocks validates coordinates, shapes, and duplicates") {
  std::mt19937_64 rng(1);
  const std::vector<std::int64_t> rs = {2, 2};
  const std::vector<std::int64_t> cs = {3};

  CHECK_THROWS_AS(BlockSparseMatrix::from_blocks(
                      rs, cs, {{2, 0, random_complex(rng, 2, 3)}}, FactorLabel::M, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(BlockSparseMatrix::from_blocks(
                      rs, cs, {{0, 1, random_complex(rng, 2, 3)}}, FactorLabel::M, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(BlockSparseMatrix::from_blocks(
                      rs, cs, {{0, 0, random_complex(rng, 2, 2)}}, FactorLabel::M, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      BlockSparseMatrix::from_blocks(
          rs, cs, {{0, 0, random_complex(rng, 2, 3)}, {0, 0, random_complex(rng, 2, 3)}},
          FactorLabel::M, 0),
      std::invalid_argument);
  CHECK_THROWS_AS(BlockSparseMatrix::from_blocks({2, -1}, cs, {}, FactorLabel::M, 0),
                  std::invalid_argument);
}

TEST_CASE("matvec agrees with the densified matrix") {
  std::mt19937_64 rng(2);
  const BlockSparseMatrix m = sample_matrix(rng);
  CHECK(m.rows() == 9);
  CHECK(m.cols() == 6);
  CHECK(m.nnz() == 4 + 3 + 9 + 12);

  const Eigen::VectorXcd x = random_vector(rng, 6);
  const Eigen::VectorXcd direct = m.densify() * x;
  const Eigen::VectorXcd fast = m.matvec(x);
  CHECK((direct - fast).norm() <= 1e-13 * direct.norm());

  CHECK_THROWS_AS(m.matvec(random_vector(rng, 5)), std::invalid_argument);
}

TEST_CASE("conjugate transpose swaps partitions and adjoins entries") {
  std::mt19937_64 rng(3);
  const BlockSparseMatrix m = sample_matrix(rng);
  const BlockSparseMatrix mt = m.conj_transpose();
  CHECK(mt.rows() == m.cols());
  CHECK(mt.cols() == m.rows());
  CHECK(mt.num_blocks() == m.num_blocks());
  CHECK((mt.densify() - m.densify().adjoint()).norm() == doctest::Approx(0.0));
}

TEST_CASE("block product matches the dense product and checks partitions") {
  std::mt19937_64 rng(4);
  const std::vector<std::int64_t> p = {2, 3};
  const std::vector<std::int64_t> q = {1, 2, 2};
  const std::vector<std::int64_t> r = {3, 1};

  std::vector<Block> ab;
  ab.push_back({0, 0, random_complex(rng, 2, 1)});
  ab.push_back({0, 2, random_complex(rng, 2, 2)});
  ab.push_back({1, 1, random_complex(rng, 3, 2)});
  const auto a = BlockSparseMatrix::from_blocks(p, q, std::move(ab), FactorLabel::G, 3);

  std::vector<Block> bb;
  bb.push_back({0, 0, random_complex(rng, 1, 3)});
  bb.push_back({1, 0, random_complex(rng, 2, 3)});
  bb.push_back({2, 1, random_complex(rng, 2, 1)});
  const auto b = BlockSparseMatrix::from_blocks(q, r, std::move(bb), FactorLabel::C, 3);

  const auto prod = bsm_multiply(a, b, FactorLabel::UL, 5);
  CHECK(prod.label() == FactorLabel::UL);
  CHECK(prod.level() == 5);
  CHECK((prod.densify() - a.densify() * b.densify()).norm() <= 1e-12);
  CHECK(prod.row_sizes() == p);
  CHECK(prod.col_sizes() == r);

  // Mismatched inner partition: same total size, different block sizes.
  std::vector<Block> cb;
  cb.push_back({0, 0, random_complex(rng, 2, 3)});
  cb.push_back({1, 0, random_complex(rng, 3, 3)});
  const auto c = BlockSparseMatrix::from_blocks({2, 3}, {3}, std::move(cb), FactorLabel::C, 0);
  CHECK_THROWS_AS(bsm_multiply(a, c, FactorLabel::M, 0), std::invalid_argument);
}

TEST_CASE("factorization application multiplies the chain right to left") {
  std::mt19937_64 rng(5);
  Factorization f;
  f.stage = Stage::Preliminary;
  f.meta.n = 4;
  f.meta.d = 1;
  f.meta.l = 2;
  f.meta.q = 2;
  f.meta.tol = 1e-6;

  std::vector<Block> b1;
  b1.push_back({0, 0, random_complex(rng, 3, 2)});
  b1.push_back({1, 1, random_complex(rng, 2, 2)});
  f.factors.push_back(BlockSparseMatrix::from_blocks({3, 2}, {2, 2}, std::move(b1),
                                                     FactorLabel::UL, 2));
  std::vector<Block> b2;
  b2.push_back({0, 1, random_complex(rng, 2, 2)});
  b2.push_back({1, 0, random_complex(rng, 2, 2)});
  f.factors.push_back(BlockSparseMatrix::from_blocks({2, 2}, {2, 2}, std::move(b2),
                                                     FactorLabel::V0, 0));

  const Eigen::VectorXcd g = random_vector(rng, 4);
  const Eigen::VectorXcd want = f.factors[0].densify() * (f.factors[1].densify() * g);
  CHECK((apply_factorization(f, g) - want).norm() <= 1e-13 * want.norm());
  CHECK(nnz(f) == 6 + 4 + 4 + 4);

  Factorization empty;
  CHECK_THROWS_AS(apply_factorization(empty, g), std::invalid_argument);
}

TEST_CASE("serialization round-trips bit for bit") {
  std::mt19937_64 rng(6);
  Factorization f;
  f.stage = Stage::SweptOut;
  f.meta.n = 9;
  f.meta.d = 1;
  f.meta.l = 2;
  f.meta.q = 3;
  f.meta.tol = 2.5e-7;
  f.meta.phase_id = 1;
  f.meta.x_fingerprint = 0xdeadbeefcafef00dULL;
  f.meta.omega_fingerprint = 42;
  f.factors.push_back(sample_matrix(rng));
  f.factors.push_back(sample_matrix(rng).conj_transpose());

  std::stringstream ss;
  serialize(f, ss);
  const Factorization g = deserialize(ss);

  CHECK(g.stage == f.stage);
  CHECK(g.meta.n == f.meta.n);
  CHECK(g.meta.d == f.meta.d);
  CHECK(g.meta.l == f.meta.l);
  CHECK(g.meta.q == f.meta.q);
  CHECK(g.meta.tol == f.meta.tol);
  CHECK(g.meta.phase_id == f.meta.phase_id);
  // Point fingerprints are a build-time cross-check, not part of the stream
  // format; they deserialize as zero (unknown).
  CHECK(g.meta.x_fingerprint == 0);
  CHECK(g.meta.omega_fingerprint == 0);
  REQUIRE(g.factors.size() == f.factors.size());
  for (std::size_t k = 0; k < f.factors.size(); ++k) {
    const auto& a = f.factors[k];
    const auto& b = g.factors[k];
    CHECK(a.label() == b.label());
    CHECK(a.level() == b.level());
    CHECK(a.row_sizes() == b.row_sizes());
    CHECK(a.col_sizes() == b.col_sizes());
    REQUIRE(a.num_blocks() == b.num_blocks());
    for (std::size_t i = 0; i < a.num_blocks(); ++i) {
      CHECK(a.blocks()[i].row == b.blocks()[i].row);
      CHECK(a.blocks()[i].col == b.blocks()[i].col);
      // Exact equality: entry bytes are copied verbatim.
      CHECK((a.blocks()[i].a - b.blocks()[i].a).norm() == 0.0);
    }
  }
}

TEST_CASE("deserialization rejects corrupt and truncated streams") {
  std::mt19937_64 rng(7);
  Factorization f;
  f.stage = Stage::Optimal;
  f.meta.n = 9;
  f.meta.d = 1;
  f.meta.l = 2;
  f.meta.q = 3;
  f.factors.push_back(sample_matrix(rng));

  std::stringstream ss;
  serialize(f, ss);
  const std::string bytes = ss.str();

  std::stringstream bad_magic(std::string("XXXX") + bytes.substr(4));
  CHECK_THROWS_AS(deserialize(bad_magic), std::runtime_error);

  std::stringstream truncated(bytes.substr(0, bytes.size() / 2));
  CHECK_THROWS_AS(deserialize(truncated), std::runtime_error);

  std::string wrong_version = bytes;
  wrong_version[4] = 9;  // version field follows the magic
  std::stringstream wv(wrong_version);
  CHECK_THROWS_AS(deserialize(wv), std::runtime_error);
}

TEST_CASE("file save and load mirror stream serialization") {
  std::mt19937_64 rng(8);
  Factorization f;
  f.stage = Stage::Preliminary;
  f.meta.n = 9;
  f.meta.d = 1;
  f.meta.l = 2;
  f.meta.q = 3;
  f.factors.push_back(sample_matrix(rng));

  const std::string path = "roundtrip_test.ibf";
  save_factorization(f, path);
  const Factorization g = load_factorization(path);
  CHECK(g.factors.size() == 1);
  CHECK((g.factors[0].densify() - f.factors[0].densify()).norm() == 0.0);
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_factorization("does_not_exist.ibf"), std::runtime_error);
}

TEST_CASE("point fingerprints are order- and value-sensitive") {
  const std::vector<Point> a = {Point(0.5), Point(0.25)};
  const std::vector<Point> b = {Point(0.25), Point(0.5)};
  std::vector<Point> c = a;
  CHECK(fingerprint_points(a) == fingerprint_points(c));
  CHECK(fingerprint_points(a) != fingerprint_points(b));
  c[0] = Point(0.5000001);
  CHECK(fingerprint_points(a) != fingerprint_points(c));
}
