#include "doctest.h"
#include "test_util.hpp"

#include "lgreg/core.hpp"
#include "lgreg/matrix_market.hpp"

#include <sstream>

using namespace lgreg;
using namespace lgreg::testing;

namespace {

SparseSymMatrixd from_dense(const Mat& d) {
  std::vector<SparseSymMatrixd::Triplet> t;
  for (Index j = 0; j < d.cols(); ++j)
    for (Index i = 0; i < d.rows(); ++i)
      if (d(i, j) != 0) t.emplace_back(i, j, d(i, j));
  return SparseSymMatrixd::from_triplets(d.rows(), t);
}

SparseSymMatrixd edge_laplacian() {
  Mat d(2, 2);
  d << 1, -1, -1, 1;
  return from_dense(d);
}

}  // namespace

TEST_CASE("quadratic_form on a single-edge Laplacian") {
  const auto a = edge_laplacian();
  CHECK(quadratic_form(a, Vec(Vec::Ones(2))) == 0.0);
  Vec f(2);
  f << 1, 0;
  CHECK(quadratic_form(a, f) == doctest::Approx(1.0));
  CHECK_THROWS_AS(quadratic_form(a, Vec(Vec::Ones(3))), DimensionError);
}

TEST_CASE("quadratic_form matches dense evaluation") {
  std::mt19937_64 rng(1);
  const Mat d = random_psd(10, 10, rng);
  const Vec f = random_vector(10, rng);
  const double want = f.dot(d * f);
  CHECK(std::abs(quadratic_form(from_dense(d), f) - want) <= 1e-12 * std::abs(want));
}

TEST_CASE("spmv") {
  Mat diag = Mat::Zero(2, 2);
  diag(0, 0) = 2;
  diag(1, 1) = 3;
  Vec ones = Vec::Ones(2);
  CHECK(spmv(from_dense(diag), ones).isApprox(Vec((Vec(2) << 2, 3).finished())));
  Vec e0(2);
  e0 << 1, 0;
  const Vec got = spmv(edge_laplacian(), e0);
  CHECK(got[0] == 1.0);
  CHECK(got[1] == -1.0);
  CHECK_THROWS_AS(spmv(edge_laplacian(), Vec(Vec::Ones(5))), DimensionError);

  std::mt19937_64 rng(2);
  Mat d = random_matrix(50, 50, rng);
  d = (d + d.transpose()).eval();
  for (Index j = 0; j < 50; ++j)
    for (Index i = 0; i < 50; ++i)
      if ((i * 7 + j * 3) % 5 != 0 && i != j) d(i, j) = d(j, i) = 0;
  const Vec v = random_vector(50, rng);
  const Vec want = d * v;
  CHECK((spmv(from_dense(d), v) - want).norm() <= 1e-12 * want.norm());
}

TEST_CASE("spmv is linear") {
  std::mt19937_64 rng(3);
  const auto a = from_dense(random_psd(30, 5, rng));
  const Vec x = random_vector(30, rng), y = random_vector(30, rng);
  const double alpha = 1.7, beta = -0.4;
  const Vec lhs = spmv(a, Vec(alpha * x + beta * y));
  const Vec rhs = alpha * spmv(a, x) + beta * spmv(a, y);
  CHECK((lhs - rhs).norm() <= 1e-12 * rhs.norm());
}

TEST_CASE("assemble_blocks places and sums blocks") {
  Mat edge(2, 2);
  edge << 1, -1, -1, 1;
  SUBCASE("single block") {
    const auto a = assemble_blocks<double>({{{0, 1}, edge}}, 3).to_dense();
    Mat want = Mat::Zero(3, 3);
    want.topLeftCorner(2, 2) = edge;
    CHECK(a == want);
  }
  SUBCASE("overlapping blocks give the path Laplacian") {
    const auto a = assemble_blocks<double>({{{0, 1}, edge}, {{1, 2}, edge}}, 3).to_dense();
    CHECK(a.diagonal() == Vec((Vec(3) << 1, 2, 1).finished()));
    CHECK(a(0, 1) == -1.0);
    CHECK(a(1, 2) == -1.0);
    CHECK(a(0, 2) == 0.0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(assemble_blocks<double>({{{0, 3}, edge}}, 3), Error);
    Mat asym = edge;
    asym(0, 1) = 0.5;
    CHECK_THROWS_AS(assemble_blocks<double>({{{0, 1}, asym}}, 3), Error);
    CHECK_THROWS_AS(assemble_blocks<double>({{{0, 1, 2}, edge}}, 3), DimensionError);
  }
}

TEST_CASE("assemble_blocks matches dense accumulation and stays PSD") {
  std::mt19937_64 rng(4);
  const Index u = 30;
  std::vector<LocalBlockd> blocks;
  Mat dense = Mat::Zero(u, u);
  for (int b = 0; b < 20; ++b) {
    std::vector<Index> idx(u);
    std::iota(idx.begin(), idx.end(), Index{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(6);
    const Mat blk = random_psd(6, 3, rng);
    for (Index r = 0; r < 6; ++r)
      for (Index c = 0; c < 6; ++c) dense(idx[r], idx[c]) += blk(r, c);
    blocks.push_back({idx, blk});
  }
  const auto a = assemble_blocks(blocks, u);
  CHECK(max_rel_diff(a.to_dense(), dense) <= 1e-12);
  CHECK(min_eigenvalue(a.to_dense()) >= -1e-8 * a.frobenius_norm());

  // Block order does not change the result.
  std::reverse(blocks.begin(), blocks.end());
  CHECK(max_rel_diff(assemble_blocks(blocks, u).to_dense(), a.to_dense()) <= 1e-12);
}

TEST_CASE("zero row-sum blocks annihilate the constant vector") {
  std::mt19937_64 rng(5);
  std::vector<LocalBlockd> blocks;
  for (Index s = 0; s < 8; ++s) {
    Mat b = random_psd(4, 2, rng);
    const Mat c = Mat::Identity(4, 4) - Mat::Constant(4, 4, 0.25);
    b = (c * b * c).eval();
    blocks.push_back({{s, s + 1, s + 2, s + 3}, b});
  }
  const auto a = assemble_blocks(blocks, 11);
  CHECK(std::abs(quadratic_form(a, Vec(Vec::Ones(11)))) <= 1e-12 * a.frobenius_norm());
}

TEST_CASE("finalization symmetrizes and drops tiny entries") {
  std::vector<SparseSymMatrixd::Triplet> t{{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, 2.0 + 1e-15}, {1, 1, 1e-20}, {0, 0, 1.0}};
  const auto a = SparseSymMatrixd::from_triplets(2, t);
  CHECK(a.matrix().coeff(0, 0) == 2.0);
  CHECK(a.matrix().coeff(0, 1) == a.matrix().coeff(1, 0));
  CHECK(a.nnz() == 3);
  CHECK(a.sparsity() == doctest::Approx(0.75));
}

TEST_CASE("Matrix Market round trip") {
  std::mt19937_64 rng(6);
  const auto a = from_dense(random_psd(12, 4, rng));
  std::stringstream ss;
  write_matrix_market(ss, a);
  const std::string text = ss.str();
  CHECK(text.rfind("%%MatrixMarket matrix coordinate real symmetric", 0) == 0);
  const auto back = read_matrix_market<double>(ss);
  CHECK(back.nnz() == a.nnz());
  CHECK(max_rel_diff(back.to_dense(), a.to_dense()) <= 1e-15);

  std::istringstream general("%%MatrixMarket matrix coordinate real general\n% comment\n2 2 3\n1 1 4\n1 2 -1\n2 1 -1\n");
  const auto g = read_matrix_market<double>(general);
  CHECK(g.matrix().coeff(0, 1) == -1.0);
  CHECK(g.matrix().coeff(1, 1) == 0.0);

  std::istringstream bad("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n3 1 1.0\n");
  CHECK_THROWS_AS(read_matrix_market<double>(bad), Error);
}

TEST_CASE("data and label validation") {
  CHECK_THROWS_AS(DataSetd(RowMatrix<double>(0, 2)), Error);
  RowMatrix<double> x(2, 1);
  x << 0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(DataSetd{x}, Error);

  LabelSetd l;
  l.push_back(0, 1.0);
  l.push_back(0, 2.0);
  CHECK_THROWS_AS(l.validate(3), Error);
  LabelSetd r;
  r.push_back(3, 1.0);
  CHECK_THROWS_AS(r.validate(3), Error);
}

TEST_CASE("parallel_for covers every index and propagates errors") {
  std::vector<int> hits(101, 0);
  parallel_for(101, 4, [&](Index i) { hits[static_cast<std::size_t>(i)] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(parallel_for(10, 3, [](Index i) { if (i == 7) throw Error("boom"); }), Error);
}
