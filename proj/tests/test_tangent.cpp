#include "doctest.h"
#include "test_util.hpp"

#include "lgreg/tangent.hpp"

using namespace lgreg;
using namespace lgreg::testing;

namespace {

// Chart for a data set whose single neighborhood is the whole set.
LocalChartd whole_chart(const RowMatrix<double>& x, Index center, Index m) {
  const DataSetd data(x);
  return local_chart(data, knn_graph(data, x.rows()), center, m);
}

}  // namespace

TEST_CASE("points on a line recover their own coordinate") {
  RowMatrix<double> x(3, 3);
  x << 0, 0, 0, 1, 0, 0, 2, 0, 0;
  const auto c = whole_chart(x, 1, 1);
  // Neighborhood order for point 1 is {1, 0, 2}.
  CHECK(c.indices == std::vector<Index>{1, 0, 2});
  CHECK(c.coords(0, 0) == doctest::Approx(0.0));
  CHECK(c.coords(1, 0) == doctest::Approx(-1.0));
  CHECK(c.coords(2, 0) == doctest::Approx(1.0));
  CHECK(c.l_of_i == 0);
  CHECK(c.directions(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("planar data reconstructs exactly") {
  std::mt19937_64 rng(1);
  RowMatrix<double> x = uniform_points(15, 3, rng);
  x.col(2).setZero();
  const auto c = whole_chart(x, 4, 2);
  double err = 0;
  for (Index r = 0; r < c.k(); ++r) {
    const Vec rec = c.mean + c.directions * c.coords.row(r).transpose();
    err += (x.row(c.indices[static_cast<std::size_t>(r)]).transpose() - rec).squaredNorm();
  }
  CHECK(err <= 1e-20);
  CHECK_FALSE(c.rank_deficient());
}

TEST_CASE("coords match an independent covariance eigendecomposition") {
  std::mt19937_64 rng(2);
  const RowMatrix<double> x = uniform_points(20, 5, rng);
  const auto c = whole_chart(x, 0, 3);

  Mat nb(20, 5);
  for (Index r = 0; r < 20; ++r) nb.row(r) = x.row(c.indices[static_cast<std::size_t>(r)]);
  const Mat centered = nb.rowwise() - nb.colwise().mean();
  Eigen::JacobiSVD<Mat> svd(centered, Eigen::ComputeThinV);
  const Mat want = centered * svd.matrixV().leftCols(3);
  for (Index a = 0; a < 3; ++a) {
    const double sign = want.col(a).dot(c.coords.col(a)) < 0 ? -1.0 : 1.0;
    CHECK((c.coords.col(a) - sign * want.col(a)).cwiseAbs().maxCoeff() <= 1e-8);
  }
  CHECK(std::abs((c.coords.transpose() * c.coords)(0, 1)) <= 1e-10);
}

TEST_CASE("wide neighborhoods (n > k) use the Gram path consistently") {
  std::mt19937_64 rng(3);
  const RowMatrix<double> x = uniform_points(8, 30, rng);
  const auto c = whole_chart(x, 2, 4);
  Mat nb(8, 30);
  for (Index r = 0; r < 8; ++r) nb.row(r) = x.row(c.indices[static_cast<std::size_t>(r)]);
  const Mat centered = nb.rowwise() - nb.colwise().mean();
  Eigen::JacobiSVD<Mat> svd(centered, Eigen::ComputeThinV);
  const Mat want = centered * svd.matrixV().leftCols(4);
  for (Index a = 0; a < 4; ++a) {
    const double sign = want.col(a).dot(c.coords.col(a)) < 0 ? -1.0 : 1.0;
    CHECK((c.coords.col(a) - sign * want.col(a)).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(c.directions.col(a).norm() == doctest::Approx(1.0));
  }
}

TEST_CASE("sign convention: largest direction component is positive") {
  std::mt19937_64 rng(4);
  const auto c = whole_chart(uniform_points(12, 4, rng), 0, 3);
  for (Index a = 0; a < 3; ++a) {
    Index arg;
    c.directions.col(a).cwiseAbs().maxCoeff(&arg);
    CHECK(c.directions(arg, a) > 0);
  }
}

TEST_CASE("chart is invariant under rigid motion up to per-axis sign") {
  std::mt19937_64 rng(5);
  const RowMatrix<double> x = uniform_points(25, 3, rng);
  Eigen::HouseholderQR<Mat> qr(random_matrix(3, 3, rng));
  const Mat rot = qr.householderQ();
  const RowMatrix<double> y = (x * rot.transpose()).rowwise() + Eigen::RowVector3d(3, -2, 7);
  const auto a = whole_chart(x, 3, 2);
  const auto b = whole_chart(y, 3, 2);
  CHECK(a.indices == b.indices);
  for (Index t = 0; t < 2; ++t) {
    const double sign = a.coords.col(t).dot(b.coords.col(t)) < 0 ? -1.0 : 1.0;
    CHECK((a.coords.col(t) - sign * b.coords.col(t)).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("flat data: chart distances equal ambient distances") {
  std::mt19937_64 rng(6);
  const auto s = affine_subspace_sample(30, 2, 6, rng);
  const DataSetd data(s.points);
  const auto g = knn_graph(data, 12);
  const auto c = local_chart(data, g, 7, 2);
  for (Index a = 0; a < c.k(); ++a)
    for (Index b = 0; b < c.k(); ++b) {
      const double chart = (c.coords.row(a) - c.coords.row(b)).norm();
      const double amb = (data.point(c.indices[static_cast<std::size_t>(a)]) - data.point(c.indices[static_cast<std::size_t>(b)])).norm();
      CHECK(std::abs(chart - amb) <= 1e-10);
    }
}

TEST_CASE("adaptive sigma") {
  SUBCASE("distances {0, 1, 1}") {
    RowMatrix<double> x(3, 2);
    x << 0, 0, 1, 0, 0, 1;
    const auto c = whole_chart(x, 0, 1);
    CHECK(c.sigma == doctest::Approx(0.1 * 2.0 / 3.0).epsilon(1e-14));
  }
  SUBCASE("all neighbors at distance d") {
    const double d = 2.5;
    RowMatrix<double> x(5, 2);
    x << 0, 0, d, 0, -d, 0, 0, d, 0, -d;
    const auto c = whole_chart(x, 0, 2);
    CHECK(c.sigma == doctest::Approx(0.1 * d * 4.0 / 5.0));
  }
  SUBCASE("direct recomputation") {
    std::mt19937_64 rng(7);
    const DataSetd data(uniform_points(50, 3, rng));
    const auto g = knn_graph(data, 9);
    for (Index i = 0; i < 50; ++i) {
      const auto c = local_chart(data, g, i, 2);
      double s = 0;
      for (Index j : g.lists[static_cast<std::size_t>(i)]) s += (data.point(i) - data.point(j)).norm();
      CHECK(std::abs(c.sigma - 0.1 * s / 9) <= 1e-12 * c.sigma);
      CHECK(adaptive_sigma(data, c) == c.sigma);
    }
  }
}

TEST_CASE("degenerate and rank-deficient neighborhoods") {
  RowMatrix<double> same(4, 2);
  same.setConstant(1.5);
  const auto c = whole_chart(same, 0, 1);
  CHECK(c.degenerate);
  CHECK(c.coords.isZero());
  CHECK(c.sigma == 0.0);
  CHECK_THROWS_AS(adaptive_sigma(DataSetd(same), c), DegenerateNeighborhood);

  RowMatrix<double> line(5, 3);
  for (Index i = 0; i < 5; ++i) line.row(i) << static_cast<double>(i), 2.0 * static_cast<double>(i), 0.0;
  const auto r = whole_chart(line, 2, 2);
  CHECK_FALSE(r.degenerate);
  CHECK(r.rank == 1);
  CHECK(r.rank_deficient());
  CHECK(r.coords.col(1).isZero());
}

TEST_CASE("m must not exceed min(k - 1, n)") {
  std::mt19937_64 rng(8);
  const DataSetd data(uniform_points(10, 2, rng));
  const auto g = knn_graph(data, 3);
  CHECK_THROWS_AS(local_chart(data, g, 0, 3), Error);
  const auto g2 = knn_graph(data, 2);
  CHECK_THROWS_AS(local_chart(data, g2, 0, 2), Error);
  CHECK_NOTHROW(local_chart(data, g2, 0, 1));
}
