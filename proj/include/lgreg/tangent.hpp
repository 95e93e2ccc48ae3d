#pragma once

#include "lgreg/core.hpp"
#include "lgreg/neighbors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace lgreg {

/// Tangent-space chart of one neighborhood N_k(X_i).
///
/// coords holds the k neighbors projected onto the m leading principal
/// directions of the mean-centered neighborhood. Directions beyond the
/// numerical rank of the neighborhood get zero coordinates.
template <typename Scalar>
struct LocalChart {
  Index center = 0;
  std::vector<Index> indices;  // ids of N_k(X_i), in neighbor-list order
  Matrix<Scalar> coords;       // k x m
  Matrix<Scalar> directions;   // n x m, unit columns (zero past `rank`)
  Vector<Scalar> mean;         // n
  Index l_of_i = 0;            // position of `center` in `indices`
  Index rank = 0;              // numerical rank of the centered neighborhood, capped at m
  Scalar sigma = 0;            // kernel width, ambient distance units
  bool degenerate = false;     // all neighborhood points coincide

  Index k() const { return static_cast<Index>(indices.size()); }
  Index m() const { return coords.cols(); }
  bool rank_deficient() const { return rank < m(); }

  /// Chart coordinates translated so that the center point sits at the origin.
  Matrix<Scalar> centered_coords() const { return coords.rowwise() - coords.row(l_of_i); }
};

class DegenerateNeighborhood : public Error {
 public:
  DegenerateNeighborhood(Index point, const std::string& what)
      : Error("point " + std::to_string(point) + ": " + what), point_(point) {}
  Index point() const { return point_; }

 private:
  Index point_;
};

namespace detail {

// Flip each direction so its largest-magnitude component is positive
// (first such component on ties).
template <typename Scalar>
void fix_signs(Matrix<Scalar>& dirs) {
  for (Index c = 0; c < dirs.cols(); ++c) {
    Index arg = 0;
    Scalar best = -1;
    for (Index r = 0; r < dirs.rows(); ++r) {
      if (std::abs(dirs(r, c)) > best) {
        best = std::abs(dirs(r, c));
        arg = r;
      }
    }
    if (dirs(arg, c) < 0) dirs.col(c) *= Scalar(-1);
  }
}

}  // namespace detail

/// 0.1 times the mean ambient distance from X_i to the members of N_k(X_i).
template <typename Scalar>
Scalar adaptive_sigma(const DataSet<Scalar>& data, const LocalChart<Scalar>& chart) {
  Scalar sum = 0;
  const auto xi = data.point(chart.center);
  for (Index j : chart.indices) sum += (data.point(j) - xi).norm();
  const Scalar sigma = Scalar(0.1) * sum / static_cast<Scalar>(chart.k());
  if (!(sigma > 0)) throw DegenerateNeighborhood(chart.center, "all neighbors coincide, kernel width would be zero");
  return sigma;
}

template <typename Scalar>
LocalChart<Scalar> local_chart(const DataSet<Scalar>& data, const NeighborhoodGraph<Scalar>& g, Index i, Index m) {
  require(i >= 0 && i < g.size(), "local_chart: point id out of range");
  const auto& list = g.lists[static_cast<std::size_t>(i)];
  const auto k = static_cast<Index>(list.size());
  const Index n = data.dim();
  if (m < 1 || m > std::min(k - 1, n)) {
    throw Error("local_chart: m = " + std::to_string(m) + " must lie in [1, min(k-1, n) = " +
                std::to_string(std::min(k - 1, n)) + "]");
  }

  LocalChart<Scalar> chart;
  chart.center = i;
  chart.indices = list;
  chart.l_of_i = static_cast<Index>(std::find(list.begin(), list.end(), i) - list.begin());
  require(chart.l_of_i < k, "local_chart: neighborhood does not contain its center");

  Matrix<Scalar> nbhd(k, n);
  for (Index r = 0; r < k; ++r) nbhd.row(r) = data.point(list[static_cast<std::size_t>(r)]);
  chart.mean = nbhd.colwise().mean().transpose();
  const Matrix<Scalar> centered = nbhd.rowwise() - chart.mean.transpose();

  chart.coords = Matrix<Scalar>::Zero(k, m);
  chart.directions = Matrix<Scalar>::Zero(n, m);

  // Principal directions from whichever Gram form is smaller.
  Vector<Scalar> evals;
  Matrix<Scalar> dirs(n, m);
  if (n <= k) {
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(centered.transpose() * centered);
    evals = es.eigenvalues().reverse();
    dirs = es.eigenvectors().rowwise().reverse().leftCols(m);
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(centered * centered.transpose());
    evals = es.eigenvalues().reverse();
    const Matrix<Scalar> left = es.eigenvectors().rowwise().reverse().leftCols(m);
    for (Index c = 0; c < m; ++c) {
      const Scalar s = std::sqrt(std::max<Scalar>(evals[c], 0));
      dirs.col(c) = s > 0 ? Vector<Scalar>(centered.transpose() * left.col(c) / s) : Vector<Scalar>::Zero(n);
    }
  }

  const Scalar top = std::max<Scalar>(evals[0], 0);
  const Scalar cutoff = static_cast<Scalar>(std::max(k, n)) * std::numeric_limits<Scalar>::epsilon() * top;
  chart.rank = 0;
  while (chart.rank < m && evals[chart.rank] > cutoff) ++chart.rank;
  chart.degenerate = top == 0;

  if (chart.rank > 0) {
    Matrix<Scalar> kept = dirs.leftCols(chart.rank);
    detail::fix_signs(kept);
    chart.directions.leftCols(chart.rank) = kept;
    chart.coords.leftCols(chart.rank) = centered * kept;
  }
  if (!chart.degenerate) chart.sigma = adaptive_sigma(data, chart);
  return chart;
}

using LocalChartd = LocalChart<double>;

}  // namespace lgreg
