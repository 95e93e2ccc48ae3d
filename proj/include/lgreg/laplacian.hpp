#pragma once

// Graph-Laplacian baselines: Gaussian edge weights, L = D - W, and its powers
// either materialized or applied as p successive products.

#include "lgreg/core.hpp"
#include "lgreg/neighbors.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace lgreg {

/// Symmetric non-negative weights on an undirected edge set; zero diagonal.
template <typename Scalar>
struct WeightMatrix {
  typename SparseSymMatrix<Scalar>::Storage w;

  Index dim() const { return w.rows(); }
};

/// W_ij = exp(-|X_i - X_j|^2 / b) on each edge, stored in both triangles.
template <typename Scalar>
WeightMatrix<Scalar> gaussian_weights(const DataSet<Scalar>& data, const std::vector<Edge>& edges, Scalar b) {
  if (!(b > 0)) throw Error("gaussian_weights: width b must be positive");
  using Triplet = typename SparseSymMatrix<Scalar>::Triplet;
  std::vector<Triplet> triplets;
  triplets.reserve(2 * edges.size());
  for (const auto& [i, j] : edges) {
    require(i != j, "gaussian_weights: self loop in edge list");
    const Scalar w = std::exp(-(data.point(i) - data.point(j)).squaredNorm() / b);
    triplets.emplace_back(i, j, w);
    triplets.emplace_back(j, i, w);
  }
  WeightMatrix<Scalar> out;
  out.w.resize(data.size(), data.size());
  out.w.setFromTriplets(triplets.begin(), triplets.end());
  out.w.makeCompressed();
  return out;
}

/// Unnormalized L = D - W. Note f^T L f = (1/2) sum_{i,j} W_ij (f_i - f_j)^2.
template <typename Scalar>
SparseSymMatrix<Scalar> build_laplacian(const WeightMatrix<Scalar>& weights) {
  using Storage = typename SparseSymMatrix<Scalar>::Storage;
  using Triplet = typename SparseSymMatrix<Scalar>::Triplet;
  const Storage& w = weights.w;
  require(w.rows() == w.cols(), "build_laplacian: weight matrix must be square");
  const Storage asym = Storage(w.transpose()) - w;
  if (asym.nonZeros() > 0 && asym.coeffs().abs().maxCoeff() > 0) {
    throw Error("build_laplacian: weight matrix is not symmetric");
  }
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(w.nonZeros() + w.rows()));
  Vector<Scalar> degree = Vector<Scalar>::Zero(w.rows());
  for (Index c = 0; c < w.outerSize(); ++c) {
    for (typename Storage::InnerIterator it(w, c); it; ++it) {
      if (it.row() == it.col()) continue;
      degree[it.row()] += it.value();
      triplets.emplace_back(it.row(), it.col(), -it.value());
    }
  }
  for (Index i = 0; i < w.rows(); ++i) triplets.emplace_back(i, i, degree[i]);
  return SparseSymMatrix<Scalar>::from_triplets(w.rows(), triplets);
}

/// Convenience: kNN graph -> union edges -> Gaussian weights -> Laplacian.
template <typename Scalar>
SparseSymMatrix<Scalar> build_knn_laplacian(const DataSet<Scalar>& data, Index k, Scalar b, unsigned threads = 1) {
  const auto g = knn_graph(data, k, KnnAlgorithm::automatic, threads);
  return build_laplacian(gaussian_weights(data, symmetrize_edges(g), b));
}

/// Explicit L^p by repeated sparse products, pruning 1e-14 * max|L^p| after each step.
template <typename Scalar>
SparseSymMatrix<Scalar> iterated_matrix(const SparseSymMatrix<Scalar>& l, int p) {
  if (p < 1) throw Error("iterated_matrix: power p = " + std::to_string(p) + " must be >= 1");
  SparseSymMatrix<Scalar> acc = l;
  for (int step = 1; step < p; ++step) {
    typename SparseSymMatrix<Scalar>::Storage prod = acc.matrix() * l.matrix();
    acc = SparseSymMatrix<Scalar>::from_sparse(std::move(prod), true);
  }
  return acc;
}

/// L^p v via p products, never forming L^p.
template <typename Scalar>
Vector<Scalar> iterated_apply(const SparseSymMatrix<Scalar>& l, int p, const Vector<Scalar>& v) {
  if (p < 1) throw Error("iterated_apply: power p = " + std::to_string(p) + " must be >= 1");
  require_dim(v.size(), l.dim(), "iterated_apply");
  Vector<Scalar> out = v;
  for (int step = 0; step < p; ++step) out = l.matrix() * out;
  return out;
}

}  // namespace lgreg
