#pragma once

#include "lgreg/core.hpp"
#include "lgreg/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace lgreg {

/// Per-point k-nearest-neighbor lists. lists[i][0] == i (self-inclusion), the
/// rest ascending by Euclidean distance with ties broken by lower index.
template <typename Scalar>
struct NeighborhoodGraph {
  Index k = 0;
  std::vector<std::vector<Index>> lists;
  std::vector<std::vector<Scalar>> dists;

  Index size() const { return static_cast<Index>(lists.size()); }
};

/// Dimension above which the kd-tree stops paying off and a linear scan is used.
inline constexpr Index kKdTreeMaxDim = 16;

enum class KnnAlgorithm { automatic, kdtree, brute_force };

template <typename Scalar>
NeighborhoodGraph<Scalar> knn_graph(const DataSet<Scalar>& data, Index k,
                                    KnnAlgorithm algorithm = KnnAlgorithm::automatic, unsigned threads = 1) {
  const Index u = data.size();
  if (k < 1 || k > u) {
    throw Error("knn_graph: k = " + std::to_string(k) + " must lie in [1, u = " + std::to_string(u) + "]");
  }
  require(data.points().allFinite(), "knn_graph: non-finite coordinates");
  if (algorithm == KnnAlgorithm::automatic) {
    algorithm = data.dim() <= kKdTreeMaxDim ? KnnAlgorithm::kdtree : KnnAlgorithm::brute_force;
  }

  NeighborhoodGraph<Scalar> g;
  g.k = k;
  g.lists.resize(static_cast<std::size_t>(u));
  g.dists.resize(static_cast<std::size_t>(u));

  auto store = [&](Index i, const std::vector<NeighborKey<Scalar>>& keys) {
    auto& list = g.lists[static_cast<std::size_t>(i)];
    auto& dist = g.dists[static_cast<std::size_t>(i)];
    list.resize(keys.size());
    dist.resize(keys.size());
    for (std::size_t t = 0; t < keys.size(); ++t) {
      list[t] = keys[t].index;
      dist[t] = std::sqrt(keys[t].dist2);
    }
  };

  const auto& x = data.points();
  if (algorithm == KnnAlgorithm::kdtree) {
    const KdTree<Scalar> tree(x);
    parallel_for(u, threads, [&](Index i) { store(i, tree.query(i, k)); });
  } else {
    parallel_for(u, threads, [&](Index i) {
      std::vector<NeighborKey<Scalar>> keys(static_cast<std::size_t>(u));
      for (Index j = 0; j < u; ++j) keys[static_cast<std::size_t>(j)] = {j != i, squared_distance<Scalar>(x.row(i), x.row(j)), j};
      std::partial_sort(keys.begin(), keys.begin() + k, keys.end());
      keys.resize(static_cast<std::size_t>(k));
      store(i, keys);
    });
  }
  return g;
}

/// Undirected edge (first < second).
using Edge = std::pair<Index, Index>;

/// Union-symmetrized edge set of a k-NN graph, sorted, without self loops.
template <typename Scalar>
std::vector<Edge> symmetrize_edges(const NeighborhoodGraph<Scalar>& g) {
  std::vector<Edge> edges;
  for (Index i = 0; i < g.size(); ++i) {
    for (Index j : g.lists[static_cast<std::size_t>(i)]) {
      if (j != i) edges.emplace_back(std::min(i, j), std::max(i, j));
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

using NeighborhoodGraphd = NeighborhoodGraph<double>;

}  // namespace lgreg
