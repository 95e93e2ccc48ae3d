#pragma once

#include "lgreg/core.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <utility>
#include <vector>

namespace lgreg {

/// Candidate ordering for exact k-NN: the query point itself first, then by
/// squared distance, then by lower index.
template <typename Scalar>
struct NeighborKey {
  bool not_self;
  Scalar dist2;
  Index index;

  friend bool operator<(const NeighborKey& a, const NeighborKey& b) {
    if (a.not_self != b.not_self) return !a.not_self;
    if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
    return a.index < b.index;
  }
};

template <typename Scalar, typename RowA, typename RowB>
Scalar squared_distance(const RowA& a, const RowB& b) {
  Scalar s = 0;
  for (Index d = 0; d < a.size(); ++d) {
    const Scalar diff = a[d] - b[d];
    s += diff * diff;
  }
  return s;
}

/// Static kd-tree over the rows of a point matrix. Queries are exact and return
/// the same ordering as an exhaustive scan (see NeighborKey).
template <typename Scalar>
class KdTree {
 public:
  explicit KdTree(const RowMatrix<Scalar>& points, Index leaf_size = 12)
      : points_(&points), leaf_size_(std::max<Index>(1, leaf_size)) {
    perm_.resize(static_cast<std::size_t>(points.rows()));
    std::iota(perm_.begin(), perm_.end(), Index{0});
    if (!perm_.empty()) root_ = build(0, static_cast<Index>(perm_.size()));
  }

  /// k nearest rows to row `query` of the indexed matrix, nearest first.
  std::vector<NeighborKey<Scalar>> query(Index query, Index k) const {
    std::priority_queue<NeighborKey<Scalar>> heap;
    if (root_ >= 0) search(root_, query, k, heap);
    std::vector<NeighborKey<Scalar>> out(heap.size());
    for (auto it = out.rbegin(); it != out.rend(); ++it) {
      *it = heap.top();
      heap.pop();
    }
    return out;
  }

 private:
  struct Node {
    Index begin, end;  // range in perm_ (leaves only)
    Index split_dim = -1;
    Scalar split = 0;
    Index left = -1, right = -1;
  };

  Index build(Index begin, Index end) {
    const auto& x = *points_;
    Node node{begin, end};
    if (end - begin > leaf_size_) {
      Index best_dim = 0;
      Scalar best_spread = -1;
      for (Index d = 0; d < x.cols(); ++d) {
        Scalar lo = x(perm_[begin], d), hi = lo;
        for (Index t = begin + 1; t < end; ++t) {
          lo = std::min(lo, x(perm_[t], d));
          hi = std::max(hi, x(perm_[t], d));
        }
        if (hi - lo > best_spread) {
          best_spread = hi - lo;
          best_dim = d;
        }
      }
      if (best_spread > 0) {
        const Index mid = begin + (end - begin) / 2;
        std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
                         [&](Index a, Index b) { return x(a, best_dim) < x(b, best_dim); });
        node.split_dim = best_dim;
        node.split = x(perm_[mid], best_dim);
      }
    }
    const auto id = static_cast<Index>(nodes_.size());
    nodes_.push_back(node);
    if (node.split_dim >= 0) {
      const Index mid = begin + (end - begin) / 2;
      const Index l = build(begin, mid);
      const Index r = build(mid, end);
      nodes_[static_cast<std::size_t>(id)].left = l;
      nodes_[static_cast<std::size_t>(id)].right = r;
    }
    return id;
  }

  void search(Index id, Index q, Index k, std::priority_queue<NeighborKey<Scalar>>& heap) const {
    const auto& x = *points_;
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    if (node.split_dim < 0) {
      for (Index t = node.begin; t < node.end; ++t) {
        const Index j = perm_[static_cast<std::size_t>(t)];
        NeighborKey<Scalar> key{j != q, squared_distance<Scalar>(x.row(q), x.row(j)), j};
        if (static_cast<Index>(heap.size()) < k) {
          heap.push(key);
        } else if (key < heap.top()) {
          heap.pop();
          heap.push(key);
        }
      }
      return;
    }
    const Scalar diff = x(q, node.split_dim) - node.split;
    const Index near = diff < 0 ? node.left : node.right;
    const Index far = diff < 0 ? node.right : node.left;
    search(near, q, k, heap);
    // Points equal to the split value may sit on either side, so ties must be visited.
    if (static_cast<Index>(heap.size()) < k || diff * diff <= heap.top().dist2) search(far, q, k, heap);
  }

  const RowMatrix<Scalar>* points_;
  Index leaf_size_;
  std::vector<Index> perm_;
  std::vector<Node> nodes_;
  Index root_ = -1;
};

}  // namespace lgreg
