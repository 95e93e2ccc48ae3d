#pragma once

#include <Eigen/Core>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace lgreg {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
// Point clouds are stored one point per row.
template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw Error(what);
}

inline void require_dim(Index got, Index want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(want) +
                         ", got " + std::to_string(got));
  }
}

/// u points in R^n, one per row.
template <typename Scalar>
class DataSet {
 public:
  DataSet() = default;
  explicit DataSet(RowMatrix<Scalar> points) : points_(std::move(points)) {
    require(points_.rows() >= 1 && points_.cols() >= 1, "data set must have u >= 1 points and n >= 1 dims");
    require(points_.allFinite(), "data set contains non-finite coordinates");
  }

  Index size() const { return points_.rows(); }
  Index dim() const { return points_.cols(); }
  const RowMatrix<Scalar>& points() const { return points_; }
  auto point(Index i) const { return points_.row(i); }

 private:
  RowMatrix<Scalar> points_;
};

/// Labeled subset of a data set: (point id, value) pairs.
template <typename Scalar>
struct LabelSet {
  std::vector<Index> indices;
  std::vector<Scalar> values;

  std::size_t size() const { return indices.size(); }
  bool empty() const { return indices.empty(); }

  void push_back(Index idx, Scalar value) {
    indices.push_back(idx);
    values.push_back(value);
  }

  /// Throws unless indices are distinct, within [0, u) and values finite.
  void validate(Index u) const {
    require(indices.size() == values.size(), "label set: index/value count mismatch");
    require(!indices.empty(), "label set is empty");
    std::vector<Index> sorted = indices;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t t = 0; t < sorted.size(); ++t) {
      if (sorted[t] < 0 || sorted[t] >= u) {
        throw Error("label index " + std::to_string(sorted[t]) + " out of range [0, " + std::to_string(u) + ")");
      }
      if (t > 0 && sorted[t] == sorted[t - 1]) {
        throw Error("duplicate label index " + std::to_string(sorted[t]));
      }
    }
    for (Scalar v : values) require(std::isfinite(v), "label set contains a non-finite value");
  }

  Scalar max_abs() const {
    Scalar m = 0;
    for (Scalar v : values) m = std::max(m, std::abs(v));
    return m;
  }
};

/// Finalized symmetric sparse matrix. Immutable after construction.
///
/// Built from unsorted coordinate triplets: duplicates are summed, the result
/// is replaced by (A + A^T)/2 and entries below 1e-14 * max|A| are dropped.
template <typename Scalar>
class SparseSymMatrix {
 public:
  using Storage = Eigen::SparseMatrix<Scalar, Eigen::ColMajor, Index>;
  using Triplet = Eigen::Triplet<Scalar, Index>;

  static constexpr Scalar kDropTolerance = Scalar(1e-14);

  SparseSymMatrix() = default;

  static SparseSymMatrix from_triplets(Index dim, const std::vector<Triplet>& triplets, bool psd = true) {
    Storage a(dim, dim);
    a.setFromTriplets(triplets.begin(), triplets.end());
    return SparseSymMatrix(std::move(a), psd);
  }

  /// Adopts `a`, symmetrizing and pruning it.
  static SparseSymMatrix from_sparse(Storage a, bool psd = true) { return SparseSymMatrix(std::move(a), psd); }

  Index dim() const { return a_.rows(); }
  Index nnz() const { return a_.nonZeros(); }
  bool psd() const { return psd_; }
  const Storage& matrix() const { return a_; }

  double sparsity() const {
    const double d = static_cast<double>(dim());
    return d == 0 ? 0.0 : static_cast<double>(nnz()) / (d * d);
  }

  Scalar max_abs() const {
    Scalar m = 0;
    for (Index k = 0; k < a_.nonZeros(); ++k) m = std::max(m, std::abs(a_.valuePtr()[k]));
    return m;
  }

  Scalar frobenius_norm() const { return a_.norm(); }

  Vector<Scalar> diagonal() const { return a_.diagonal(); }

  Matrix<Scalar> to_dense() const { return Matrix<Scalar>(a_); }

 private:
  SparseSymMatrix(Storage a, bool psd) : psd_(psd) {
    require(a.rows() == a.cols(), "symmetric matrix must be square");
    a.makeCompressed();
    Storage at = a.transpose();
    a_ = (a + at) * Scalar(0.5);
    Scalar cut = kDropTolerance * max_abs();
    a_.prune([cut](const Index&, const Index&, const Scalar& v) { return std::abs(v) > cut; });
    a_.makeCompressed();
  }

  Storage a_;
  bool psd_ = true;
};

/// Dense k x k block acting on the global ids `indices`.
template <typename Scalar>
struct LocalBlock {
  std::vector<Index> indices;
  Matrix<Scalar> block;
};

/// f^T A f.
template <typename Scalar>
Scalar quadratic_form(const SparseSymMatrix<Scalar>& a, const Vector<Scalar>& f) {
  require_dim(f.size(), a.dim(), "quadratic_form");
  return f.dot(a.matrix() * f);
}

template <typename Scalar>
Vector<Scalar> spmv(const SparseSymMatrix<Scalar>& a, const Vector<Scalar>& v) {
  require_dim(v.size(), a.dim(), "spmv");
  return a.matrix() * v;
}

/// Block symmetry tolerance used by assemble_blocks.
template <typename Scalar>
bool is_symmetric(const Matrix<Scalar>& b, Scalar rel = Scalar(1e-12)) {
  for (Index j = 0; j < b.cols(); ++j) {
    for (Index i = j + 1; i < b.rows(); ++i) {
      Scalar scale = std::max<Scalar>(1, std::max(std::abs(b(i, j)), std::abs(b(j, i))));
      if (std::abs(b(i, j) - b(j, i)) > rel * scale) return false;
    }
  }
  return true;
}

/// Sum_i P_i^T B_i P_i. Triplets are emitted in block order, so the result
/// does not depend on how the blocks were produced.
template <typename Scalar>
SparseSymMatrix<Scalar> assemble_blocks(const std::vector<LocalBlock<Scalar>>& blocks, Index dim, bool psd = true) {
  using Triplet = typename SparseSymMatrix<Scalar>::Triplet;
  std::size_t total = 0;
  for (const auto& b : blocks) {
    const auto k = static_cast<Index>(b.indices.size());
    if (b.block.rows() != k || b.block.cols() != k) {
      throw DimensionError("assemble_blocks: block size does not match its index list");
    }
    for (Index idx : b.indices) {
      if (idx < 0 || idx >= dim) {
        throw Error("assemble_blocks: index " + std::to_string(idx) + " out of range for dimension " +
                    std::to_string(dim));
      }
    }
    if (!is_symmetric(b.block)) throw Error("assemble_blocks: block is not symmetric");
    total += static_cast<std::size_t>(k * k);
  }
  std::vector<Triplet> triplets;
  triplets.reserve(total);
  for (const auto& b : blocks) {
    const auto k = static_cast<Index>(b.indices.size());
    for (Index c = 0; c < k; ++c) {
      for (Index r = 0; r < k; ++r) {
        triplets.emplace_back(b.indices[r], b.indices[c], b.block(r, c));
      }
    }
  }
  return SparseSymMatrix<Scalar>::from_triplets(dim, triplets, psd);
}

/// Runs fn(i) for i in [0, n) over `threads` workers (0 = hardware concurrency).
/// Work is split into contiguous chunks; fn must only write to slot i.
template <typename Fn>
void parallel_for(Index n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (threads <= 1 || n < 2) {
    for (Index i = 0; i < n; ++i) fn(i);
    return;
  }
  const auto workers = static_cast<Index>(std::min<Index>(threads, n));
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  pool.reserve(static_cast<std::size_t>(workers));
  for (Index w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const Index lo = n * w / workers, hi = n * (w + 1) / workers;
      try {
        for (Index i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

using DataSetd = DataSet<double>;
using LabelSetd = LabelSet<double>;
using SparseSymMatrixd = SparseSymMatrix<double>;
using LocalBlockd = LocalBlock<double>;

}  // namespace lgreg
