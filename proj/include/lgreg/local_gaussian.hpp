#pragma once

// Local Gaussian (LG) regularizer.
//
// For each point X_i the neighborhood N_k(X_i) is mapped to its tangent chart,
// a Gaussian Gram matrix K is formed over the chart coordinates and the local
// energy of f restricted to the neighborhood is the RKHS norm of the kernel
// interpolant of f - f(X_i):
//
//   f_i^T G^i f_i = ((I - 11) f_i)^T K^+ ((I - 11) f_i)
//
// where 11 is the k x k matrix whose l(i)-th column is all ones. The augmented
// variant first removes the least-squares linear fit in chart coordinates,
// (G')^i = (L^i)^T K^+ L^i, so that constants and chart-linear (geodesic)
// functions are in the null space. Summing the blocks over all neighborhoods
// gives the sparse global matrix G'.
//
// The second-order polynomial Laplacian estimate (matrix B) is provided as a
// diagnostic; it is not PSD in general.

#include "lgreg/core.hpp"
#include "lgreg/neighbors.hpp"
#include "lgreg/tangent.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace lgreg {

/// Moore-Penrose pseudoinverse of a symmetric matrix. Eigenvalues at or below
/// max(k, 1) * eps * lambda_max are treated as zero.
template <typename Scalar>
Matrix<Scalar> symmetric_pseudo_inverse(const Matrix<Scalar>& a, Index* rank = nullptr) {
  const Index k = a.rows();
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(a);
  const Vector<Scalar>& ev = es.eigenvalues();
  const Scalar top = k > 0 ? std::max(std::abs(ev[0]), std::abs(ev[k - 1])) : Scalar(0);
  const Scalar cutoff = static_cast<Scalar>(std::max<Index>(k, 1)) * std::numeric_limits<Scalar>::epsilon() * top;
  Vector<Scalar> inv = Vector<Scalar>::Zero(k);
  Index r = 0;
  for (Index t = 0; t < k; ++t) {
    if (std::abs(ev[t]) > cutoff) {
      inv[t] = Scalar(1) / ev[t];
      ++r;
    }
  }
  if (rank) *rank = r;
  Matrix<Scalar> out = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  return (out + out.transpose()) * Scalar(0.5);
}

/// Pseudoinverse of a general (tall) matrix via SVD, cutoff max(rows, cols) * eps * s_max.
template <typename Scalar>
Matrix<Scalar> pseudo_inverse(const Matrix<Scalar>& a) {
  if (a.size() == 0) return Matrix<Scalar>::Zero(a.cols(), a.rows());
  Eigen::JacobiSVD<Matrix<Scalar>> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const Scalar cutoff =
      static_cast<Scalar>(std::max(a.rows(), a.cols())) * std::numeric_limits<Scalar>::epsilon() * s[0];
  Vector<Scalar> inv = Vector<Scalar>::Zero(s.size());
  for (Index t = 0; t < s.size(); ++t) {
    if (s[t] > cutoff) inv[t] = Scalar(1) / s[t];
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

template <typename Scalar>
struct KernelBlock {
  std::vector<Index> indices;  // global ids, may be empty for standalone blocks
  Matrix<Scalar> K;
  Matrix<Scalar> Kplus;
  Index rank = 0;
  Scalar sigma = 0;
};

/// Gaussian Gram matrix exp(-|x_l - x_m|^2 / sigma^2) over the rows of `coords`.
template <typename Scalar>
Matrix<Scalar> gaussian_gram(const Matrix<Scalar>& coords, Scalar sigma) {
  const Index k = coords.rows();
  const Scalar s2 = sigma * sigma;
  Matrix<Scalar> g(k, k);
  for (Index c = 0; c < k; ++c) {
    g(c, c) = 1;
    for (Index r = c + 1; r < k; ++r) {
      const Scalar v = std::exp(-(coords.row(r) - coords.row(c)).squaredNorm() / s2);
      g(r, c) = v;
      g(c, r) = v;
    }
  }
  return g;
}

template <typename Scalar>
KernelBlock<Scalar> kernel_block(const Matrix<Scalar>& coords, Scalar sigma, std::vector<Index> indices = {}) {
  if (!(sigma > 0)) throw Error("kernel_block: kernel width must be positive");
  KernelBlock<Scalar> kb;
  kb.indices = std::move(indices);
  kb.sigma = sigma;
  kb.K = gaussian_gram(coords, sigma);
  kb.Kplus = symmetric_pseudo_inverse(kb.K, &kb.rank);
  return kb;
}

template <typename Scalar>
KernelBlock<Scalar> kernel_block(const LocalChart<Scalar>& chart) {
  if (chart.degenerate || !(chart.sigma > 0)) {
    throw DegenerateNeighborhood(chart.center, "degenerate neighborhood, cannot build kernel block");
  }
  return kernel_block(chart.coords, chart.sigma, chart.indices);
}

/// k x k matrix, zero except column l which is all ones.
template <typename Scalar>
Matrix<Scalar> indicator_block(Index k, Index l) {
  if (l < 0 || l >= k) {
    throw Error("indicator_block: center position " + std::to_string(l) + " out of range for k = " + std::to_string(k));
  }
  Matrix<Scalar> m = Matrix<Scalar>::Zero(k, k);
  m.col(l).setOnes();
  return m;
}

/// I - 11: maps f to f - f_l * ones.
template <typename Scalar>
Matrix<Scalar> center_subtract(Index k, Index l) {
  return Matrix<Scalar>::Identity(k, k) - indicator_block<Scalar>(k, l);
}

/// G^i = (I - 11)^T K^+ (I - 11).
template <typename Scalar>
LocalBlock<Scalar> local_regularizer(const KernelBlock<Scalar>& kb, Index l) {
  const Matrix<Scalar> c = center_subtract<Scalar>(kb.K.rows(), l);
  Matrix<Scalar> g = c.transpose() * kb.Kplus * c;
  return {kb.indices, (g + g.transpose()) * Scalar(0.5)};
}

/// Rows are chart coordinates relative to the center point, so that the row
/// of X_i is zero and (I - 11) f lies in the column span for f linear in the chart.
template <typename Scalar>
struct DesignMatrix {
  Matrix<Scalar> phi;  // k x m
};

template <typename Scalar>
DesignMatrix<Scalar> design_matrix(const LocalChart<Scalar>& chart) {
  return {chart.centered_coords()};
}

/// L^i = (I - 11) - Phi Phi^+ (I - 11): residual after center subtraction and
/// a least-squares linear fit without intercept.
template <typename Scalar>
Matrix<Scalar> linear_residual(const DesignMatrix<Scalar>& design, Index l) {
  const Matrix<Scalar>& phi = design.phi;
  const Matrix<Scalar> c = center_subtract<Scalar>(phi.rows(), l);
  return c - phi * (pseudo_inverse(phi) * c);
}

/// (G')^i = (L^i)^T K^+ L^i.
template <typename Scalar>
LocalBlock<Scalar> local_regularizer_augmented(const KernelBlock<Scalar>& kb, const Matrix<Scalar>& li) {
  if (li.rows() != kb.K.rows() || li.cols() != kb.K.cols()) {
    throw DimensionError("local_regularizer_augmented: residual operator does not match kernel block size");
  }
  Matrix<Scalar> g = li.transpose() * kb.Kplus * li;
  return {kb.indices, (g + g.transpose()) * Scalar(0.5)};
}

struct LgOptions {
  bool augment = true;
  unsigned threads = 1;
};

/// Local block for one chart, as used by build_lg.
template <typename Scalar>
LocalBlock<Scalar> lg_block(const LocalChart<Scalar>& chart, bool augment) {
  const KernelBlock<Scalar> kb = kernel_block(chart);
  if (!augment) return local_regularizer(kb, chart.l_of_i);
  return local_regularizer_augmented(kb, linear_residual(design_matrix(chart), chart.l_of_i));
}

/// Per-point LG blocks from a precomputed neighborhood graph.
template <typename Scalar>
std::vector<LocalBlock<Scalar>> lg_blocks(const DataSet<Scalar>& data, const NeighborhoodGraph<Scalar>& g, Index m,
                                          const LgOptions& opts = {}) {
  std::vector<LocalBlock<Scalar>> blocks(static_cast<std::size_t>(data.size()));
  parallel_for(data.size(), opts.threads, [&](Index i) {
    const LocalChart<Scalar> chart = local_chart(data, g, i, m);
    if (chart.degenerate) throw DegenerateNeighborhood(i, "all neighbors coincide");
    blocks[static_cast<std::size_t>(i)] = lg_block(chart, opts.augment);
  });
  return blocks;
}

/// Global LG regularizer G' (or G when augment is off).
template <typename Scalar>
SparseSymMatrix<Scalar> build_lg(const DataSet<Scalar>& data, Index k, Index m, const LgOptions& opts = {}) {
  const Index u = data.size();
  if (k < 2 || k > u) throw Error("build_lg: k = " + std::to_string(k) + " must lie in [2, u = " + std::to_string(u) + "]");
  if (m < 1 || m > std::min(k - 1, data.dim())) {
    throw Error("build_lg: m = " + std::to_string(m) + " must lie in [1, min(k-1, n) = " +
                std::to_string(std::min(k - 1, data.dim())) + "]");
  }
  const auto g = knn_graph(data, k, KnnAlgorithm::automatic, opts.threads);
  return assemble_blocks(lg_blocks(data, g, m, opts), u);
}

// -- Second-order polynomial Laplacian estimate ------------------------------

/// Number of linear plus quadratic monomials in m variables.
inline Index quadratic_terms(Index m) { return m + m * (m + 1) / 2; }

/// Columns: x_1..x_m, then x_r x_s for r <= s, evaluated at the rows of `x`.
template <typename Scalar>
Matrix<Scalar> quadratic_design(const Matrix<Scalar>& x) {
  const Index m = x.cols();
  Matrix<Scalar> psi(x.rows(), quadratic_terms(m));
  psi.leftCols(m) = x;
  Index col = m;
  for (Index r = 0; r < m; ++r) {
    for (Index s = r; s < m; ++s) psi.col(col++) = x.col(r).cwiseProduct(x.col(s));
  }
  return psi;
}

/// Weights w with S2(X_i) = w . f_i, where S2 is the Hessian trace of the
/// least-squares quadratic h(x) = f(X_i) + a.x + x^T b x in center-relative
/// chart coordinates.
template <typename Scalar>
Vector<Scalar> laplacian_stencil(const LocalChart<Scalar>& chart) {
  const Index k = chart.k(), m = chart.m();
  const Index need = 1 + quadratic_terms(m);
  if (k < need) {
    throw Error("estimate_local_laplacian: quadratic fit in m = " + std::to_string(m) + " dims needs k >= " +
                std::to_string(need) + ", got k = " + std::to_string(k));
  }
  const Matrix<Scalar> psi_pinv = pseudo_inverse(quadratic_design(chart.centered_coords()));
  // Pure quadratic coefficients b_rr sit at offsets m, m + m, m + m + (m - 1), ...
  Vector<Scalar> pick = Vector<Scalar>::Zero(quadratic_terms(m));
  Index col = m;
  for (Index r = 0; r < m; ++r) {
    pick[col] = 2;
    col += m - r;
  }
  const Vector<Scalar> w = psi_pinv.transpose() * pick;
  return center_subtract<Scalar>(k, chart.l_of_i).transpose() * w;
}

template <typename Scalar>
Scalar estimate_local_laplacian(const LocalChart<Scalar>& chart, const Vector<Scalar>& fvals) {
  require_dim(fvals.size(), chart.k(), "estimate_local_laplacian");
  return laplacian_stencil(chart).dot(fvals);
}

/// Raw B has row i equal to the stencil of point i scattered to its
/// neighborhood, so f^T B f = sum_i f_i S2(X_i). Returns (B + B^T)/2, not flagged PSD.
template <typename Scalar>
SparseSymMatrix<Scalar> build_B(const DataSet<Scalar>& data, Index k, Index m, unsigned threads = 1) {
  const Index u = data.size();
  if (k < 2 || k > u) throw Error("build_B: k = " + std::to_string(k) + " must lie in [2, u]");
  const auto g = knn_graph(data, k, KnnAlgorithm::automatic, threads);
  std::vector<Vector<Scalar>> rows(static_cast<std::size_t>(u));
  parallel_for(u, threads, [&](Index i) {
    const LocalChart<Scalar> chart = local_chart(data, g, i, m);
    if (chart.degenerate) throw DegenerateNeighborhood(i, "all neighbors coincide");
    rows[static_cast<std::size_t>(i)] = laplacian_stencil(chart);
  });
  using Triplet = typename SparseSymMatrix<Scalar>::Triplet;
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(u * k));
  for (Index i = 0; i < u; ++i) {
    const auto& list = g.lists[static_cast<std::size_t>(i)];
    const auto& w = rows[static_cast<std::size_t>(i)];
    for (Index t = 0; t < k; ++t) triplets.emplace_back(i, list[static_cast<std::size_t>(t)], w[t]);
  }
  return SparseSymMatrix<Scalar>::from_triplets(u, triplets, false);
}

using KernelBlockd = KernelBlock<double>;

}  // namespace lgreg
