#pragma once

#include "lgreg/core.hpp"
#include "lgreg/laplacian.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace lgreg {

/// min_f sum_labeled (Y_i - f_i)^2 + lambda f^T R f over f in R^u.
template <typename Scalar>
struct TransductiveProblem {
  const SparseSymMatrix<Scalar>& regularizer;
  LabelSet<Scalar> labels;
  Scalar lambda;
  // Adds 1e-12 * trace(R) / u to the diagonal. Off unless requested.
  bool ridge = false;
};

template <typename Scalar>
struct TransductiveSolution {
  Vector<Scalar> f;
  Scalar residual_norm = 0;  // ||(J + lambda R) f - J y|| / ||J y||
  Index iterations = 0;      // 0 for the direct solver
  Scalar objective = 0;
  bool converged = true;
};

class SingularSystem : public Error {
 public:
  using Error::Error;
};

/// Diagonal 0/1 indicator of labeled points and the right-hand side J y.
template <typename Scalar>
void labeled_system(const LabelSet<Scalar>& labels, Index u, Vector<Scalar>& mask, Vector<Scalar>& rhs) {
  labels.validate(u);
  mask = Vector<Scalar>::Zero(u);
  rhs = Vector<Scalar>::Zero(u);
  for (std::size_t t = 0; t < labels.size(); ++t) {
    mask[labels.indices[t]] = 1;
    rhs[labels.indices[t]] = labels.values[t];
  }
}

template <typename Scalar>
Scalar data_fit(const LabelSet<Scalar>& labels, const Vector<Scalar>& f) {
  Scalar s = 0;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    const Scalar r = labels.values[t] - f[labels.indices[t]];
    s += r * r;
  }
  return s;
}

template <typename Scalar>
Scalar objective(const SparseSymMatrix<Scalar>& r, const LabelSet<Scalar>& labels, Scalar lambda, const Vector<Scalar>& f) {
  return data_fit(labels, f) + lambda * quadratic_form(r, f);
}

template <typename Scalar>
Scalar ridge_shift(const SparseSymMatrix<Scalar>& r) {
  return Scalar(1e-12) * r.matrix().diagonal().sum() / static_cast<Scalar>(r.dim());
}

/// Sparse LDL^T factorization of J + lambda R for a fixed labeled set; reusable
/// across several label-value vectors on the same index set.
template <typename Scalar>
class RegularizedFactorization {
 public:
  using Storage = typename SparseSymMatrix<Scalar>::Storage;

  RegularizedFactorization(const SparseSymMatrix<Scalar>& r, const std::vector<Index>& labeled, Scalar lambda,
                           bool ridge = false)
      : r_(&r), lambda_(lambda) {
    if (!(lambda > 0)) throw Error("solver: lambda must be positive");
    const Index u = r.dim();
    system_ = r.matrix() * lambda;
    Vector<Scalar> diag = Vector<Scalar>::Zero(u);
    for (Index i : labeled) {
      if (i < 0 || i >= u) throw Error("solver: label index " + std::to_string(i) + " out of range");
      diag[i] = 1;
    }
    if (ridge) diag.array() += ridge_shift(r);
    Storage d(u, u);
    d.reserve(Eigen::VectorXi::Constant(u, 1));
    for (Index i = 0; i < u; ++i) d.insert(i, i) = diag[i];
    system_ += d;
    system_.makeCompressed();

    ldlt_.compute(system_);
    if (ldlt_.info() != Eigen::Success) throw SingularSystem("solver: factorization of J + lambda R failed");
    const Vector<Scalar> pivots = ldlt_.vectorD();
    const Scalar top = pivots.cwiseAbs().maxCoeff();
    const Scalar tol = static_cast<Scalar>(u) * std::numeric_limits<Scalar>::epsilon() * top;
    for (Index t = 0; t < u; ++t) {
      if (!(pivots[t] > tol)) {
        const Index point = ldlt_.permutationPinv().indices()[t];
        throw SingularSystem("solver: J + lambda R is singular near point " + std::to_string(point) +
                             " (unlabeled points span part of the regularizer null space; add labels or enable ridge)");
      }
    }
  }

  TransductiveSolution<Scalar> solve(const LabelSet<Scalar>& labels) const {
    Vector<Scalar> mask, rhs;
    labeled_system(labels, system_.rows(), mask, rhs);
    TransductiveSolution<Scalar> sol;
    sol.f = ldlt_.solve(rhs);
    const Scalar scale = rhs.norm() > 0 ? rhs.norm() : Scalar(1);
    sol.residual_norm = (system_ * sol.f - rhs).norm() / scale;
    sol.objective = objective(*r_, labels, lambda_, sol.f);
    if (!sol.f.allFinite()) throw SingularSystem("solver: solution is not finite");
    return sol;
  }

  const Storage& system() const { return system_; }

 private:
  const SparseSymMatrix<Scalar>* r_;
  Scalar lambda_;
  Storage system_;
  Eigen::SimplicialLDLT<Storage> ldlt_;
};

/// f = (J + lambda R)^{-1} J y by sparse factorization.
template <typename Scalar>
TransductiveSolution<Scalar> solve_direct(const TransductiveProblem<Scalar>& p) {
  p.labels.validate(p.regularizer.dim());
  return RegularizedFactorization<Scalar>(p.regularizer, p.labels.indices, p.lambda, p.ridge).solve(p.labels);
}

struct CgOptions {
  double tol = 1e-10;  // on ||r|| / ||b||
  Index max_iterations = 0;  // 0 -> 10 u
};

template <typename Scalar>
struct CgResult {
  Vector<Scalar> x;
  Scalar relative_residual = 0;
  Index iterations = 0;
  bool converged = false;
};

/// Jacobi-preconditioned conjugate gradient for an SPD operator given as a
/// callable v -> A v. `diagonal` must be positive; pass ones for no preconditioning.
/// On hitting the iteration limit the best iterate seen is returned, unconverged.
template <typename Scalar, typename Apply>
CgResult<Scalar> conjugate_gradient(Apply&& apply, const Vector<Scalar>& b, const Vector<Scalar>& diagonal,
                                    const CgOptions& opts = {}) {
  const Index u = b.size();
  require_dim(diagonal.size(), u, "conjugate_gradient diagonal");
  if (!(opts.tol > 0)) throw Error("conjugate_gradient: tolerance must be positive");
  const Index max_it = opts.max_iterations > 0 ? opts.max_iterations : 10 * std::max<Index>(u, 1);
  const Vector<Scalar> inv_diag =
      diagonal.unaryExpr([](Scalar d) { return d > 0 ? Scalar(1) / d : Scalar(1); });

  CgResult<Scalar> res;
  res.x = Vector<Scalar>::Zero(u);
  const Scalar bnorm = b.norm();
  if (bnorm == 0) {
    res.converged = true;
    return res;
  }
  const Scalar tol = static_cast<Scalar>(opts.tol);
  Vector<Scalar> r = b;
  Vector<Scalar> z = inv_diag.cwiseProduct(r);
  Vector<Scalar> p = z;
  Scalar rz = r.dot(z);
  Vector<Scalar> best = res.x;
  Scalar best_res = Scalar(1);

  for (Index it = 1; it <= max_it; ++it) {
    const Vector<Scalar> ap = apply(p);
    const Scalar pap = p.dot(ap);
    if (!(pap > 0)) break;  // operator not positive definite along p
    const Scalar alpha = rz / pap;
    res.x += alpha * p;
    r -= alpha * ap;
    res.iterations = it;
    const Scalar rel = r.norm() / bnorm;
    if (rel < best_res) {
      best_res = rel;
      best = res.x;
    }
    if (rel <= tol) {
      // Confirm with a true residual, the recurrence drifts on ill-conditioned systems.
      r = b - apply(res.x);
      const Scalar true_rel = r.norm() / bnorm;
      if (true_rel <= tol) {
        res.relative_residual = true_rel;
        res.converged = true;
        return res;
      }
    }
    const Vector<Scalar> znew = inv_diag.cwiseProduct(r);
    const Scalar rz_new = r.dot(znew);
    p = znew + (rz_new / rz) * p;
    rz = rz_new;
  }
  res.x = best;
  res.relative_residual = (b - apply(best)).norm() / bnorm;
  res.converged = res.relative_residual <= tol;
  return res;
}

template <typename Scalar>
TransductiveSolution<Scalar> to_solution(CgResult<Scalar>&& cg, Scalar objective_value) {
  TransductiveSolution<Scalar> sol;
  sol.f = std::move(cg.x);
  sol.residual_norm = cg.relative_residual;
  sol.iterations = cg.iterations;
  sol.converged = cg.converged;
  sol.objective = objective_value;
  return sol;
}

/// CG on J + lambda R with an explicit regularizer matrix.
template <typename Scalar>
TransductiveSolution<Scalar> solve_cg(const TransductiveProblem<Scalar>& p, const CgOptions& opts = {}) {
  const Index u = p.regularizer.dim();
  Vector<Scalar> mask, rhs;
  labeled_system(p.labels, u, mask, rhs);
  const Scalar shift = p.ridge ? ridge_shift(p.regularizer) : Scalar(0);
  const auto& r = p.regularizer.matrix();
  auto apply = [&](const Vector<Scalar>& v) -> Vector<Scalar> {
    return mask.cwiseProduct(v) + p.lambda * (r * v) + shift * v;
  };
  const Vector<Scalar> diag = mask + p.lambda * p.regularizer.diagonal() + Vector<Scalar>::Constant(u, shift);
  auto cg = conjugate_gradient<Scalar>(apply, rhs, diag, opts);
  const Scalar obj = objective(p.regularizer, p.labels, p.lambda, cg.x);
  return to_solution(std::move(cg), obj);
}

/// CG on J + lambda L^p with L^p applied as p sparse products. The Jacobi
/// preconditioner uses diag(L)^p in place of the unavailable diag(L^p).
template <typename Scalar>
TransductiveSolution<Scalar> solve_cg_iterated(const SparseSymMatrix<Scalar>& l, int power,
                                               const LabelSet<Scalar>& labels, Scalar lambda,
                                               const CgOptions& opts = {}) {
  if (!(lambda > 0)) throw Error("solver: lambda must be positive");
  if (power < 1) throw Error("solver: power must be >= 1");
  const Index u = l.dim();
  Vector<Scalar> mask, rhs;
  labeled_system(labels, u, mask, rhs);
  auto apply = [&](const Vector<Scalar>& v) -> Vector<Scalar> {
    return mask.cwiseProduct(v) + lambda * iterated_apply(l, power, v);
  };
  const Vector<Scalar> diag = mask + lambda * l.diagonal().array().pow(power).matrix();
  auto cg = conjugate_gradient<Scalar>(apply, rhs, diag, opts);
  const Scalar obj = data_fit(labels, cg.x) + lambda * cg.x.dot(iterated_apply(l, power, cg.x));
  return to_solution(std::move(cg), obj);
}

struct ErrorMetrics {
  double mean_abs_error = 0;
  double mean_l2_error = 0;  // root mean square
};

/// Error of f against ground-truth values over the truth index set.
template <typename Scalar>
ErrorMetrics metrics(const Vector<Scalar>& f, const LabelSet<Scalar>& truth) {
  if (truth.empty()) throw Error("metrics: empty ground-truth set");
  ErrorMetrics m;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    const Index i = truth.indices[t];
    if (i < 0 || i >= f.size()) throw Error("metrics: truth index " + std::to_string(i) + " out of range");
    const double d = static_cast<double>(f[i] - truth.values[t]);
    m.mean_abs_error += std::abs(d);
    m.mean_l2_error += d * d;
  }
  const auto n = static_cast<double>(truth.size());
  m.mean_abs_error /= n;
  m.mean_l2_error = std::sqrt(m.mean_l2_error / n);
  return m;
}

using TransductiveSolutiond = TransductiveSolution<double>;

}  // namespace lgreg
