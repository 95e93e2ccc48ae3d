#pragma once

// k-fold cross-validation over hyper-parameter grids. Only the labeled points
// are split into folds; every fold trains on the full point cloud.

#include "lgreg/core.hpp"
#include "lgreg/methods.hpp"
#include "lgreg/toy.hpp"

#include <cstdint>
#include <ostream>
#include <vector>

namespace lgreg {

struct ParamGrid {
  Method method = Method::lg;
  std::vector<Index> k_values;
  std::vector<Index> m_values;
  std::vector<double> lambda_values;
  std::vector<double> b_values;
  std::vector<int> p_values;
  bool augment = true;

  /// k in 20..40, m in 10..17, lambda log-spaced over 1e-8..1e-5, b in 5..300, p in 1..4.
  static ParamGrid defaults(Method method);

  /// All parameter combinations relevant to `method`, in enumeration order.
  std::vector<Params> expand() const;
};

struct CvRow {
  Params params;
  int fold = 0;
  double mae = 0;  // +inf when the fold's solve failed
};

struct CvSummary {
  Params params;
  double mean_mae = 0;
  double var_mae = 0;  // across folds
};

struct CvResult {
  Params best;
  double best_score = 0;
  std::vector<CvSummary> summary;  // one per grid point, enumeration order
  std::vector<CvRow> table;        // one per grid point and fold
};

struct CvOptions {
  int folds = 5;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 1;
};

/// Fold id per label position: seeded shuffle, then round-robin assignment.
std::vector<int> assign_folds(std::size_t labels, int folds, std::uint64_t seed);

CvResult cross_validate(const DataSetd& data, const LabelSetd& labels, const ParamGrid& grid,
                        const CvOptions& opts = {});

/// Columns: method,k,m,lambda,b,p,fold,mae (parameters unused by the method are left empty).
void write_cv_csv(std::ostream& os, const std::vector<CvRow>& table);

}  // namespace lgreg
