#pragma once

#include "lgreg/core.hpp"
#include "lgreg/methods.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace lgreg {

struct BenchRow {
  Params params;
  double build_seconds = 0;
  double solve_seconds = 0;
  Index nnz = 0;
  double sparsity = 0;  // nnz / u^2
  double objective = 0;
  std::optional<double> mae;
  std::optional<double> rmse;
  std::string error;  // non-empty when this method failed

  bool ok() const { return error.empty(); }
};

struct BenchOptions {
  bool solve = true;
  unsigned threads = 1;
  std::string export_dir;  // when set, each matrix is written there as <method>.mtx
};

/// Builds (and optionally solves with) each configuration in turn. A failing
/// configuration is reported in its row and the run continues.
std::vector<BenchRow> benchmark(const DataSetd& data, const LabelSetd& labels, const std::vector<Params>& configs,
                                const LabelSetd* truth = nullptr, const BenchOptions& opts = {});

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);
void write_bench_table(std::ostream& os, const std::vector<BenchRow>& rows);

}  // namespace lgreg
