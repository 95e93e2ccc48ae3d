#include "lgreg/bench.hpp"

#include "lgreg/matrix_market.hpp"
#include "lgreg/solver.hpp"

#include <chrono>
#include <cstdio>
#include <iomanip>
#include <sstream>

namespace lgreg {
namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string params_label(const Params& p) {
  std::ostringstream os;
  os << "k=" << p.k;
  if (uses_m(p.method)) os << " m=" << p.m;
  if (uses_b(p.method)) os << " b=" << p.b;
  if (uses_p(p.method)) os << " p=" << p.p;
  os << " lambda=" << p.lambda;
  return os.str();
}

}  // namespace

std::vector<BenchRow> benchmark(const DataSetd& data, const LabelSetd& labels, const std::vector<Params>& configs,
                                const LabelSetd* truth, const BenchOptions& opts) {
  std::vector<BenchRow> rows;
  for (const Params& cfg : configs) {
    BenchRow row;
    row.params = cfg;
    try {
      auto t0 = std::chrono::steady_clock::now();
      const SparseSymMatrixd reg = build_regularizer(data, cfg, opts.threads);
      row.build_seconds = seconds_since(t0);
      row.nnz = reg.nnz();
      row.sparsity = reg.sparsity();
      if (!opts.export_dir.empty()) save_matrix_market(opts.export_dir + "/" + to_string(cfg.method) + ".mtx", reg);
      if (opts.solve) {
        t0 = std::chrono::steady_clock::now();
        const auto sol = solve_direct(TransductiveProblem<double>{reg, labels, cfg.lambda});
        row.solve_seconds = seconds_since(t0);
        row.objective = sol.objective;
        if (truth) {
          const auto m = metrics(sol.f, *truth);
          row.mae = m.mean_abs_error;
          row.rmse = m.mean_l2_error;
        }
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "method,k,m,lambda,b,p,build_s,solve_s,nnz,sparsity,objective,mae,rmse,error\n" << std::setprecision(17);
  for (const auto& r : rows) {
    const Params& p = r.params;
    os << to_string(p.method) << ',' << p.k << ',';
    if (uses_m(p.method)) os << p.m;
    os << ',' << p.lambda << ',';
    if (uses_b(p.method)) os << p.b;
    os << ',';
    if (uses_p(p.method)) os << p.p;
    os << ',' << r.build_seconds << ',' << r.solve_seconds << ',' << r.nnz << ',' << r.sparsity << ',' << r.objective
       << ',';
    if (r.mae) os << *r.mae;
    os << ',';
    if (r.rmse) os << *r.rmse;
    os << ',';
    // Errors are free text; keep the CSV single-line and comma-free.
    for (char ch : r.error) os << (ch == ',' || ch == '\n' ? ';' : ch);
    os << '\n';
  }
}

void write_bench_table(std::ostream& os, const std::vector<BenchRow>& rows) {
  char line[256];
  std::snprintf(line, sizeof line, "%-6s %-34s %9s %9s %10s %10s %12s %10s\n", "method", "params", "build[s]", "solve[s]",
                "nnz", "sparsity", "objective", "mae");
  os << line;
  for (const auto& r : rows) {
    const std::string label = params_label(r.params);
    if (!r.ok()) {
      std::snprintf(line, sizeof line, "%-6s %-34s FAILED: ", to_string(r.params.method).c_str(), label.c_str());
      os << line << r.error << '\n';
      continue;
    }
    std::snprintf(line, sizeof line, "%-6s %-34s %9.3f %9.3f %10lld %10.6f %12.5g %10s\n",
                  to_string(r.params.method).c_str(), label.c_str(), r.build_seconds, r.solve_seconds,
                  static_cast<long long>(r.nnz), r.sparsity, r.objective,
                  r.mae ? std::to_string(*r.mae).c_str() : "-");
    os << line;
  }
}

}  // namespace lgreg
