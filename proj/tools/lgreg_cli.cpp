// lgreg: build manifold regularizers and solve transductive regression problems.
//
//   lgreg toy   --u 10000 --points pts.csv --labels labels.csv
//   lgreg build --points pts.csv --method lg --k 20 --m 2 --out G.mtx
//   lgreg solve --points pts.csv --labels labels.csv --method lg --lambda 1e-6 --out f.csv
//   lgreg cv    --points pts.csv --labels labels.csv --method lap --out cv.csv
//   lgreg bench --points pts.csv --labels labels.csv --methods lap,lg,ilap --csv bench.csv

#include "lgreg/bench.hpp"
#include "lgreg/io.hpp"
#include "lgreg/laplacian.hpp"
#include "lgreg/matrix_market.hpp"
#include "lgreg/methods.hpp"
#include "lgreg/modelselect.hpp"
#include "lgreg/solver.hpp"
#include "lgreg/toy.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

using namespace lgreg;

struct RunConfig {
  std::string points, labels, truth, out, csv, export_dir;
  std::string method = "lg";
  std::string methods = "lap,lg,ilap";
  std::string solver = "direct";
  Params params;
  bool no_augment = false;
  Index toy_u = 10000;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 1;
  double tol = 1e-10;
  Index max_iterations = 0;
  int folds = 5;
  std::vector<Index> k_values, m_values;
  std::vector<double> lambda_values, b_values;
  std::vector<int> p_values;
};

void check_input(const std::string& path, const char* what) {
  if (path.empty()) throw Error(std::string("missing --") + what);
  if (!std::filesystem::is_regular_file(path)) throw Error(std::string("--") + what + ": no such file: " + path);
}

void check_output(const std::string& path, const char* what) {
  if (path.empty()) return;
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent)) {
    throw Error(std::string("--") + what + ": directory does not exist: " + parent.string());
  }
}

Params resolved_params(const RunConfig& cfg, Method method) {
  Params p = cfg.params;
  p.method = method;
  p.augment = !cfg.no_augment;
  return p;
}

void add_param_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--k", cfg.params.k, "neighbors per point, including the point itself")->capture_default_str();
  cmd->add_option("--m", cfg.params.m, "intrinsic dimension (lg)")->capture_default_str();
  cmd->add_option("--b", cfg.params.b, "Gaussian edge width (lap, ilap)")->capture_default_str();
  cmd->add_option("--p", cfg.params.p, "Laplacian power (ilap)")->capture_default_str();
  cmd->add_flag("--no-augment", cfg.no_augment, "lg without the linear null-space augmentation");
}

int run_toy(const RunConfig& cfg) {
  check_output(cfg.points, "points");
  check_output(cfg.labels, "labels");
  if (cfg.points.empty() || cfg.labels.empty()) throw Error("toy requires --points and --labels");
  const auto toy = toy_generate(cfg.toy_u, cfg.seed);
  save_points_csv(cfg.points, toy.data);
  save_labels_csv(cfg.labels, toy.labels);
  return 0;
}

int run_build(const RunConfig& cfg) {
  check_input(cfg.points, "points");
  if (cfg.out.empty()) throw Error("build requires --out");
  check_output(cfg.out, "out");
  const auto data = load_points_csv(cfg.points);
  const auto reg = build_regularizer(data, resolved_params(cfg, parse_method(cfg.method)), cfg.threads);
  save_matrix_market(cfg.out, reg);
  std::cout << cfg.method << ": u=" << reg.dim() << " nnz=" << reg.nnz() << " sparsity=" << reg.sparsity() << '\n';
  return 0;
}

int run_solve(const RunConfig& cfg) {
  check_input(cfg.points, "points");
  check_input(cfg.labels, "labels");
  if (!cfg.truth.empty()) check_input(cfg.truth, "truth");
  check_output(cfg.out, "out");
  const auto data = load_points_csv(cfg.points);
  const auto labels = load_labels_csv(cfg.labels, data.size());
  const Params params = resolved_params(cfg, parse_method(cfg.method));
  const CgOptions cg{cfg.tol, cfg.max_iterations};

  TransductiveSolutiond sol;
  if (cfg.solver == "cg" && params.method == Method::ilap) {
    // Operator form: L^p is never materialized.
    const auto l = build_knn_laplacian(data, params.k, params.b, cfg.threads);
    sol = solve_cg_iterated(l, params.p, labels, params.lambda, cg);
  } else {
    const auto reg = build_regularizer(data, params, cfg.threads);
    const TransductiveProblem<double> problem{reg, labels, params.lambda};
    if (cfg.solver == "cg") {
      sol = solve_cg(problem, cg);
    } else if (cfg.solver == "direct") {
      sol = solve_direct(problem);
    } else {
      throw Error("unknown --solver '" + cfg.solver + "' (expected direct or cg)");
    }
  }
  if (!sol.converged) std::cerr << "warning: CG did not converge, returning best iterate\n";
  if (cfg.out.empty()) {
    write_predictions_csv(std::cout, sol.f);
  } else {
    save_predictions_csv(cfg.out, sol.f);
  }
  std::cerr << std::setprecision(17) << "objective=" << sol.objective << " residual=" << sol.residual_norm
            << " iterations=" << sol.iterations << '\n';
  if (!cfg.truth.empty()) {
    const auto m = metrics(sol.f, load_labels_csv(cfg.truth, data.size()));
    std::cerr << "mae=" << m.mean_abs_error << " rmse=" << m.mean_l2_error << '\n';
  }
  return 0;
}

int run_cv(const RunConfig& cfg) {
  check_input(cfg.points, "points");
  check_input(cfg.labels, "labels");
  check_output(cfg.out, "out");
  const auto data = load_points_csv(cfg.points);
  const auto labels = load_labels_csv(cfg.labels, data.size());
  ParamGrid grid = ParamGrid::defaults(parse_method(cfg.method));
  grid.augment = !cfg.no_augment;
  if (!cfg.k_values.empty()) grid.k_values = cfg.k_values;
  if (!cfg.m_values.empty()) grid.m_values = cfg.m_values;
  if (!cfg.lambda_values.empty()) grid.lambda_values = cfg.lambda_values;
  if (!cfg.b_values.empty()) grid.b_values = cfg.b_values;
  if (!cfg.p_values.empty()) grid.p_values = cfg.p_values;
  const auto res = cross_validate(data, labels, grid, CvOptions{cfg.folds, cfg.seed, cfg.threads});
  if (cfg.out.empty()) {
    write_cv_csv(std::cout, res.table);
  } else {
    std::ofstream os(cfg.out);
    if (!os) throw Error("cannot open " + cfg.out + " for writing");
    write_cv_csv(os, res.table);
  }
  const Params& b = res.best;
  std::cerr << std::setprecision(17) << "best: method=" << to_string(b.method) << " k=" << b.k;
  if (uses_m(b.method)) std::cerr << " m=" << b.m;
  if (uses_b(b.method)) std::cerr << " b=" << b.b;
  if (uses_p(b.method)) std::cerr << " p=" << b.p;
  std::cerr << " lambda=" << b.lambda << " mae=" << res.best_score << '\n';
  return 0;
}

int run_bench(const RunConfig& cfg) {
  check_input(cfg.points, "points");
  check_input(cfg.labels, "labels");
  if (!cfg.truth.empty()) check_input(cfg.truth, "truth");
  check_output(cfg.csv, "csv");
  if (!cfg.export_dir.empty() && !std::filesystem::is_directory(cfg.export_dir)) {
    throw Error("--export-dir: directory does not exist: " + cfg.export_dir);
  }
  const auto data = load_points_csv(cfg.points);
  const auto labels = load_labels_csv(cfg.labels, data.size());
  std::optional<LabelSetd> truth;
  if (!cfg.truth.empty()) truth = load_labels_csv(cfg.truth, data.size());

  std::vector<Params> configs;
  std::stringstream ss(cfg.methods);
  for (std::string name; std::getline(ss, name, ',');) configs.push_back(resolved_params(cfg, parse_method(name)));

  BenchOptions opts;
  opts.threads = cfg.threads;
  opts.export_dir = cfg.export_dir;
  const auto rows = benchmark(data, labels, configs, truth ? &*truth : nullptr, opts);
  write_bench_table(std::cout, rows);
  if (!cfg.csv.empty()) {
    std::ofstream os(cfg.csv);
    if (!os) throw Error("cannot open " + cfg.csv + " for writing");
    write_bench_csv(os, rows);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse manifold regularization for transductive regression"};
  app.require_subcommand(1);
  RunConfig cfg;
  app.add_option("--threads", cfg.threads, "worker threads for regularizer construction")->capture_default_str();

  auto* toy = app.add_subcommand("toy", "generate the [-1,1]^2 toy problem");
  toy->add_option("--u", cfg.toy_u, "number of points (>= 5)")->capture_default_str();
  toy->add_option("--seed", cfg.seed)->capture_default_str();
  toy->add_option("--points", cfg.points, "output points CSV")->required();
  toy->add_option("--labels", cfg.labels, "output labels CSV")->required();

  auto* build = app.add_subcommand("build", "build a regularization matrix and write it as Matrix Market");
  build->add_option("--points", cfg.points)->required();
  build->add_option("--method", cfg.method, "lap, ilap or lg")->capture_default_str();
  build->add_option("--out", cfg.out, "output .mtx file")->required();
  add_param_flags(build, cfg);

  auto* solve = app.add_subcommand("solve", "solve for f on all points");
  solve->add_option("--points", cfg.points)->required();
  solve->add_option("--labels", cfg.labels)->required();
  solve->add_option("--truth", cfg.truth, "ground-truth 'index,value' CSV for error metrics");
  solve->add_option("--method", cfg.method)->capture_default_str();
  solve->add_option("--lambda", cfg.params.lambda)->capture_default_str();
  solve->add_option("--solver", cfg.solver, "direct or cg")->capture_default_str();
  solve->add_option("--tol", cfg.tol, "CG relative residual tolerance")->capture_default_str();
  solve->add_option("--max-iter", cfg.max_iterations, "CG iteration limit (0: 10u)")->capture_default_str();
  solve->add_option("--out", cfg.out, "predictions CSV (default stdout)");
  add_param_flags(solve, cfg);

  auto* cv = app.add_subcommand("cv", "k-fold cross-validation over a parameter grid");
  cv->add_option("--points", cfg.points)->required();
  cv->add_option("--labels", cfg.labels)->required();
  cv->add_option("--method", cfg.method)->capture_default_str();
  cv->add_option("--folds", cfg.folds)->capture_default_str();
  cv->add_option("--seed", cfg.seed)->capture_default_str();
  cv->add_option("--k-values", cfg.k_values)->delimiter(',');
  cv->add_option("--m-values", cfg.m_values)->delimiter(',');
  cv->add_option("--lambda-values", cfg.lambda_values)->delimiter(',');
  cv->add_option("--b-values", cfg.b_values)->delimiter(',');
  cv->add_option("--p-values", cfg.p_values)->delimiter(',');
  cv->add_flag("--no-augment", cfg.no_augment);
  cv->add_option("--out", cfg.out, "CV table CSV (default stdout)");

  auto* bench = app.add_subcommand("bench", "build/solve timing and sparsity per method");
  bench->add_option("--points", cfg.points)->required();
  bench->add_option("--labels", cfg.labels)->required();
  bench->add_option("--truth", cfg.truth);
  bench->add_option("--methods", cfg.methods, "comma-separated list")->capture_default_str();
  bench->add_option("--lambda", cfg.params.lambda)->capture_default_str();
  bench->add_option("--csv", cfg.csv, "report CSV");
  bench->add_option("--export-dir", cfg.export_dir, "write each matrix as <method>.mtx");
  add_param_flags(bench, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*toy) return run_toy(cfg);
    if (*build) return run_build(cfg);
    if (*solve) return run_solve(cfg);
    if (*cv) return run_cv(cfg);
    if (*bench) return run_bench(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
