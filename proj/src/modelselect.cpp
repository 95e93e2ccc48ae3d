#include "lgreg/modelselect.hpp"

#include "lgreg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <tuple>

namespace lgreg {
namespace {

std::vector<double> log_space(double lo, double hi, int n) {
  std::vector<double> out;
  for (int t = 0; t < n; ++t) out.push_back(std::pow(10.0, std::log10(lo) + (std::log10(hi) - std::log10(lo)) * t / (n - 1)));
  return out;
}

// Regularizer identity: everything except lambda.
auto structure_key(const Params& p) {
  return std::make_tuple(p.k, uses_m(p.method) ? p.m : Index{0}, uses_b(p.method) ? p.b : 0.0,
                         uses_p(p.method) ? p.p : 0);
}

// Ordering used to pick the winner: score, then smaller k, lambda, m, b, p.
auto selection_key(const CvSummary& s) {
  const Params& p = s.params;
  return std::make_tuple(s.mean_mae, p.k, p.lambda, uses_m(p.method) ? p.m : Index{0}, uses_b(p.method) ? p.b : 0.0,
                         uses_p(p.method) ? p.p : 0);
}

}  // namespace

ParamGrid ParamGrid::defaults(Method method) {
  ParamGrid g;
  g.method = method;
  g.k_values = {20, 30, 40};
  g.m_values = method == Method::lg ? std::vector<Index>{10, 13, 17} : std::vector<Index>{};
  g.lambda_values = log_space(1e-8, 1e-5, 4);
  g.b_values = method == Method::lg ? std::vector<double>{} : std::vector<double>{5, 50, 300};
  g.p_values = method == Method::ilap ? std::vector<int>{1, 2, 3, 4} : std::vector<int>{};
  return g;
}

std::vector<Params> ParamGrid::expand() const {
  const std::vector<Index> ms = uses_m(method) ? m_values : std::vector<Index>{0};
  const std::vector<double> bs = uses_b(method) ? b_values : std::vector<double>{0.0};
  const std::vector<int> ps = uses_p(method) ? p_values : std::vector<int>{0};
  std::vector<Params> out;
  for (Index k : k_values) {
    for (Index m : ms) {
      for (double b : bs) {
        for (int p : ps) {
          for (double lambda : lambda_values) {
            Params prm;
            prm.method = method;
            prm.k = k;
            prm.m = m;
            prm.b = b;
            prm.p = p;
            prm.lambda = lambda;
            prm.augment = augment;
            out.push_back(prm);
          }
        }
      }
    }
  }
  return out;
}

std::vector<int> assign_folds(std::size_t labels, int folds, std::uint64_t seed) {
  std::vector<std::size_t> order(labels);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> fold(labels);
  for (std::size_t t = 0; t < labels; ++t) fold[order[t]] = static_cast<int>(t % static_cast<std::size_t>(folds));
  return fold;
}

CvResult cross_validate(const DataSetd& data, const LabelSetd& labels, const ParamGrid& grid, const CvOptions& opts) {
  const Index u = data.size();
  labels.validate(u);
  if (opts.folds < 2) throw Error("cross_validate: need at least 2 folds");
  if (labels.size() < static_cast<std::size_t>(opts.folds)) {
    throw Error("cross_validate: " + std::to_string(labels.size()) + " labels is fewer than " +
                std::to_string(opts.folds) + " folds");
  }
  const std::vector<Params> points = grid.expand();
  if (points.empty()) throw Error("cross_validate: empty parameter grid");

  const std::vector<int> fold_of = assign_folds(labels.size(), opts.folds, opts.seed);
  std::vector<LabelSetd> train(static_cast<std::size_t>(opts.folds)), held(static_cast<std::size_t>(opts.folds));
  for (std::size_t t = 0; t < labels.size(); ++t) {
    for (int f = 0; f < opts.folds; ++f) {
      (fold_of[t] == f ? held : train)[static_cast<std::size_t>(f)].push_back(labels.indices[t], labels.values[t]);
    }
  }

  CvResult result;
  result.summary.resize(points.size());
  std::vector<std::vector<double>> scores(points.size(), std::vector<double>(static_cast<std::size_t>(opts.folds)));

  // Group grid points sharing a regularizer so that each matrix is built once.
  std::map<decltype(structure_key(points[0])), std::vector<std::size_t>> groups;
  std::vector<decltype(structure_key(points[0]))> group_order;
  for (std::size_t g = 0; g < points.size(); ++g) {
    auto key = structure_key(points[g]);
    if (groups.find(key) == groups.end()) group_order.push_back(key);
    groups[key].push_back(g);
  }

  for (const auto& key : group_order) {
    const auto& members = groups[key];
    SparseSymMatrixd reg;
    bool built = true;
    try {
      reg = build_regularizer(data, points[members.front()], opts.threads);
    } catch (const Error&) {
      built = false;
    }
    if (built && reg.dim() != u) throw Error("cross_validate: regularizer dimension does not match the data set");
    for (std::size_t g : members) {
      for (int f = 0; f < opts.folds; ++f) {
        double mae = std::numeric_limits<double>::infinity();
        if (built) {
          try {
            const auto& tr = train[static_cast<std::size_t>(f)];
            const auto sol = RegularizedFactorization<double>(reg, tr.indices, points[g].lambda).solve(tr);
            mae = metrics(sol.f, held[static_cast<std::size_t>(f)]).mean_abs_error;
          } catch (const Error&) {
          }
        }
        scores[g][static_cast<std::size_t>(f)] = mae;
      }
    }
  }

  for (std::size_t g = 0; g < points.size(); ++g) {
    CvSummary& s = result.summary[g];
    s.params = points[g];
    const auto& sc = scores[g];
    s.mean_mae = std::accumulate(sc.begin(), sc.end(), 0.0) / static_cast<double>(sc.size());
    double var = 0;
    for (double v : sc) var += (v - s.mean_mae) * (v - s.mean_mae);
    s.var_mae = std::isfinite(s.mean_mae) ? var / static_cast<double>(sc.size()) : std::numeric_limits<double>::infinity();
    for (int f = 0; f < opts.folds; ++f) result.table.push_back({points[g], f, sc[static_cast<std::size_t>(f)]});
  }
  const auto best = std::min_element(result.summary.begin(), result.summary.end(),
                                     [](const CvSummary& a, const CvSummary& b) { return selection_key(a) < selection_key(b); });
  result.best = best->params;
  result.best_score = best->mean_mae;
  return result;
}

void write_cv_csv(std::ostream& os, const std::vector<CvRow>& table) {
  os << "method,k,m,lambda,b,p,fold,mae\n" << std::setprecision(17);
  for (const auto& row : table) {
    const Params& p = row.params;
    os << to_string(p.method) << ',' << p.k << ',';
    if (uses_m(p.method)) os << p.m;
    os << ',' << p.lambda << ',';
    if (uses_b(p.method)) os << p.b;
    os << ',';
    if (uses_p(p.method)) os << p.p;
    os << ',' << row.fold << ',' << row.mae << '\n';
  }
}

}  // namespace lgreg
