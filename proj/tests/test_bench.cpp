#include "doctest.h"
#include "test_util.hpp"

#include "lgreg/bench.hpp"
#include "lgreg/toy.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lgreg;
using namespace lgreg::testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lgreg_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Counts stored entries of a symmetric coordinate file, mirroring off-diagonals.
Index count_full_nnz(const fs::path& path, Index* dim) {
  std::ifstream in(path);
  std::string line;
  bool header_done = false;
  Index count = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ls(line);
    if (!header_done) {
      Index rows, cols, entries;
      ls >> rows >> cols >> entries;
      *dim = rows;
      header_done = true;
      continue;
    }
    Index r, c;
    double v;
    ls >> r >> c >> v;
    if (v != 0.0) count += r == c ? 1 : 2;
  }
  return count;
}

Params config(Method m) {
  Params p;
  p.method = m;
  p.k = 10;
  p.m = 2;
  p.b = 0.05;
  p.p = 2;
  p.lambda = 1e-4;
  return p;
}

std::string cli() { return LGREG_CLI_PATH; }

int run(const std::string& args) { return std::system((cli() + " " + args + " >/dev/null 2>&1").c_str()); }

}  // namespace

TEST_CASE("single method gives a one-row report") {
  const auto toy = toy_generate(300, 1);
  const auto rows = benchmark(toy.data, toy.labels, {config(Method::lg)}, &toy.labels);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].ok());
  CHECK(rows[0].nnz > 0);
  CHECK(rows[0].sparsity == doctest::Approx(static_cast<double>(rows[0].nnz) / (300.0 * 300.0)));
  CHECK(rows[0].mae.has_value());

  std::ostringstream os;
  write_bench_csv(os, rows);
  std::istringstream is(os.str());
  std::string line;
  int n = 0;
  while (std::getline(is, line)) ++n;
  CHECK(n == 2);
}

TEST_CASE("a failing method is recorded and the run continues") {
  const auto toy = toy_generate(200, 2);
  Params bad = config(Method::lap);
  bad.b = -1.0;
  const auto rows = benchmark(toy.data, toy.labels, {bad, config(Method::lap)});
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0].ok());
  CHECK(rows[1].ok());
  std::ostringstream table;
  write_bench_table(table, rows);
  CHECK(table.str().find("lap") != std::string::npos);
}

TEST_CASE("reported sparsity matches the Matrix Market export") {
  const auto toy = toy_generate(400, 3);
  const auto dir = scratch_dir("bench");
  BenchOptions opts;
  opts.solve = false;
  opts.export_dir = dir.string();
  const auto rows =
      benchmark(toy.data, toy.labels, {config(Method::lap), config(Method::ilap), config(Method::lg)}, nullptr, opts);
  for (const auto& r : rows) {
    REQUIRE(r.ok());
    Index dim = 0;
    const Index nnz = count_full_nnz(dir / (to_string(r.params.method) + ".mtx"), &dim);
    CHECK(dim == 400);
    CHECK(nnz == r.nnz);
    CHECK(static_cast<double>(nnz) / (400.0 * 400.0) == doctest::Approx(r.sparsity).epsilon(1e-15));
  }
  CHECK(rows[0].sparsity < rows[2].sparsity);
  fs::remove_all(dir);
}

TEST_CASE("command line round trip") {
  const auto dir = scratch_dir("cli");
  const std::string pts = (dir / "p.csv").string(), lab = (dir / "l.csv").string();
  CHECK(run("toy --u 300 --seed 4 --points " + pts + " --labels " + lab) == 0);
  CHECK(run("build --points " + pts + " --method lg --k 12 --m 2 --out " + (dir / "g.mtx").string()) == 0);
  CHECK(fs::file_size(dir / "g.mtx") > 0);

  const std::string f1 = (dir / "f1.csv").string(), f2 = (dir / "f2.csv").string();
  CHECK(run("solve --points " + pts + " --labels " + lab + " --method lg --k 12 --m 2 --lambda 1e-4 --out " + f1) == 0);
  CHECK(run("--threads 3 solve --points " + pts + " --labels " + lab + " --method lg --k 12 --m 2 --lambda 1e-4 --out " +
            f2) == 0);
  std::ifstream a(f1), b(f2);
  const std::string sa((std::istreambuf_iterator<char>(a)), {}), sb((std::istreambuf_iterator<char>(b)), {});
  CHECK(!sa.empty());
  CHECK(sa == sb);

  CHECK(run("solve --points " + pts + " --labels " + lab + " --method ilap --k 10 --b 0.05 --p 2 --solver cg") == 0);
  CHECK(run("bench --points " + pts + " --labels " + lab + " --methods lap,lg --k 10 --m 2 --csv " +
            (dir / "b.csv").string()) == 0);
  CHECK(run("cv --points " + pts + " --labels " + lab +
            " --method lap --folds 2 --k-values 10 --b-values 0.05 --lambda-values 1e-3,1e-1") == 0);

  // Failures: missing input, malformed file, unknown method.
  CHECK(run("solve --points " + (dir / "missing.csv").string() + " --labels " + lab) != 0);
  {
    std::ofstream bad(dir / "bad.csv");
    bad << "0,1\n2\n";
  }
  CHECK(run("build --points " + (dir / "bad.csv").string() + " --out " + (dir / "x.mtx").string()) != 0);
  CHECK(run("build --points " + pts + " --method nope --out " + (dir / "x.mtx").string()) != 0);
  fs::remove_all(dir);
}
