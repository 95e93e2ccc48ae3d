#pragma once

// Matrix Market coordinate I/O for SparseSymMatrix. Writes the "real symmetric"
// variant (lower triangle, 1-based); reads both "symmetric" and "general".

#include "lgreg/core.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace lgreg {

template <typename Scalar>
void write_matrix_market(std::ostream& os, const SparseSymMatrix<Scalar>& a) {
  const auto& m = a.matrix();
  Index lower = 0;
  for (Index c = 0; c < m.outerSize(); ++c) {
    for (typename SparseSymMatrix<Scalar>::Storage::InnerIterator it(m, c); it; ++it) {
      if (it.row() >= it.col()) ++lower;
    }
  }
  os << "%%MatrixMarket matrix coordinate real symmetric\n";
  os << a.dim() << ' ' << a.dim() << ' ' << lower << '\n';
  os << std::setprecision(17);
  for (Index c = 0; c < m.outerSize(); ++c) {
    for (typename SparseSymMatrix<Scalar>::Storage::InnerIterator it(m, c); it; ++it) {
      if (it.row() >= it.col()) os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
    }
  }
}

template <typename Scalar>
void save_matrix_market(const std::string& path, const SparseSymMatrix<Scalar>& a) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_matrix_market(os, a);
  if (!os) throw Error("write failed: " + path);
}

template <typename Scalar>
SparseSymMatrix<Scalar> read_matrix_market(std::istream& is, bool psd = true) {
  using Triplet = typename SparseSymMatrix<Scalar>::Triplet;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw Error("matrix market line " + std::to_string(lineno) + ": " + msg);
  };

  if (!std::getline(is, line)) throw Error("matrix market: empty input");
  ++lineno;
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  for (auto* s : {&object, &format, &field, &symmetry}) {
    for (auto& ch : *s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  }
  if (banner != "%%MatrixMarket" || object != "matrix" || format != "coordinate") {
    fail("expected '%%MatrixMarket matrix coordinate' banner");
  }
  if (field != "real" && field != "integer") fail("unsupported field '" + field + "'");
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general") fail("unsupported symmetry '" + symmetry + "'");

  Index rows = -1, cols = -1, entries = -1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ss(line);
    if (!(ss >> rows >> cols >> entries)) fail("malformed size line");
    break;
  }
  if (rows < 0) fail("missing size line");
  if (rows != cols) fail("matrix is not square");

  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(symmetric ? 2 * entries : entries));
  Index seen = 0;
  while (seen < entries && std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ss(line);
    Index r, c;
    Scalar v;
    if (!(ss >> r >> c >> v)) fail("malformed entry");
    if (r < 1 || r > rows || c < 1 || c > cols) fail("entry index out of range");
    triplets.emplace_back(r - 1, c - 1, v);
    if (symmetric && r != c) triplets.emplace_back(c - 1, r - 1, v);
    ++seen;
  }
  if (seen != entries) fail("expected " + std::to_string(entries) + " entries, found " + std::to_string(seen));
  return SparseSymMatrix<Scalar>::from_triplets(rows, triplets, psd);
}

template <typename Scalar>
SparseSymMatrix<Scalar> load_matrix_market(const std::string& path, bool psd = true) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  return read_matrix_market<Scalar>(is, psd);
}

}  // namespace lgreg
