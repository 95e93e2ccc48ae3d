#include "lgreg/toy.hpp"

#include <random>
#include <string>

namespace lgreg {

ToyProblem toy_generate(Index u, std::uint64_t seed) {
  if (u < 5) throw Error("toy_generate: u = " + std::to_string(u) + " must be at least 5");
  RowMatrix<double> pts(u, 2);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  for (Index i = 0; i < u - 5; ++i) {
    pts(i, 0) = coord(rng);
    pts(i, 1) = coord(rng);
  }
  const double anchors[5][3] = {{-1, -1, -1}, {1, -1, 10}, {1, 1, -1}, {-1, 1, 10}, {0, 0, 10}};
  ToyProblem toy;
  for (int t = 0; t < 5; ++t) {
    const Index i = u - 5 + t;
    pts(i, 0) = anchors[t][0];
    pts(i, 1) = anchors[t][1];
    toy.labels.push_back(i, anchors[t][2]);
  }
  toy.data = DataSetd(std::move(pts));
  return toy;
}

}  // namespace lgreg
