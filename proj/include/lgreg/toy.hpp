#pragma once

#include "lgreg/core.hpp"

#include <cstdint>

namespace lgreg {

inline constexpr std::uint64_t kDefaultSeed = 20150901;

struct ToyProblem {
  DataSetd data;
  LabelSetd labels;
};

/// Two-dimensional square benchmark: u - 5 uniform points in [-1, 1]^2, then
/// the corners (-1,-1), (1,-1), (1,1), (-1,1) and the origin as the labeled
/// points, with labels -1, 10, -1, 10 and 10.
ToyProblem toy_generate(Index u, std::uint64_t seed = kDefaultSeed);

}  // namespace lgreg
