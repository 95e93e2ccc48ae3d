#pragma once

// Method selection shared by cross-validation, the benchmark and the CLI.

#include "lgreg/core.hpp"

#include <string>
#include <string_view>

namespace lgreg {

enum class Method { lap, ilap, lg };

std::string to_string(Method m);
Method parse_method(std::string_view name);

/// Hyper-parameters of one regularizer build plus the solve weight. Fields
/// irrelevant to `method` are ignored (m for Lap/iLap, b and p for LG, p for Lap).
struct Params {
  Method method = Method::lg;
  Index k = 20;
  Index m = 2;
  double lambda = 1e-6;
  double b = 5.0;
  int p = 4;
  bool augment = true;
};

bool uses_m(Method m);
bool uses_b(Method m);
bool uses_p(Method m);

/// Builds the u x u regularization matrix described by `params`.
SparseSymMatrixd build_regularizer(const DataSetd& data, const Params& params, unsigned threads = 1);

}  // namespace lgreg
