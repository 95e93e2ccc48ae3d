#include "lgreg/methods.hpp"

#include "lgreg/laplacian.hpp"
#include "lgreg/local_gaussian.hpp"

namespace lgreg {

std::string to_string(Method m) {
  switch (m) {
    case Method::lap: return "lap";
    case Method::ilap: return "ilap";
    case Method::lg: return "lg";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  std::string s(name);
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (s == "lap") return Method::lap;
  if (s == "ilap" || s == "i-lap") return Method::ilap;
  if (s == "lg") return Method::lg;
  throw Error("unknown method '" + std::string(name) + "' (expected lap, ilap or lg)");
}

bool uses_m(Method m) { return m == Method::lg; }
bool uses_b(Method m) { return m != Method::lg; }
bool uses_p(Method m) { return m == Method::ilap; }

SparseSymMatrixd build_regularizer(const DataSetd& data, const Params& params, unsigned threads) {
  switch (params.method) {
    case Method::lap:
      return build_knn_laplacian(data, params.k, params.b, threads);
    case Method::ilap:
      return iterated_matrix(build_knn_laplacian(data, params.k, params.b, threads), params.p);
    case Method::lg:
      return build_lg(data, params.k, params.m, LgOptions{params.augment, threads});
  }
  throw Error("build_regularizer: unknown method");
}

}  // namespace lgreg
