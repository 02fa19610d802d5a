#include "otbmorph/core.hpp"

#include <cmath>

#include <fmt/format.h>

namespace otb {

Embedding Embedding::from_raw(std::span<const double> values) { return l2_normalize(values); }

Embedding l2_normalize(std::span<const double> v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double norm = std::sqrt(sq);
  if (!(norm >= 1e-12) || !std::isfinite(norm)) {
    throw DegenerateVectorError(fmt::format("cannot normalize vector of norm {}", norm));
  }
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x /= norm;
  return Embedding(std::move(out));
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionMismatchError(
        fmt::format("distance between vectors of dimension {} and {}", a.size(), b.size()));
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sq += d * d;
  }
  return std::sqrt(sq);
}

Score euclidean_distance(const Embedding& a, const Embedding& b) {
  return Score{euclidean_distance(a.values(), b.values())};
}

void require_dim(const Embedding& e, std::size_t expected, const std::string& what) {
  if (e.dim() != expected) {
    throw DimensionMismatchError(
        fmt::format("{}: embedding dimension {} does not match configured {}", what, e.dim(), expected));
  }
}

}  // namespace otb
