#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace otb {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateVectorError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input files; messages name the file (and line).
class LoadError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Absolute tolerance used for score comparisons and norm checks.
inline constexpr double kTolerance = 1e-9;

/// A face template: a unit-norm real vector of run-wide fixed dimension.
///
/// Instances can only be obtained through l2_normalize (or the
/// from_raw() shorthand), so every Embedding in the system is normalized.
class Embedding {
 public:
  static Embedding from_raw(std::span<const double> values);

  std::span<const double> values() const { return values_; }
  std::size_t dim() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  bool operator==(const Embedding&) const = default;

 private:
  friend Embedding l2_normalize(std::span<const double> v);
  explicit Embedding(std::vector<double> unit) : values_(std::move(unit)) {}

  std::vector<double> values_;
};

/// Dissimilarity score: Euclidean distance between two embeddings.
struct Score {
  double value = 0.0;

  auto operator<=>(const Score&) const = default;
};

/// Returns v / ||v||. Throws DegenerateVectorError when ||v|| < 1e-12.
Embedding l2_normalize(std::span<const double> v);

/// Euclidean distance; throws DimensionMismatchError on differing dims.
Score euclidean_distance(const Embedding& a, const Embedding& b);

/// Raw vector form, used where the operands are not templates.
double euclidean_distance(std::span<const double> a, std::span<const double> b);

/// Throws DimensionMismatchError unless e.dim() == expected.
void require_dim(const Embedding& e, std::size_t expected, const std::string& what);

}  // namespace otb
