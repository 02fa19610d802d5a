#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "otbmorph/core.hpp"
#include "otbmorph/face.hpp"

namespace otb {

class ExtractorError : public Error {
 public:
  using Error::Error;
};

/// Feature extractor: FaceAsset -> Embedding. Implementations are immutable
/// and safe to call concurrently.
class Extractor {
 public:
  virtual ~Extractor() = default;
  virtual Embedding extract(const FaceAsset& face) const = 0;
  virtual std::size_t dim() const = 0;
  /// Summary recorded in run manifests.
  virtual nlohmann::json describe() const = 0;
};

/// Synthetic extractor for parametric faces:
///   normalize(W * params + bias + noise)
/// with W a fixed D x P matrix. The observation noise is Gaussian with the
/// configured scale, seeded from a hash of the input parameters, so the map
/// stays a pure function of its input (noise 0 gives the noiseless map).
class LinearExtractor final : public Extractor {
 public:
  LinearExtractor(std::size_t embedding_dim, std::size_t param_dim, std::vector<double> weights,
                  std::vector<double> bias, double noise_scale = 0.0, std::uint64_t noise_seed = 0);

  /// W entries ~ N(0, 1/P), bias entries ~ N(0, bias_scale^2).
  static LinearExtractor generate(std::size_t embedding_dim, std::size_t param_dim, double bias_scale,
                                  double noise_scale, std::uint64_t seed);

  Embedding extract(const FaceAsset& face) const override;
  std::size_t dim() const override { return embedding_dim_; }
  std::size_t param_dim() const { return param_dim_; }
  nlohmann::json describe() const override;

  /// Full parameter dump (weights included) and its inverse.
  nlohmann::json to_json() const;
  static LinearExtractor from_json(const nlohmann::json& j);

 private:
  std::size_t embedding_dim_;
  std::size_t param_dim_;
  std::vector<double> weights_;  // row-major D x P
  std::vector<double> bias_;
  double noise_scale_;
  std::uint64_t noise_seed_;
};

/// Treats a parametric face as a raw feature vector and normalizes it. Used
/// when ingested embeddings stand in for the faces themselves.
class NormalizingExtractor final : public Extractor {
 public:
  explicit NormalizingExtractor(std::size_t dim) : dim_(dim) {}
  Embedding extract(const FaceAsset& face) const override;
  std::size_t dim() const override { return dim_; }
  nlohmann::json describe() const override;

 private:
  std::size_t dim_;
};

/// Looks embeddings up by face id, e.g. features computed offline by a deep
/// model. Faces without an entry raise ExtractorError.
class LookupExtractor final : public Extractor {
 public:
  explicit LookupExtractor(std::size_t dim) : dim_(dim) {}
  void add(const std::string& id, Embedding e);
  bool contains(const std::string& id) const { return table_.contains(id); }
  Embedding extract(const FaceAsset& face) const override;
  std::size_t dim() const override { return dim_; }
  nlohmann::json describe() const override;

 private:
  std::size_t dim_;
  std::map<std::string, Embedding> table_;
};

}  // namespace otb
