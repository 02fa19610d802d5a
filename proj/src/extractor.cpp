#include "otbmorph/extractor.hpp"

#include <bit>
#include <cmath>

#include <fmt/format.h>

#include "otbmorph/random.hpp"

namespace otb {

LinearExtractor::LinearExtractor(std::size_t embedding_dim, std::size_t param_dim,
                                 std::vector<double> weights, std::vector<double> bias,
                                 double noise_scale, std::uint64_t noise_seed)
    : embedding_dim_(embedding_dim),
      param_dim_(param_dim),
      weights_(std::move(weights)),
      bias_(std::move(bias)),
      noise_scale_(noise_scale),
      noise_seed_(noise_seed) {
  if (embedding_dim_ == 0 || param_dim_ == 0) throw ConfigError("extractor dimensions must be positive");
  if (weights_.size() != embedding_dim_ * param_dim_ || bias_.size() != embedding_dim_) {
    throw DimensionMismatchError(fmt::format("extractor expects {}x{} weights and {} biases, got {} and {}",
                                             embedding_dim_, param_dim_, embedding_dim_, weights_.size(),
                                             bias_.size()));
  }
  if (!(noise_scale_ >= 0.0)) throw ConfigError("observation noise must be >= 0");
}

LinearExtractor LinearExtractor::generate(std::size_t embedding_dim, std::size_t param_dim,
                                          double bias_scale, double noise_scale, std::uint64_t seed) {
  Rng rng(seed);
  const double w_scale = 1.0 / std::sqrt(static_cast<double>(param_dim));
  std::vector<double> weights(embedding_dim * param_dim);
  for (double& w : weights) w = w_scale * rng.normal();
  std::vector<double> bias(embedding_dim);
  for (double& b : bias) b = bias_scale * rng.normal();
  return LinearExtractor(embedding_dim, param_dim, std::move(weights), std::move(bias), noise_scale,
                         rng.next_u64());
}

Embedding LinearExtractor::extract(const FaceAsset& face) const {
  const auto* p = std::get_if<ParametricFace>(&face.repr);
  if (p == nullptr) throw ExtractorError(fmt::format("{}: synthetic extractor needs a parametric face", face.id));
  if (p->params.size() != param_dim_) {
    throw ExtractorError(fmt::format("{}: parametric face of dimension {}, extractor expects {}", face.id,
                                     p->params.size(), param_dim_));
  }
  std::vector<double> z(bias_);
  for (std::size_t d = 0; d < embedding_dim_; ++d) {
    const double* row = &weights_[d * param_dim_];
    double acc = 0.0;
    for (std::size_t k = 0; k < param_dim_; ++k) acc += row[k] * p->params[k];
    z[d] += acc;
  }
  if (noise_scale_ > 0.0) {
    std::uint64_t h = noise_seed_;
    for (double v : p->params) h = splitmix64(h ^ std::bit_cast<std::uint64_t>(v));
    Rng rng(h);
    for (double& v : z) v += noise_scale_ * rng.normal();
  }
  try {
    return l2_normalize(z);
  } catch (const DegenerateVectorError& e) {
    throw ExtractorError(fmt::format("{}: {}", face.id, e.what()));
  }
}

nlohmann::json LinearExtractor::describe() const {
  double checksum = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) checksum += weights_[i] * static_cast<double>(i % 7 + 1);
  return {{"kind", "linear"},
          {"embedding_dim", embedding_dim_},
          {"param_dim", param_dim_},
          {"observation_noise", noise_scale_},
          {"weight_checksum", checksum}};
}

nlohmann::json LinearExtractor::to_json() const {
  return {{"kind", "linear"},          {"embedding_dim", embedding_dim_}, {"param_dim", param_dim_},
          {"weights", weights_},       {"bias", bias_},                   {"observation_noise", noise_scale_},
          {"noise_seed", noise_seed_}};
}

LinearExtractor LinearExtractor::from_json(const nlohmann::json& j) {
  try {
    if (j.at("kind").get<std::string>() != "linear") throw LoadError("extractor kind must be \"linear\"");
    return LinearExtractor(j.at("embedding_dim").get<std::size_t>(), j.at("param_dim").get<std::size_t>(),
                           j.at("weights").get<std::vector<double>>(), j.at("bias").get<std::vector<double>>(),
                           j.value("observation_noise", 0.0), j.value("noise_seed", std::uint64_t{0}));
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(fmt::format("extractor: {}", e.what()));
  }
}

Embedding NormalizingExtractor::extract(const FaceAsset& face) const {
  const auto* p = std::get_if<ParametricFace>(&face.repr);
  if (p == nullptr) throw ExtractorError(fmt::format("{}: expected a feature-vector face", face.id));
  if (p->params.size() != dim_) {
    throw ExtractorError(fmt::format("{}: vector of dimension {}, expected {}", face.id, p->params.size(), dim_));
  }
  try {
    return l2_normalize(p->params);
  } catch (const DegenerateVectorError& e) {
    throw ExtractorError(fmt::format("{}: {}", face.id, e.what()));
  }
}

nlohmann::json NormalizingExtractor::describe() const {
  return {{"kind", "normalizing"}, {"embedding_dim", dim_}};
}

void LookupExtractor::add(const std::string& id, Embedding e) {
  require_dim(e, dim_, id);
  table_.insert_or_assign(id, std::move(e));
}

Embedding LookupExtractor::extract(const FaceAsset& face) const {
  const auto it = table_.find(face.id);
  if (it == table_.end()) throw ExtractorError(fmt::format("no embedding available for face id '{}'", face.id));
  return it->second;
}

nlohmann::json LookupExtractor::describe() const {
  return {{"kind", "lookup"}, {"embedding_dim", dim_}, {"entries", table_.size()}};
}

}  // namespace otb
