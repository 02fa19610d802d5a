#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "otbmorph/attack.hpp"
#include "otbmorph/keysel.hpp"
#include "otbmorph/protocol.hpp"

namespace otb {

enum class Mode { Synthetic, Ingested };

/// Which victim reference an attack attempt is compared against.
///   Rotating: attempt t uses the victim's t-th attack reference sample.
///   Fixed: every attempt uses the first attack reference sample.
enum class ReferenceMode { Rotating, Fixed };

struct SyntheticSettings {
  double center_scale = 1.0;        // per-coordinate std of identity centres
  double within_class_scale = 0.3;  // per-coordinate std of samples around their centre
  double group_offset = 1.0;        // centre shift along a fixed direction, +/- by group
  double bias_scale = 0.0;          // extractor bias std
  double observation_noise = 0.0;   // extractor noise std (0 = deterministic)
};

struct InputPaths {
  std::filesystem::path population;
  std::filesystem::path key_pool;
  std::filesystem::path extractor;
  std::filesystem::path extra_embeddings;
};

/// JSON field names mirror the member names; see configs/default.json.
struct ExperimentConfig {
  Mode mode = Mode::Synthetic;
  std::size_t embedding_dim = 64;
  std::size_t param_dim = 16;
  std::size_t identity_count = 50;
  std::size_t samples_per_identity = 88;
  std::size_t performance_samples = 28;
  std::size_t attack_references = 30;
  std::size_t attack_probes = 30;
  std::size_t key_pool_size = 5749;
  std::vector<KeyStrategy> strategies{std::begin(kAllStrategies), std::end(kAllStrategies)};
  std::vector<double> target_fmrs{0.00001, 0.0001, 0.001, 0.01};
  double alpha = 0.5;
  KeyAnchor key_anchor = KeyAnchor::Reference;
  AttackConfig attack{};
  ReferenceMode attack_reference = ReferenceMode::Rotating;
  SyntheticSettings synthetic{};
  std::uint64_t master_seed = 20240917;
  InputPaths inputs{};
  std::filesystem::path output_dir = "otb_report";
  std::size_t threads = 1;

  /// Throws ConfigError on inconsistent sizes or out-of-range values.
  void validate() const;

  std::size_t mated_pairs_per_identity() const { return performance_samples / 2; }
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
/// Relative input paths are resolved against the config file's directory.
ExperimentConfig load_config(const std::filesystem::path& path);

std::string_view to_string(Mode m);
Mode parse_mode(std::string_view text);

}  // namespace otb
