#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "otbmorph/config.hpp"
#include "otbmorph/extractor.hpp"
#include "otbmorph/keysel.hpp"

namespace otb {

struct Identity {
  std::string id;
  Group group;
  /// Ordered samples: performance split, then attack references, then attack probes.
  std::vector<FaceAsset> samples;
};

/// Evaluation population, key pool, and the extractor that maps faces of
/// both to embeddings.
struct Assets {
  std::vector<Identity> identities;
  KeyPool pool;
  std::shared_ptr<const Extractor> extractor;
};

/// Deterministic synthetic population (synthetic mode).
///
/// Identity k belongs to group A for even k and B for odd k. Its centre is
/// center_scale * N(0, I_P) shifted by +/- group_offset along a fixed random
/// unit direction; samples add within_class_scale * N(0, I_P). Key pool
/// entries are further fresh identities (one sample each) with alternating
/// groups, disjoint from the population. The extractor is a random linear map
/// followed by normalization. Throws ConfigError on invalid sizes.
Assets generate_population(const ExperimentConfig& config, std::uint64_t seed);

/// Reads ingested assets from config.inputs (ingested mode).
///
/// Population file, JSON Lines: {"id", "identity", "group", "vector", "face"?}
/// with samples listed in split order per identity. The key pool uses the
/// format of load_key_pool. The extractor is chosen from the inputs:
///   inputs.extractor set       -> LinearExtractor loaded from that file
///   faces are images           -> lookup by face id over every "vector" given
///                                 (plus inputs.extra_embeddings, {"id", "vector"})
///   otherwise                  -> the vectors themselves are the faces
/// Errors name the offending file and line.
Assets load_assets(const ExperimentConfig& config);

/// Writes population.jsonl, key_pool.jsonl, extractor.json and a config.json
/// that re-runs the same assets in ingested mode. Requires a LinearExtractor
/// and parametric faces.
void write_assets(const Assets& assets, const ExperimentConfig& config, const std::filesystem::path& dir);

}  // namespace otb
