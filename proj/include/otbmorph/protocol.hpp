#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "otbmorph/extractor.hpp"
#include "otbmorph/keysel.hpp"

namespace otb {

/// Enrolled biometric reference. The raw face is retained because the
/// protected template is regenerated under a fresh key at every attempt;
/// a deployment would need a trusted re-issuance facility to hold it.
struct ReferenceRecord {
  std::string identity_id;
  FaceAsset reference_face;
  Embedding reference_embedding;
  Group group;
};

enum class Decision { Accept, Reject };

struct VerificationOutcome {
  Score score;
  Decision decision = Decision::Reject;
  Score threshold;
  std::optional<std::string> key_id;  // empty for the unprotected system
  std::size_t attempt_index = 0;

  bool accepted() const { return decision == Decision::Accept; }
};

/// Accept iff score < threshold; ties reject.
constexpr Decision decide(Score score, Score threshold) {
  return score.value < threshold.value ? Decision::Accept : Decision::Reject;
}

/// Which embedding drives distance-based key selection.
enum class KeyAnchor { Reference, Probe };

ReferenceRecord enroll(std::string identity_id, FaceAsset face, Group group, const Extractor& extractor);

VerificationOutcome verify_unprotected(const FaceAsset& probe, const ReferenceRecord& record, Score threshold,
                                       const Extractor& extractor, std::size_t attempt_index = 0);

/// Instrumentation for one protected comparison: the selected key and the
/// ids of the two morphed faces (which name the key each leg was morphed with).
struct OtbTrace {
  std::string key_id;
  std::string protected_probe_id;
  std::string protected_reference_id;
};

struct OtbSettings {
  KeyStrategy strategy = KeyStrategy::Random;
  double alpha = 0.5;
  KeyAnchor anchor = KeyAnchor::Reference;
};

/// One protected verification attempt: a key is drawn from `pool` for this
/// attempt only, both the probe and the enrolled face are morphed with it,
/// and the two morphs are compared after feature extraction.
VerificationOutcome verify_otb(const FaceAsset& probe, const ReferenceRecord& record, const OtbSettings& settings,
                               const KeyPool& pool, Score threshold, Rng& rng, const Extractor& extractor,
                               std::size_t attempt_index = 0, OtbTrace* trace = nullptr);

}  // namespace otb
