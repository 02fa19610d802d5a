#include "otbmorph/protocol.hpp"

#include <fmt/format.h>

namespace otb {

ReferenceRecord enroll(std::string identity_id, FaceAsset face, Group group, const Extractor& extractor) {
  Embedding embedding = extractor.extract(face);
  return {std::move(identity_id), std::move(face), std::move(embedding), group};
}

VerificationOutcome verify_unprotected(const FaceAsset& probe, const ReferenceRecord& record, Score threshold,
                                       const Extractor& extractor, std::size_t attempt_index) {
  const Score s = euclidean_distance(extractor.extract(probe), record.reference_embedding);
  return {s, decide(s, threshold), threshold, std::nullopt, attempt_index};
}

VerificationOutcome verify_otb(const FaceAsset& probe, const ReferenceRecord& record, const OtbSettings& settings,
                               const KeyPool& pool, Score threshold, Rng& rng, const Extractor& extractor,
                               std::size_t attempt_index, OtbTrace* trace) {
  const Embedding anchor =
      settings.anchor == KeyAnchor::Reference ? record.reference_embedding : extractor.extract(probe);
  const KeyPoolEntry& key = select_key(settings.strategy, anchor, record.group, pool, rng);

  const FaceAsset protected_ref_face = morph(record.reference_face, key.face, settings.alpha);
  const FaceAsset protected_probe_face = morph(probe, key.face, settings.alpha);
  if (trace != nullptr) {
    trace->key_id = key.id;
    trace->protected_probe_id = protected_probe_face.id;
    trace->protected_reference_id = protected_ref_face.id;
  }
  const Embedding protected_ref = extractor.extract(protected_ref_face);
  const Embedding protected_probe = extractor.extract(protected_probe_face);
  const Score s = euclidean_distance(protected_probe, protected_ref);
  return {s, decide(s, threshold), threshold, key.id, attempt_index};
}

}  // namespace otb
