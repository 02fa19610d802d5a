#include <cmath>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "otbmorph/protocol.hpp"

using namespace otb;

namespace {

KeyPoolEntry key(const std::string& id, std::vector<double> v, Group g) {
  return {id, {id, ParametricFace{v}}, l2_normalize(v), g};
}

FaceAsset face(const std::string& id, std::vector<double> v) { return {id, ParametricFace{std::move(v)}}; }

}  // namespace

TEST_CASE("decisions accept strictly below the threshold") {
  CHECK(decide(Score{0.5}, Score{0.6}) == Decision::Accept);
  CHECK(decide(Score{0.6}, Score{0.6}) == Decision::Reject);
  CHECK(decide(Score{0.7}, Score{0.6}) == Decision::Reject);
}

// Hand-worked 2-D case. Faces are their own features (normalized).
//   reference (2, 0), probe (0, 4), keys k1 = (2, 2) in B, k2 = (0, -2) in A.
//   unprotected: d((1,0), (0,1)) = sqrt(2)
//   Distance_key from the reference: d to k1 = sqrt(2 - sqrt(2)), to k2 = sqrt(2) -> k2
//     morphs (1, -1) and (0, 1): distance sqrt(2 + sqrt(2))
//   SFdistance_key for a group-A reference: only k1 -> morphs (2, 1) and (1, 3):
//     cosine 5 / sqrt(50), distance sqrt(2 - sqrt(2))
TEST_CASE("hand-worked two-dimensional verification") {
  const NormalizingExtractor extractor(2);
  const auto record = enroll("alice", face("ref", {2, 0}), Group::A, extractor);
  const auto probe = face("probe", {0, 4});
  const KeyPool pool({key("k1", {2, 2}, Group::B), key("k2", {0, -2}, Group::A)});
  Rng rng(1);

  const auto plain = verify_unprotected(probe, record, Score{1.5}, extractor, 3);
  CHECK(plain.score.value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(plain.accepted());
  CHECK(plain.attempt_index == 3);
  CHECK_FALSE(plain.key_id.has_value());

  OtbTrace trace;
  const auto distance = verify_otb(probe, record, {KeyStrategy::Distance, 0.5, KeyAnchor::Reference}, pool,
                                   Score{1.5}, rng, extractor, 0, &trace);
  CHECK(distance.key_id == "k2");
  CHECK(distance.score.value == doctest::Approx(std::sqrt(2.0 + std::sqrt(2.0))).epsilon(1e-12));
  CHECK_FALSE(distance.accepted());
  CHECK(trace.key_id == "k2");
  CHECK(trace.protected_probe_id == "probe~k2@0.5");
  CHECK(trace.protected_reference_id == "ref~k2@0.5");

  const auto sf = verify_otb(probe, record, {KeyStrategy::SFDistance, 0.5, KeyAnchor::Reference}, pool, Score{1.5},
                             rng, extractor);
  CHECK(sf.key_id == "k1");
  CHECK(sf.score.value == doctest::Approx(std::sqrt(2.0 - std::sqrt(2.0))).epsilon(1e-12));
  CHECK(sf.accepted());
}

TEST_CASE("probe anchoring selects against the probe embedding") {
  const NormalizingExtractor extractor(2);
  const auto record = enroll("alice", face("ref", {1, 0}), Group::A, extractor);
  const auto probe = face("probe", {0, 1});
  const KeyPool pool({key("west", {-1, 0.1}, Group::B), key("south", {0.1, -1}, Group::B)});
  Rng rng(1);
  const auto by_ref = verify_otb(probe, record, {KeyStrategy::Distance, 0.5, KeyAnchor::Reference}, pool,
                                 Score{1.0}, rng, extractor);
  const auto by_probe =
      verify_otb(probe, record, {KeyStrategy::Distance, 0.5, KeyAnchor::Probe}, pool, Score{1.0}, rng, extractor);
  CHECK(by_ref.key_id == "west");
  CHECK(by_probe.key_id == "south");
}

TEST_CASE("random keys change between attempts and replay under the same seed") {
  const NormalizingExtractor extractor(3);
  std::vector<KeyPoolEntry> entries;
  for (int i = 0; i < 20; ++i) entries.push_back(key("k" + std::to_string(i), {1.0 * i, 1, -1}, Group::B));
  const KeyPool pool(entries);
  const auto record = enroll("bob", face("ref", {1, 2, 3}), Group::A, extractor);
  const auto probe = face("probe", {1, 2, 2.5});

  auto keys = [&](std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::string> out;
    for (int t = 0; t < 30; ++t) {
      out.push_back(*verify_otb(probe, record, {KeyStrategy::Random, 0.5, KeyAnchor::Reference}, pool, Score{1.0},
                                rng, extractor, t)
                         .key_id);
    }
    return out;
  };
  const auto first = keys(7);
  CHECK(first == keys(7));
  CHECK(std::set<std::string>(first.begin(), first.end()).size() > 5);
}

TEST_CASE("protected comparison with an identical probe scores zero") {
  const NormalizingExtractor extractor(2);
  const auto record = enroll("carol", face("ref", {3, 1}), Group::B, extractor);
  const KeyPool pool({key("k", {1, 5}, Group::A)});
  Rng rng(2);
  const auto out = verify_otb(face("same", {3, 1}), record, {KeyStrategy::SFRandom, 0.5, KeyAnchor::Reference}, pool,
                              Score{0.1}, rng, extractor);
  CHECK(out.score.value == 0.0);
  CHECK(out.accepted());
}

TEST_CASE("empty cohorts propagate from verification") {
  const NormalizingExtractor extractor(2);
  const auto record = enroll("dave", face("ref", {3, 1}), Group::A, extractor);
  const KeyPool pool({key("k", {1, 5}, Group::A)});
  Rng rng(2);
  CHECK_THROWS_AS(verify_otb(face("p", {1, 1}), record, {KeyStrategy::SFRandom, 0.5, KeyAnchor::Reference}, pool,
                             Score{0.1}, rng, extractor),
                  EmptyCohortError);
}
