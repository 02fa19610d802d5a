#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "otbmorph/core.hpp"
#include "otbmorph/face.hpp"
#include "otbmorph/random.hpp"

namespace otb {

class EmptyCohortError : public Error {
 public:
  using Error::Error;
};

/// Two-valued demographic attribute (gender in the original evaluation).
enum class Group { A, B };

constexpr Group opposite(Group g) { return g == Group::A ? Group::B : Group::A; }
std::string_view to_string(Group g);
Group parse_group(std::string_view text);

enum class KeyStrategy { Random, Distance, SFDistance, SFRandom };

/// "Random_key", "Distance_key", "SFdistance_key", "SFrandom_key".
std::string_view to_string(KeyStrategy s);
KeyStrategy parse_strategy(std::string_view text);
constexpr bool is_cross_group(KeyStrategy s) { return s == KeyStrategy::SFDistance || s == KeyStrategy::SFRandom; }
inline constexpr KeyStrategy kAllStrategies[] = {KeyStrategy::Random, KeyStrategy::Distance,
                                                 KeyStrategy::SFDistance, KeyStrategy::SFRandom};

struct KeyPoolEntry {
  std::string id;
  FaceAsset face;
  Embedding embedding;
  Group group;
};

/// Immutable candidate set for morph keys. Ids are unique.
class KeyPool {
 public:
  KeyPool() = default;
  explicit KeyPool(std::vector<KeyPoolEntry> entries);

  std::span<const KeyPoolEntry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t count(Group g) const { return g == Group::A ? count_a_ : entries_.size() - count_a_; }

 private:
  std::vector<KeyPoolEntry> entries_;
  std::size_t count_a_ = 0;
};

/// Picks the morph partner for one verification attempt.
///
///   Random_key      uniform over the pool
///   Distance_key    farthest entry from `anchor`
///   SFdistance_key  farthest entry among the opposite group of `anchor_group`
///   SFrandom_key    uniform over the opposite group
///
/// Distance ties go to the lexicographically smallest id. Random draws consume
/// exactly one uniform_index from `rng`; distance strategies consume nothing.
/// Throws EmptyCohortError for an empty pool or an empty opposite group.
const KeyPoolEntry& select_key(KeyStrategy strategy, const Embedding& anchor, Group anchor_group,
                               const KeyPool& pool, Rng& rng);

/// Reads a JSON Lines key pool:
///   {"id": str, "group": "A"|"B", "vector": [...], "face": <path or [params]>}
/// `vector` must have dimension `embedding_dim`. A string `face` names a PNG
/// (relative to the manifest) whose landmarks sit next to it with a .json
/// extension; an array is a parametric face; a missing face means the vector
/// itself is the face.
KeyPool load_key_pool(const std::filesystem::path& path, std::size_t embedding_dim);

}  // namespace otb
