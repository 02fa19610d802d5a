#include "otbmorph/keysel.hpp"

#include <fstream>
#include <set>

#include <fmt/format.h>

#include "json.hpp"
#include "otbmorph/image_io.hpp"

namespace otb {

std::string_view to_string(Group g) { return g == Group::A ? "A" : "B"; }

Group parse_group(std::string_view text) {
  if (text == "A") return Group::A;
  if (text == "B") return Group::B;
  throw Error(fmt::format("unknown demographic group '{}' (expected A or B)", text));
}

std::string_view to_string(KeyStrategy s) {
  switch (s) {
    case KeyStrategy::Random: return "Random_key";
    case KeyStrategy::Distance: return "Distance_key";
    case KeyStrategy::SFDistance: return "SFdistance_key";
    case KeyStrategy::SFRandom: return "SFrandom_key";
  }
  return "?";
}

KeyStrategy parse_strategy(std::string_view text) {
  for (KeyStrategy s : kAllStrategies) {
    if (text == to_string(s)) return s;
  }
  throw ConfigError(fmt::format("unknown key strategy '{}'", text));
}

KeyPool::KeyPool(std::vector<KeyPoolEntry> entries) : entries_(std::move(entries)) {
  std::set<std::string_view> ids;
  for (const auto& e : entries_) {
    if (!ids.insert(e.id).second) throw Error(fmt::format("duplicate key pool id '{}'", e.id));
    if (e.group == Group::A) ++count_a_;
  }
}

const KeyPoolEntry& select_key(KeyStrategy strategy, const Embedding& anchor, Group anchor_group,
                               const KeyPool& pool, Rng& rng) {
  if (pool.empty()) throw EmptyCohortError("key pool is empty");
  const auto entries = pool.entries();
  const Group wanted = opposite(anchor_group);
  if (is_cross_group(strategy) && pool.count(wanted) == 0) {
    throw EmptyCohortError(fmt::format("{} needs group {} keys but the pool has none", to_string(strategy),
                                       to_string(wanted)));
  }

  switch (strategy) {
    case KeyStrategy::Random:
      return entries[rng.uniform_index(entries.size())];
    case KeyStrategy::SFRandom: {
      std::size_t pick = rng.uniform_index(pool.count(wanted));
      for (const auto& e : entries) {
        if (e.group == wanted && pick-- == 0) return e;
      }
      break;
    }
    case KeyStrategy::Distance:
    case KeyStrategy::SFDistance: {
      const KeyPoolEntry* best = nullptr;
      double best_d = -1.0;
      for (const auto& e : entries) {
        if (strategy == KeyStrategy::SFDistance && e.group != wanted) continue;
        const double d = euclidean_distance(anchor, e.embedding).value;
        if (d > best_d || (d == best_d && e.id < best->id)) {
          best = &e;
          best_d = d;
        }
      }
      return *best;
    }
  }
  throw EmptyCohortError("no key selected");
}

namespace {

FaceAsset parse_face(const nlohmann::json& line, const std::string& id, const std::vector<double>& vector,
                     const std::filesystem::path& base) {
  const auto it = line.find("face");
  if (it == line.end() || it->is_null()) return {id, ParametricFace{vector}};
  if (it->is_array()) return {id, ParametricFace{it->get<std::vector<double>>()}};
  std::filesystem::path image = it->get<std::string>();
  if (image.is_relative()) image = base / image;
  auto landmarks = image;
  landmarks.replace_extension(".json");
  return {id, load_raster_face(image, landmarks)};
}

}  // namespace

KeyPool load_key_pool(const std::filesystem::path& path, std::size_t embedding_dim) {
  std::ifstream in(path);
  if (!in) throw LoadError(fmt::format("{}: cannot open key pool manifest", path.string()));
  std::vector<KeyPoolEntry> entries;
  std::set<std::string> ids;
  std::string text;
  for (std::size_t line_no = 1; std::getline(in, text); ++line_no) {
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = fmt::format("{}:{}", path.string(), line_no);
    try {
      const auto j = nlohmann::json::parse(text);
      auto id = j.at("id").get<std::string>();
      auto vector = j.at("vector").get<std::vector<double>>();
      if (vector.size() != embedding_dim) {
        throw LoadError(fmt::format("{}: key '{}' has dimension {}, expected {}", where, id, vector.size(),
                                    embedding_dim));
      }
      if (!ids.insert(id).second) throw LoadError(fmt::format("{}: duplicate key id '{}'", where, id));
      auto face = parse_face(j, id, vector, path.parent_path());
      entries.push_back({id, std::move(face), l2_normalize(vector), parse_group(j.at("group").get<std::string>())});
    } catch (const LoadError&) {
      throw;
    } catch (const std::exception& e) {
      throw LoadError(fmt::format("{}: {}", where, e.what()));
    }
  }
  return KeyPool(std::move(entries));
}

}  // namespace otb
