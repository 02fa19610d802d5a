#include "otbmorph/population.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <fmt/format.h>

#include "otbmorph/image_io.hpp"
#include "otbmorph/random.hpp"

namespace otb {
namespace {

std::vector<double> gaussian(Rng& rng, std::size_t n, double scale) {
  std::vector<double> v(n);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

std::vector<double> identity_centre(Rng& rng, const ExperimentConfig& c, const std::vector<double>& direction,
                                    Group g) {
  auto centre = gaussian(rng, c.param_dim, c.synthetic.center_scale);
  const double shift = (g == Group::A ? 1.0 : -1.0) * c.synthetic.group_offset;
  for (std::size_t i = 0; i < centre.size(); ++i) centre[i] += shift * direction[i];
  return centre;
}

std::vector<double> around(Rng& rng, const std::vector<double>& centre, double scale) {
  auto v = gaussian(rng, centre.size(), scale);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += centre[i];
  return v;
}

int digits(std::size_t n) { return n <= 1 ? 1 : static_cast<int>(std::floor(std::log10(static_cast<double>(n - 1)))) + 1; }

}  // namespace

Assets generate_population(const ExperimentConfig& config, std::uint64_t seed) {
  config.validate();
  const auto& c = config;
  auto extractor = std::make_shared<LinearExtractor>(LinearExtractor::generate(
      c.embedding_dim, c.param_dim, c.synthetic.bias_scale, c.synthetic.observation_noise,
      derive_seed(seed, "extractor")));

  Rng rng(derive_seed(seed, "population"));
  auto direction = gaussian(rng, c.param_dim, 1.0);
  {
    const Embedding unit = l2_normalize(direction);
    direction.assign(unit.values().begin(), unit.values().end());
  }

  Assets assets;
  const int id_width = std::max(3, digits(c.identity_count));
  const int sample_width = std::max(2, digits(c.samples_per_identity));
  for (std::size_t k = 0; k < c.identity_count; ++k) {
    Identity identity{fmt::format("id{:0{}}", k, id_width), k % 2 == 0 ? Group::A : Group::B, {}};
    const auto centre = identity_centre(rng, c, direction, identity.group);
    for (std::size_t s = 0; s < c.samples_per_identity; ++s) {
      identity.samples.push_back({fmt::format("{}/s{:0{}}", identity.id, s, sample_width),
                                  ParametricFace{around(rng, centre, c.synthetic.within_class_scale)}});
    }
    assets.identities.push_back(std::move(identity));
  }

  Rng pool_rng(derive_seed(seed, "keypool"));
  const int key_width = std::max(5, digits(c.key_pool_size));
  std::vector<KeyPoolEntry> entries;
  entries.reserve(c.key_pool_size);
  for (std::size_t k = 0; k < c.key_pool_size; ++k) {
    const Group g = k % 2 == 0 ? Group::A : Group::B;
    const auto centre = identity_centre(pool_rng, c, direction, g);
    FaceAsset face{fmt::format("key{:0{}}", k, key_width),
                   ParametricFace{around(pool_rng, centre, c.synthetic.within_class_scale)}};
    Embedding e = extractor->extract(face);
    entries.push_back({face.id, std::move(face), std::move(e), g});
  }
  assets.pool = KeyPool(std::move(entries));
  assets.extractor = std::move(extractor);
  return assets;
}

namespace {

struct PopulationLine {
  std::string id;
  std::string identity;
  Group group;
  std::vector<double> vector;
  FaceAsset face;
  std::string where;
};

FaceAsset read_face(const nlohmann::json& j, const std::string& id, const std::vector<double>& vector,
                    const std::filesystem::path& base) {
  const auto it = j.find("face");
  if (it == j.end() || it->is_null()) return {id, ParametricFace{vector}};
  if (it->is_array()) return {id, ParametricFace{it->get<std::vector<double>>()}};
  std::filesystem::path image = it->get<std::string>();
  if (image.is_relative()) image = base / image;
  auto landmarks = image;
  landmarks.replace_extension(".json");
  return {id, load_raster_face(image, landmarks)};
}

template <typename Fn>
void for_each_jsonl(const std::filesystem::path& path, const char* what, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw LoadError(fmt::format("{}: cannot open {}", path.string(), what));
  std::string text;
  for (std::size_t line_no = 1; std::getline(in, text); ++line_no) {
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = fmt::format("{}:{}", path.string(), line_no);
    try {
      fn(nlohmann::json::parse(text), where);
    } catch (const LoadError&) {
      throw;
    } catch (const std::exception& e) {
      throw LoadError(fmt::format("{}: {}", where, e.what()));
    }
  }
}

std::vector<double> read_vector(const nlohmann::json& j, const std::string& id, std::size_t dim,
                                const std::string& where) {
  auto v = j.at("vector").get<std::vector<double>>();
  if (v.size() != dim) {
    throw LoadError(fmt::format("{}: '{}' has embedding dimension {}, expected {}", where, id, v.size(), dim));
  }
  return v;
}

}  // namespace

Assets load_assets(const ExperimentConfig& config) {
  config.validate();
  const auto& in = config.inputs;
  const std::size_t dim = config.embedding_dim;

  std::vector<PopulationLine> lines;
  std::set<std::string> seen_ids;
  for_each_jsonl(in.population, "population file", [&](const nlohmann::json& j, const std::string& where) {
    PopulationLine line;
    line.id = j.at("id").get<std::string>();
    line.identity = j.at("identity").get<std::string>();
    line.group = parse_group(j.at("group").get<std::string>());
    line.vector = read_vector(j, line.id, dim, where);
    line.face = read_face(j, line.id, line.vector, in.population.parent_path());
    line.where = where;
    if (!seen_ids.insert(line.id).second) throw LoadError(fmt::format("{}: duplicate sample id '{}'", where, line.id));
    lines.push_back(std::move(line));
  });

  Assets assets;
  std::map<std::string, std::size_t> index;
  for (auto& line : lines) {
    auto [it, inserted] = index.emplace(line.identity, assets.identities.size());
    if (inserted) assets.identities.push_back({line.identity, line.group, {}});
    Identity& identity = assets.identities[it->second];
    if (identity.group != line.group) {
      throw LoadError(fmt::format("{}: identity '{}' listed with both groups", line.where, line.identity));
    }
    identity.samples.push_back(line.face);
  }
  if (assets.identities.size() < 2) {
    throw LoadError(fmt::format("{}: need at least 2 identities, found {}", in.population.string(),
                                assets.identities.size()));
  }
  const std::size_t needed = config.performance_samples + config.attack_references + config.attack_probes;
  for (const auto& identity : assets.identities) {
    if (identity.samples.size() < needed) {
      throw LoadError(fmt::format("{}: identity '{}' has {} samples, the splits need {}", in.population.string(),
                                  identity.id, identity.samples.size(), needed));
    }
  }

  if (!in.key_pool.empty()) assets.pool = load_key_pool(in.key_pool, dim);

  bool raster = false;
  for (const auto& line : lines) raster = raster || line.face.is_raster();
  for (const auto& e : assets.pool.entries()) raster = raster || e.face.is_raster();

  if (!in.extractor.empty()) {
    std::ifstream ext(in.extractor);
    if (!ext) throw LoadError(fmt::format("{}: cannot open extractor", in.extractor.string()));
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(ext);
    } catch (const nlohmann::json::exception& e) {
      throw LoadError(fmt::format("{}: {}", in.extractor.string(), e.what()));
    }
    auto linear = std::make_shared<LinearExtractor>(LinearExtractor::from_json(j));
    if (linear->dim() != dim) {
      throw LoadError(fmt::format("{}: extractor output dimension {} does not match embedding_dim {}",
                                  in.extractor.string(), linear->dim(), dim));
    }
    assets.extractor = std::move(linear);
  } else if (raster) {
    auto lookup = std::make_shared<LookupExtractor>(dim);
    for (const auto& line : lines) lookup->add(line.id, l2_normalize(line.vector));
    for (const auto& e : assets.pool.entries()) lookup->add(e.id, e.embedding);
    if (!in.extra_embeddings.empty()) {
      for_each_jsonl(in.extra_embeddings, "embedding file", [&](const nlohmann::json& j, const std::string& where) {
        const auto id = j.at("id").get<std::string>();
        lookup->add(id, l2_normalize(read_vector(j, id, dim, where)));
      });
    }
    assets.extractor = std::move(lookup);
  } else {
    for (const auto& line : lines) {
      const auto& p = std::get<ParametricFace>(line.face.repr);
      if (p.params.size() != dim) {
        throw LoadError(fmt::format("{}: parametric face '{}' of dimension {} needs inputs.extractor", line.where,
                                    line.id, p.params.size()));
      }
    }
    assets.extractor = std::make_shared<NormalizingExtractor>(dim);
  }
  return assets;
}

void write_assets(const Assets& assets, const ExperimentConfig& config, const std::filesystem::path& dir) {
  const auto* linear = dynamic_cast<const LinearExtractor*>(assets.extractor.get());
  if (linear == nullptr) throw Error("write_assets: only synthetic (linear) extractors can be written");
  std::filesystem::create_directories(dir);

  auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw Error(fmt::format("{}: cannot write", (dir / name).string()));
    return out;
  };
  auto params = [](const FaceAsset& f) -> const std::vector<double>& {
    const auto* p = std::get_if<ParametricFace>(&f.repr);
    if (p == nullptr) throw Error(fmt::format("write_assets: face '{}' is not parametric", f.id));
    return p->params;
  };
  {
    auto out = open("population.jsonl");
    for (const auto& identity : assets.identities) {
      for (const auto& s : identity.samples) {
        const Embedding e = linear->extract(s);
        const nlohmann::json j{{"id", s.id},
                               {"identity", identity.id},
                               {"group", std::string(to_string(identity.group))},
                               {"vector", std::vector<double>(e.values().begin(), e.values().end())},
                               {"face", params(s)}};
        out << j.dump() << '\n';
      }
    }
  }
  {
    auto out = open("key_pool.jsonl");
    for (const auto& e : assets.pool.entries()) {
      const nlohmann::json j{{"id", e.id},
                             {"group", std::string(to_string(e.group))},
                             {"vector", std::vector<double>(e.embedding.values().begin(), e.embedding.values().end())},
                             {"face", params(e.face)}};
      out << j.dump() << '\n';
    }
  }
  open("extractor.json") << linear->to_json().dump() << '\n';

  ExperimentConfig ingested = config;
  ingested.mode = Mode::Ingested;
  ingested.inputs = {"population.jsonl", "key_pool.jsonl", "extractor.json", {}};
  open("config.json") << config_to_json(ingested).dump(2) << '\n';
}

}  // namespace otb
