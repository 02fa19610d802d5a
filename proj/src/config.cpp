#include "otbmorph/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>

namespace otb {
namespace {

template <typename T>
void read(const nlohmann::json& j, const char* key, T& into) {
  if (const auto it = j.find(key); it != j.end()) into = it->get<T>();
}

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> known, const char* where) {
  std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw ConfigError(fmt::format("{}: unknown field '{}'", where, key));
  }
}

}  // namespace

std::string_view to_string(Mode m) { return m == Mode::Synthetic ? "synthetic" : "ingested"; }

Mode parse_mode(std::string_view text) {
  if (text == "synthetic") return Mode::Synthetic;
  if (text == "ingested") return Mode::Ingested;
  throw ConfigError(fmt::format("unknown mode '{}' (expected synthetic or ingested)", text));
}

void ExperimentConfig::validate() const {
  if (embedding_dim == 0 || param_dim == 0) throw ConfigError("dimensions must be positive");
  if (identity_count < 2) throw ConfigError("need at least 2 identities");
  if (performance_samples < 2) throw ConfigError("performance_samples must be >= 2");
  if (attack_references < 1 || attack_probes < 1) throw ConfigError("attack split sizes must be >= 1");
  if (performance_samples + attack_references + attack_probes > samples_per_identity) {
    throw ConfigError(fmt::format("splits {} + {} + {} exceed samples_per_identity {}", performance_samples,
                                  attack_references, attack_probes, samples_per_identity));
  }
  if (target_fmrs.empty()) throw ConfigError("target_fmrs is empty");
  for (double f : target_fmrs) {
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError(fmt::format("target FMR {} outside (0, 1]", f));
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError(fmt::format("alpha {} outside [0, 1]", alpha));
  attack.validate();
  if (mode == Mode::Synthetic && !strategies.empty() && key_pool_size == 0) {
    throw ConfigError("key_pool_size must be positive when protected systems are requested");
  }
  const auto& s = synthetic;
  for (double v : {s.center_scale, s.within_class_scale, s.group_offset, s.bias_scale, s.observation_noise}) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("synthetic scales must be finite and >= 0");
  }
  if (mode == Mode::Ingested && (inputs.population.empty() || (!strategies.empty() && inputs.key_pool.empty()))) {
    throw ConfigError("ingested mode needs inputs.population and inputs.key_pool");
  }
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    reject_unknown(j,
                   {"mode", "embedding_dim", "param_dim", "identity_count", "samples_per_identity",
                    "performance_samples", "attack_references", "attack_probes", "key_pool_size", "strategies",
                    "target_fmrs", "alpha", "key_anchor", "attack", "synthetic", "master_seed", "inputs",
                    "output_dir", "threads"},
                   "config");
    if (j.contains("mode")) c.mode = parse_mode(j.at("mode").get<std::string>());
    read(j, "embedding_dim", c.embedding_dim);
    read(j, "param_dim", c.param_dim);
    read(j, "identity_count", c.identity_count);
    read(j, "samples_per_identity", c.samples_per_identity);
    read(j, "performance_samples", c.performance_samples);
    read(j, "attack_references", c.attack_references);
    read(j, "attack_probes", c.attack_probes);
    read(j, "key_pool_size", c.key_pool_size);
    if (j.contains("strategies")) {
      c.strategies.clear();
      for (const auto& s : j.at("strategies")) c.strategies.push_back(parse_strategy(s.get<std::string>()));
    }
    read(j, "target_fmrs", c.target_fmrs);
    read(j, "alpha", c.alpha);
    if (j.contains("key_anchor")) {
      const auto a = j.at("key_anchor").get<std::string>();
      if (a != "reference" && a != "probe") throw ConfigError(fmt::format("unknown key_anchor '{}'", a));
      c.key_anchor = a == "reference" ? KeyAnchor::Reference : KeyAnchor::Probe;
    }
    if (j.contains("attack")) {
      const auto& a = j.at("attack");
      reject_unknown(a, {"budget", "sigma", "start", "reference"}, "attack");
      read(a, "budget", c.attack.budget);
      read(a, "sigma", c.attack.sigma);
      if (a.contains("start")) {
        const auto s = a.at("start").get<std::string>();
        if (s != "running" && s != "fresh") throw ConfigError(fmt::format("unknown attack.start '{}'", s));
        c.attack.start = s == "running" ? AttackStart::Running : AttackStart::FreshPerAttempt;
      }
      if (a.contains("reference")) {
        const auto r = a.at("reference").get<std::string>();
        if (r != "rotating" && r != "fixed") throw ConfigError(fmt::format("unknown attack.reference '{}'", r));
        c.attack_reference = r == "rotating" ? ReferenceMode::Rotating : ReferenceMode::Fixed;
      }
    }
    if (j.contains("synthetic")) {
      const auto& s = j.at("synthetic");
      reject_unknown(s, {"center_scale", "within_class_scale", "group_offset", "bias_scale", "observation_noise"},
                     "synthetic");
      read(s, "center_scale", c.synthetic.center_scale);
      read(s, "within_class_scale", c.synthetic.within_class_scale);
      read(s, "group_offset", c.synthetic.group_offset);
      read(s, "bias_scale", c.synthetic.bias_scale);
      read(s, "observation_noise", c.synthetic.observation_noise);
    }
    read(j, "master_seed", c.master_seed);
    if (j.contains("inputs")) {
      const auto& in = j.at("inputs");
      reject_unknown(in, {"population", "key_pool", "extractor", "extra_embeddings"}, "inputs");
      auto path = [&](const char* key, std::filesystem::path& into) {
        if (in.contains(key)) into = in.at(key).get<std::string>();
      };
      path("population", c.inputs.population);
      path("key_pool", c.inputs.key_pool);
      path("extractor", c.inputs.extractor);
      path("extra_embeddings", c.inputs.extra_embeddings);
    }
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    read(j, "threads", c.threads);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("config: {}", e.what()));
  }
  return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json strategies = nlohmann::json::array();
  for (auto s : c.strategies) strategies.push_back(std::string(to_string(s)));
  return {
      {"mode", std::string(to_string(c.mode))},
      {"embedding_dim", c.embedding_dim},
      {"param_dim", c.param_dim},
      {"identity_count", c.identity_count},
      {"samples_per_identity", c.samples_per_identity},
      {"performance_samples", c.performance_samples},
      {"attack_references", c.attack_references},
      {"attack_probes", c.attack_probes},
      {"key_pool_size", c.key_pool_size},
      {"strategies", strategies},
      {"target_fmrs", c.target_fmrs},
      {"alpha", c.alpha},
      {"key_anchor", c.key_anchor == KeyAnchor::Reference ? "reference" : "probe"},
      {"attack",
       {{"budget", c.attack.budget},
        {"sigma", c.attack.sigma},
        {"start", c.attack.start == AttackStart::Running ? "running" : "fresh"},
        {"reference", c.attack_reference == ReferenceMode::Rotating ? "rotating" : "fixed"}}},
      {"synthetic",
       {{"center_scale", c.synthetic.center_scale},
        {"within_class_scale", c.synthetic.within_class_scale},
        {"group_offset", c.synthetic.group_offset},
        {"bias_scale", c.synthetic.bias_scale},
        {"observation_noise", c.synthetic.observation_noise}}},
      {"master_seed", c.master_seed},
      {"inputs",
       {{"population", c.inputs.population.string()},
        {"key_pool", c.inputs.key_pool.string()},
        {"extractor", c.inputs.extractor.string()},
        {"extra_embeddings", c.inputs.extra_embeddings.string()}}},
  };
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("{}: cannot open config", path.string()));
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  ExperimentConfig c = config_from_json(j);
  const auto base = path.parent_path();
  for (auto* p : {&c.inputs.population, &c.inputs.key_pool, &c.inputs.extractor, &c.inputs.extra_embeddings}) {
    if (!p->empty() && p->is_relative()) *p = base / *p;
  }
  return c;
}

}  // namespace otb
