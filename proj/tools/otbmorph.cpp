// otbmorph: command-line driver for the OTB-morph simulation.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "otbmorph/experiment.hpp"
#include "otbmorph/image_io.hpp"
#include "otbmorph/random.hpp"

namespace {

struct Common {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  std::string strategy;
  std::string mode;
  std::size_t threads = 0;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "experiment config (JSON)")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "master seed (overrides the config)");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--strategy", c.strategy, "comma-separated key strategies, e.g. Random_key,Distance_key");
  app->add_option("--mode", c.mode, "synthetic or ingested")->check(CLI::IsMember({"synthetic", "ingested"}));
  app->add_option("--threads", c.threads, "worker threads (0 = all cores)");
}

otb::ExperimentConfig resolve(const Common& c, const CLI::App& app) {
  otb::ExperimentConfig config = c.config.empty() ? otb::ExperimentConfig{} : otb::load_config(c.config);
  if (app.count("--seed") > 0) config.master_seed = c.seed;
  if (!c.out.empty()) config.output_dir = c.out;
  if (!c.mode.empty()) config.mode = otb::parse_mode(c.mode);
  if (app.count("--threads") > 0) config.threads = c.threads;
  if (!c.strategy.empty()) {
    config.strategies.clear();
    std::stringstream list(c.strategy);
    for (std::string name; std::getline(list, name, ',');) {
      if (!name.empty()) config.strategies.push_back(otb::parse_strategy(name));
    }
  }
  config.validate();
  return config;
}

int cmd_gen(const Common& c, const CLI::App& app) {
  otb::ExperimentConfig config = resolve(c, app);
  if (config.mode != otb::Mode::Synthetic) throw otb::ConfigError("gen writes synthetic populations only");
  const auto assets = otb::generate_population(config, otb::derive_seed(config.master_seed, "synthetic"));
  otb::write_assets(assets, config, config.output_dir);
  fmt::print("wrote {} identities and {} keys to {}\n", assets.identities.size(), assets.pool.size(),
             config.output_dir.string());
  return 0;
}

int cmd_run(const Common& c, const CLI::App& app) {
  const otb::ExperimentConfig config = resolve(c, app);
  const auto bundle = otb::run_experiment(config);
  otb::write_report(bundle, config.output_dir);
  for (const auto& s : bundle.systems) {
    fmt::print("{:<15} EER {:6.2f}%", s.spec.label(), 100 * s.eer.eer);
    for (const auto& r : s.rows) fmt::print("  ASR@{}% {:6.2f}%", otb::percent_label(r.target_fmr), 100 * r.asr);
    fmt::print("\n");
  }
  fmt::print("report written to {}\n", config.output_dir.string());
  return 0;
}

struct MorphArgs {
  std::string face, key, face_landmarks, key_landmarks, out;
  double alpha = 0.5;
};

std::string sibling_json(const std::string& image) {
  return std::filesystem::path(image).replace_extension(".json").string();
}

int cmd_morph(const MorphArgs& m) {
  const auto a = otb::load_raster_face(m.face, m.face_landmarks.empty() ? sibling_json(m.face) : m.face_landmarks);
  const auto b = otb::load_raster_face(m.key, m.key_landmarks.empty() ? sibling_json(m.key) : m.key_landmarks);
  const auto result = otb::morph_raster(a, b, m.alpha);
  otb::write_png(result.pixels, m.out);
  const auto stem = std::filesystem::path(m.out).stem().string();
  otb::write_landmarks({stem, result.landmarks}, sibling_json(m.out));
  fmt::print("wrote {} and {}\n", m.out, sibling_json(m.out));
  return 0;
}

struct MetricsArgs {
  std::string scores, config, out;
  std::vector<double> targets;
};

otb::ScoreSets read_scores(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw otb::LoadError(fmt::format("{}: cannot open", path));
  otb::ScoreSets sets;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (n == 1 && line == "label,score")) continue;
    const auto comma = line.find(',');
    const std::string label = line.substr(0, comma);
    double score = 0.0;
    try {
      if (comma == std::string::npos) throw std::invalid_argument("missing score");
      std::size_t used = 0;
      const std::string value = line.substr(comma + 1);
      score = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception& e) {
      throw otb::LoadError(fmt::format("{}:{}: bad score row '{}' ({})", path, n, line, e.what()));
    }
    if (label == "mated" || label == "genuine") {
      sets.mated.push_back(score);
    } else if (label == "nonmated" || label == "impostor") {
      sets.nonmated.push_back(score);
    } else {
      throw otb::LoadError(fmt::format("{}:{}: unknown label '{}'", path, n, label));
    }
  }
  return sets;
}

int cmd_metrics(const MetricsArgs& m) {
  std::vector<double> targets = m.targets;
  if (targets.empty()) targets = m.config.empty() ? otb::ExperimentConfig{}.target_fmrs : otb::load_config(m.config).target_fmrs;
  const auto sets = read_scores(m.scores);
  const auto eer = otb::compute_eer(sets);

  std::ostringstream csv;
  csv << "mated,nonmated,eer_pct,eer_threshold,target_fmr_pct,fmr_pct,fnmr_pct,threshold\n";
  for (double target : targets) {
    const double t = otb::threshold_at_fmr(sets.nonmated, target);
    csv << fmt::format("{},{},{:.2f},{:.4f},{:.4f},{:.4f},{:.2f},{:.4f}\n", sets.mated.size(), sets.nonmated.size(),
                       100 * eer.eer, eer.point.threshold, 100 * target, 100 * otb::fmr_at(sets.nonmated, t),
                       100 * otb::fnmr_at(sets.mated, t), t);
  }
  if (m.out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(m.out);
    out << csv.str();
    if (!out) throw otb::Error(fmt::format("{}: write failed", m.out));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OTB-morph cancelable face biometrics simulation"};
  app.require_subcommand(1);

  Common gen_args;
  auto* gen = app.add_subcommand("gen", "write a synthetic population, key pool and extractor");
  add_common(gen, gen_args);

  Common run_args;
  auto* run = app.add_subcommand("run", "run an experiment and write its report");
  add_common(run, run_args);

  MorphArgs morph_args;
  auto* morph = app.add_subcommand("morph", "morph two face images given their landmark files");
  morph->add_option("face", morph_args.face, "face image (PNG)")->required()->check(CLI::ExistingFile);
  morph->add_option("key", morph_args.key, "key image (PNG)")->required()->check(CLI::ExistingFile);
  morph->add_option("--face-landmarks", morph_args.face_landmarks, "defaults to the image path with .json");
  morph->add_option("--key-landmarks", morph_args.key_landmarks, "defaults to the image path with .json");
  morph->add_option("--alpha", morph_args.alpha, "weight of the key")->check(CLI::Range(0.0, 1.0));
  morph->add_option("--out", morph_args.out, "output PNG; landmarks go next to it")->required();

  MetricsArgs metrics_args;
  auto* metrics = app.add_subcommand("metrics", "recompute EER and Table I rates from a label,score CSV");
  metrics->add_option("scores", metrics_args.scores, "CSV with label,score rows (mated|nonmated)")
      ->required()
      ->check(CLI::ExistingFile);
  metrics->add_option("--config", metrics_args.config, "take target FMRs from this config")->check(CLI::ExistingFile);
  metrics->add_option("--target-fmr", metrics_args.targets, "target FMR fractions (repeatable)");
  metrics->add_option("--out", metrics_args.out, "output CSV (default: stdout)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gen) return cmd_gen(gen_args, *gen);
    if (*run) return cmd_run(run_args, *run);
    if (*morph) return cmd_morph(morph_args);
    if (*metrics) return cmd_metrics(metrics_args);
  } catch (const std::exception& e) {
    fmt::print(stderr, "otbmorph: {}\n", e.what());
    return 1;
  }
  return 0;
}
