#include "otbmorph/experiment.hpp"

#include <set>

#include <fmt/format.h>

#include "otbmorph/parallel.hpp"
#include "otbmorph/random.hpp"

namespace otb {

std::string SystemSpec::label() const { return strategy ? std::string(to_string(*strategy)) : "unprotected"; }

std::string percent_label(double fraction) { return fmt::format("{:g}", fraction * 100.0); }

void preflight(const ExperimentConfig& config, const Assets& assets) {
  config.validate();
  if (!assets.extractor) throw ConfigError("no extractor");
  if (assets.identities.size() < 2) throw ConfigError("need at least 2 identities");
  const std::size_t needed = config.performance_samples + config.attack_references + config.attack_probes;

  std::set<std::string> ids;
  std::set<Group> groups;
  for (const auto& identity : assets.identities) {
    groups.insert(identity.group);
    if (identity.samples.size() < needed) {
      throw ConfigError(fmt::format("identity '{}' has {} samples, the splits need {}", identity.id,
                                    identity.samples.size(), needed));
    }
    for (const auto& s : identity.samples) {
      if (!ids.insert(s.id).second) throw ConfigError(fmt::format("sample id '{}' appears twice", s.id));
    }
  }
  for (const auto& e : assets.pool.entries()) {
    if (ids.contains(e.id)) throw ConfigError(fmt::format("key pool id '{}' is also a population sample", e.id));
  }

  for (KeyStrategy s : config.strategies) {
    if (assets.pool.empty()) throw EmptyCohortError(fmt::format("{} requested with an empty key pool", to_string(s)));
    if (!is_cross_group(s)) continue;
    for (Group g : groups) {
      if (assets.pool.count(opposite(g)) == 0) {
        throw EmptyCohortError(fmt::format("{} needs group-{} keys for group-{} identities, the pool has none",
                                           to_string(s), to_string(opposite(g)), to_string(g)));
      }
    }
  }
}

namespace {

struct Runner {
  const ExperimentConfig& config;
  const Assets& assets;
  const SystemSpec& spec;

  VerificationOutcome verify(const FaceAsset& probe, const ReferenceRecord& record, Rng& rng,
                             std::size_t attempt) const {
    if (!spec.strategy) return verify_unprotected(probe, record, Score{0.0}, *assets.extractor, attempt);
    const OtbSettings settings{*spec.strategy, config.alpha, config.key_anchor};
    return verify_otb(probe, record, settings, assets.pool, Score{0.0}, rng, *assets.extractor, attempt);
  }

  std::uint64_t seed(const std::string& label) const { return derive_seed(config.master_seed, label); }

  ScoreSets performance() const {
    const auto& people = assets.identities;
    std::vector<ScoreSets> per(people.size());
    parallel_for(people.size(), config.threads, [&](std::size_t i) {
      const Identity& who = people[i];
      Rng mated_rng(seed(fmt::format("perf/{}/mated/{}", spec.label(), who.id)));
      for (std::size_t j = 0; j < config.mated_pairs_per_identity(); ++j) {
        const auto record = enroll(who.id, who.samples[2 * j], who.group, *assets.extractor);
        per[i].mated.push_back(verify(who.samples[2 * j + 1], record, mated_rng, j).score.value);
      }
      Rng nonmated_rng(seed(fmt::format("perf/{}/nonmated/{}", spec.label(), who.id)));
      const auto record = enroll(who.id, who.samples[0], who.group, *assets.extractor);
      for (std::size_t k = 0; k < people.size(); ++k) {
        if (k == i) continue;
        per[i].nonmated.push_back(verify(people[k].samples[0], record, nonmated_rng, k).score.value);
      }
    });
    ScoreSets all;
    for (auto& s : per) {
      all.mated.insert(all.mated.end(), s.mated.begin(), s.mated.end());
      all.nonmated.insert(all.nonmated.end(), s.nonmated.begin(), s.nonmated.end());
    }
    return all;
  }

  // Victim i is attacked by identity i+1 (mod N), starting from that
  // identity's first attack probe.
  std::vector<AttackTrajectory> attacks(Score threshold) const {
    const auto& people = assets.identities;
    const std::size_t refs_begin = config.performance_samples;
    const std::size_t probes_begin = refs_begin + config.attack_references;
    std::vector<AttackTrajectory> out(people.size());
    parallel_for(people.size(), config.threads, [&](std::size_t i) {
      const Identity& victim = people[i];
      const Identity& attacker = people[(i + 1) % people.size()];
      std::vector<ReferenceRecord> refs;
      for (std::size_t r = 0; r < config.attack_references; ++r) {
        refs.push_back(enroll(victim.id, victim.samples[refs_begin + r], victim.group, *assets.extractor));
      }
      const std::span<const FaceAsset> probes(attacker.samples.data() + probes_begin, config.attack_probes);

      Rng key_rng(seed(fmt::format("attack-keys/{}/{}", spec.label(), victim.id)));
      const VerificationFn system = [&](const FaceAsset& probe, std::size_t t) {
        const auto& ref = config.attack_reference == ReferenceMode::Rotating ? refs[t % refs.size()] : refs[0];
        auto outcome = verify(probe, ref, key_rng, t);
        outcome.threshold = threshold;
        outcome.decision = decide(outcome.score, threshold);
        return outcome;
      };
      AttackConfig attack = config.attack;
      attack.seed = seed(fmt::format("attack/{}", victim.id));
      out[i] = run_attack(probes[0], system, attack, probes);
    });
    return out;
  }
};

double pooled_asr(std::span<const AttackTrajectory> trajectories) {
  std::vector<VerificationOutcome> all;
  for (const auto& t : trajectories) all.insert(all.end(), t.outcomes.begin(), t.outcomes.end());
  return asr(all);
}

SystemResult run_system(const ExperimentConfig& config, const Assets& assets, const SystemSpec& spec) {
  const Runner runner{config, assets, spec};
  SystemResult r;
  r.spec = spec;
  r.scores = runner.performance();
  r.eer = compute_eer(r.scores);
  r.trajectories = runner.attacks(Score{r.eer.point.threshold});
  r.asr_at_eer = pooled_asr(r.trajectories);
  r.at_eer = summarize_attacks(r.trajectories);
  for (double target : config.target_fmrs) {
    const double t = threshold_at_fmr(r.scores.nonmated, target);
    std::vector<AttackTrajectory> retimed;
    for (const auto& tr : r.trajectories) retimed.push_back(with_threshold(tr, Score{t}));
    r.rows.push_back({target, t, fmr_at(r.scores.nonmated, t), fnmr_at(r.scores.mated, t), pooled_asr(retimed)});
    r.at_target.push_back(summarize_attacks(retimed));
  }
  return r;
}

nlohmann::json manifest(const ExperimentConfig& config, const Assets& assets, const ReportBundle& bundle) {
  const std::size_t n = assets.identities.size();
  const std::size_t mated = bundle.systems.front().scores.mated.size();
  const std::size_t nonmated = bundle.systems.front().scores.nonmated.size();
  std::size_t group_a = 0;
  for (const auto& id : assets.identities) group_a += id.group == Group::A ? 1 : 0;

  nlohmann::json systems = nlohmann::json::array();
  for (const auto& s : bundle.systems) {
    systems.push_back({{"system", s.spec.label()},
                       {"mated_comparisons", s.scores.mated.size()},
                       {"nonmated_comparisons", s.scores.nonmated.size()},
                       {"eer", s.eer.eer},
                       {"eer_threshold", s.eer.point.threshold}});
  }
  return {
      {"config", config_to_json(config)},
      {"master_seed", config.master_seed},
      {"seed_derivation", "splitmix64(master_seed XOR fnv1a64(task_label))"},
      {"extractor", assets.extractor->describe()},
      {"counts",
       {{"identities", n},
        {"identities_group_a", group_a},
        {"identities_group_b", n - group_a},
        {"key_pool", assets.pool.size()},
        {"key_pool_group_a", assets.pool.count(Group::A)},
        {"key_pool_group_b", assets.pool.count(Group::B)},
        {"mated_comparisons", mated},
        {"nonmated_comparisons", nonmated},
        {"attack_trajectories", n},
        {"attack_attempts", n * config.attack.budget}}},
      {"expected_counts",
       {{"mated_comparisons", n * config.mated_pairs_per_identity()},
        {"nonmated_comparisons", n * (n - 1)},
        {"attack_attempts", n * config.attack.budget}}},
      {"systems", systems},
      {"assumptions",
       {"protected comparisons morph both legs with the same key",
        "a fresh key is drawn for every protected comparison and every attack attempt",
        "mated pairs: performance samples (1,2), (3,4), ... of each identity",
        "non-mated pairs: first performance sample of every other identity against each identity's first "
        "performance sample, both orders",
        "victim i is attacked by identity i+1 (mod N) starting from its first attack probe",
        "attack attempt t is compared against the victim's attack reference t (rotating) or the first one (fixed)",
        "ASR pools every attack attempt of every victim",
        "accept iff score < threshold"}},
  };
}

}  // namespace

ReportBundle run_experiment(const ExperimentConfig& config, const Assets& assets) {
  preflight(config, assets);
  ReportBundle bundle;
  for (const auto& identity : assets.identities) bundle.victim_ids.push_back(identity.id);
  std::vector<SystemSpec> specs{{std::nullopt}};
  for (KeyStrategy s : config.strategies) specs.push_back({s});
  for (const auto& spec : specs) bundle.systems.push_back(run_system(config, assets, spec));
  bundle.manifest = manifest(config, assets, bundle);
  return bundle;
}

ReportBundle run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Assets assets = config.mode == Mode::Synthetic
                            ? generate_population(config, derive_seed(config.master_seed, "synthetic"))
                            : load_assets(config);
  return run_experiment(config, assets);
}

}  // namespace otb
