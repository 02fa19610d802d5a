#include "otbmorph/attack.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace otb {

void AttackConfig::validate() const {
  if (budget < 1) throw ConfigError("attack budget must be >= 1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError(fmt::format("attack sigma {} must be >= 0", sigma));
}

AttackTrajectory run_attack(const FaceAsset& start, const VerificationFn& system, const AttackConfig& config,
                            std::span<const FaceAsset> fresh_samples) {
  config.validate();
  const bool fresh = config.start == AttackStart::FreshPerAttempt;
  if (fresh && fresh_samples.empty()) throw ConfigError("fresh-per-attempt attack needs attacker samples");

  Rng rng(config.seed);
  std::vector<double> current = face_values(start);
  std::vector<double> delta(current.size(), 0.0);
  std::vector<double> noise(current.size(), 0.0);
  double best = std::numeric_limits<double>::infinity();

  AttackTrajectory out;
  out.outcomes.reserve(config.budget);
  out.best_scores.reserve(config.budget);
  for (std::size_t t = 0; t < config.budget; ++t) {
    if (t > 0) {
      for (double& n : noise) n = config.sigma * rng.normal();
    }
    FaceAsset candidate;
    if (!fresh) {
      if (t == 0) {
        candidate = start;
      } else {
        std::vector<double> values(current);
        for (std::size_t i = 0; i < values.size(); ++i) values[i] += noise[i];
        candidate = with_values(start, values, fmt::format("{}#{}", start.id, t));
      }
    } else {
      const FaceAsset& base = fresh_samples[t % fresh_samples.size()];
      std::vector<double> values = face_values(base);
      if (values.size() != delta.size()) {
        throw DimensionMismatchError(fmt::format("attacker sample {} differs in size from the start face", base.id));
      }
      for (std::size_t i = 0; i < values.size(); ++i) values[i] += delta[i] + noise[i];
      candidate = with_values(base, values, fmt::format("{}#{}", base.id, t));
    }

    VerificationOutcome outcome;
    try {
      outcome = system(candidate, t);
    } catch (const std::exception& e) {
      throw AttackAbortedError(fmt::format("attack aborted at attempt {}: {}", t, e.what()), std::move(out));
    }
    outcome.attempt_index = t;
    if (outcome.score.value < best) {
      best = outcome.score.value;
      if (!fresh) {
        current = face_values(candidate);
      } else {
        for (std::size_t i = 0; i < delta.size(); ++i) delta[i] += noise[i];
      }
    }
    out.outcomes.push_back(std::move(outcome));
    out.best_scores.push_back(best);
  }
  return out;
}

AttackTrajectory with_threshold(const AttackTrajectory& trajectory, Score threshold) {
  AttackTrajectory out = trajectory;
  for (auto& o : out.outcomes) {
    o.threshold = threshold;
    o.decision = decide(o.score, threshold);
  }
  return out;
}

AttackSummary summarize_attacks(std::span<const AttackTrajectory> trajectories) {
  if (trajectories.empty()) throw Error("summarize_attacks: no trajectories");
  const std::size_t budget = trajectories.front().outcomes.size();
  for (const auto& t : trajectories) {
    if (t.outcomes.size() != budget) {
      throw Error(fmt::format("summarize_attacks: mixed budgets {} and {}", budget, t.outcomes.size()));
    }
  }
  AttackSummary s{std::vector<double>(budget, 0.0), std::vector<double>(budget, 0.0)};
  std::vector<std::size_t> succeeded(budget, 0);
  for (const auto& t : trajectories) {
    bool hit = false;
    for (std::size_t i = 0; i < budget; ++i) {
      s.mean_scores[i] += t.outcomes[i].score.value;
      hit = hit || t.outcomes[i].accepted();
      if (hit) ++succeeded[i];
    }
  }
  const double n = static_cast<double>(trajectories.size());
  for (std::size_t i = 0; i < budget; ++i) {
    s.mean_scores[i] /= n;
    s.cumulative_chance[i] = static_cast<double>(succeeded[i]) / n;
  }
  return s;
}

}  // namespace otb
