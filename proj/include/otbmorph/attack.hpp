#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "otbmorph/protocol.hpp"

namespace otb {

/// How each attempt's candidate is formed.
///   Running: one probe, perturbed from the best candidate seen so far.
///   FreshPerAttempt: attempt t perturbs attacker sample t, carrying over the
///   accumulated perturbation that has improved the score so far.
enum class AttackStart { Running, FreshPerAttempt };

struct AttackConfig {
  std::size_t budget = 30;
  double sigma = 0.7;
  std::uint64_t seed = 0;
  AttackStart start = AttackStart::Running;

  void validate() const;
};

struct AttackTrajectory {
  std::vector<VerificationOutcome> outcomes;
  /// Running minimum of the observed scores; non-increasing.
  std::vector<double> best_scores;
};

class AttackAbortedError : public Error {
 public:
  AttackAbortedError(const std::string& what, AttackTrajectory partial)
      : Error(what), partial_(std::move(partial)) {}
  const AttackTrajectory& partial() const { return partial_; }

 private:
  AttackTrajectory partial_;
};

/// The attacked system as seen by the attacker: submit a probe for attempt t,
/// observe the outcome.
using VerificationFn = std::function<VerificationOutcome(const FaceAsset& probe, std::size_t attempt)>;

/// Score-feedback hill climbing. Attempt 0 submits the start face unchanged;
/// each later attempt adds zero-mean Gaussian noise of scale sigma to every
/// coordinate of the current best (pixels are rounded and clamped), and the
/// candidate becomes the new best only if its score is strictly lower. All
/// `budget` attempts run regardless of decisions. `fresh_samples` is required
/// in FreshPerAttempt mode (attempt t uses sample t mod size).
///
/// A failing system call raises AttackAbortedError carrying the outcomes so far.
AttackTrajectory run_attack(const FaceAsset& start, const VerificationFn& system, const AttackConfig& config,
                            std::span<const FaceAsset> fresh_samples = {});

/// Copy of `trajectory` with decisions recomputed at `threshold`.
AttackTrajectory with_threshold(const AttackTrajectory& trajectory, Score threshold);

struct AttackSummary {
  /// Mean observed score per attempt index.
  std::vector<double> mean_scores;
  /// Fraction of trajectories with an accept at or before each attempt index.
  std::vector<double> cumulative_chance;
};

/// Throws Error for an empty list or trajectories of different lengths.
AttackSummary summarize_attacks(std::span<const AttackTrajectory> trajectories);

}  // namespace otb
