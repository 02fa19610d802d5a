#pragma once

#include <span>
#include <vector>

#include "otbmorph/protocol.hpp"

namespace otb {

struct ScoreSets {
  std::vector<double> mated;
  std::vector<double> nonmated;
};

/// Error rates at one decision threshold (accept iff score < threshold).
struct OperatingPoint {
  double threshold = 0.0;
  double fmr = 0.0;
  double fnmr = 0.0;

  bool operator==(const OperatingPoint&) const = default;
};

struct EerResult {
  OperatingPoint point;
  double eer = 0.0;  // (fmr + fnmr) / 2 at point
};

/// Fraction of non-mated scores strictly below t.
double fmr_at(std::span<const double> nonmated, double t);
/// Fraction of mated scores at or above t.
double fnmr_at(std::span<const double> mated, double t);

/// Candidate decision thresholds: every distinct score, the midpoint between
/// each pair of adjacent distinct scores, and the next double above the
/// maximum. Ascending. The empirical rates are step functions, so this set
/// realizes every attainable (fmr, fnmr) pair.
std::vector<double> candidate_thresholds(std::span<const double> a, std::span<const double> b = {});

/// Candidate threshold minimizing |fmr - fnmr|; ties go to the smaller threshold.
EerResult compute_eer(const ScoreSets& sets);

/// Largest threshold whose FMR does not exceed target_fmr. With n scores and
/// target < 1/n this is the smallest non-mated score (ties are non-matches).
double threshold_at_fmr(std::span<const double> nonmated, double target_fmr);

/// One point per candidate threshold, by ascending threshold, so FMR is
/// non-decreasing and FNMR non-increasing along the list.
std::vector<OperatingPoint> det_points(const ScoreSets& sets);

/// Fraction of accepted attempts.
double asr(std::span<const VerificationOutcome> outcomes);
/// Fraction of scores strictly below threshold.
double asr_at(std::span<const double> scores, double threshold);

}  // namespace otb
