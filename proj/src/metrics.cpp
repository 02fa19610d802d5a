#include "otbmorph/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace otb {
namespace {

void require_nonempty(std::span<const double> s, const char* what) {
  if (s.empty()) throw Error(fmt::format("{}: empty score set", what));
}

std::vector<double> sorted_copy(std::span<const double> s) {
  std::vector<double> v(s.begin(), s.end());
  std::sort(v.begin(), v.end());
  return v;
}

double count_below(const std::vector<double>& sorted, double t) {
  return static_cast<double>(std::lower_bound(sorted.begin(), sorted.end(), t) - sorted.begin());
}

// Rates from pre-sorted inputs.
struct Rates {
  std::vector<double> mated;
  std::vector<double> nonmated;

  OperatingPoint at(double t) const {
    const double n = static_cast<double>(nonmated.size());
    const double m = static_cast<double>(mated.size());
    return {t, count_below(nonmated, t) / n, (m - count_below(mated, t)) / m};
  }
};

Rates make_rates(const ScoreSets& sets, const char* what) {
  require_nonempty(sets.mated, what);
  require_nonempty(sets.nonmated, what);
  return {sorted_copy(sets.mated), sorted_copy(sets.nonmated)};
}

}  // namespace

double fmr_at(std::span<const double> nonmated, double t) {
  require_nonempty(nonmated, "fmr_at");
  const auto below = std::count_if(nonmated.begin(), nonmated.end(), [t](double s) { return s < t; });
  return static_cast<double>(below) / static_cast<double>(nonmated.size());
}

double fnmr_at(std::span<const double> mated, double t) {
  require_nonempty(mated, "fnmr_at");
  const auto rejected = std::count_if(mated.begin(), mated.end(), [t](double s) { return s >= t; });
  return static_cast<double>(rejected) / static_cast<double>(mated.size());
}

std::vector<double> candidate_thresholds(std::span<const double> a, std::span<const double> b) {
  std::vector<double> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::vector<double> out;
  out.reserve(2 * all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (i > 0) out.push_back((all[i - 1] + all[i]) / 2.0);
    out.push_back(all[i]);
  }
  if (!all.empty()) out.push_back(std::nextafter(all.back(), std::numeric_limits<double>::infinity()));
  return out;
}

EerResult compute_eer(const ScoreSets& sets) {
  const Rates rates = make_rates(sets, "compute_eer");
  EerResult best;
  double best_gap = std::numeric_limits<double>::infinity();
  for (double t : candidate_thresholds(rates.mated, rates.nonmated)) {
    const OperatingPoint p = rates.at(t);
    const double gap = std::abs(p.fmr - p.fnmr);
    if (gap < best_gap) {
      best_gap = gap;
      best = {p, (p.fmr + p.fnmr) / 2.0};
    }
  }
  return best;
}

double threshold_at_fmr(std::span<const double> nonmated, double target_fmr) {
  require_nonempty(nonmated, "threshold_at_fmr");
  if (!(target_fmr >= 0.0 && target_fmr <= 1.0)) {
    throw Error(fmt::format("threshold_at_fmr: target {} outside [0, 1]", target_fmr));
  }
  const auto sorted = sorted_copy(nonmated);
  const std::size_t n = sorted.size();
  const double dn = static_cast<double>(n);
  // Largest k with k / n <= target: thresholds up to sorted[k] admit at most k scores.
  std::size_t k = std::min(n, static_cast<std::size_t>(std::floor(target_fmr * dn)));
  while (k < n && static_cast<double>(k + 1) / dn <= target_fmr) ++k;
  while (k > 0 && static_cast<double>(k) / dn > target_fmr) --k;
  if (k == n) return std::nextafter(sorted.back(), std::numeric_limits<double>::infinity());
  return sorted[k];
}

std::vector<OperatingPoint> det_points(const ScoreSets& sets) {
  const Rates rates = make_rates(sets, "det_points");
  std::vector<OperatingPoint> out;
  for (double t : candidate_thresholds(rates.mated, rates.nonmated)) out.push_back(rates.at(t));
  return out;
}

double asr(std::span<const VerificationOutcome> outcomes) {
  if (outcomes.empty()) throw Error("asr: no outcomes");
  const auto accepted = std::count_if(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.accepted(); });
  return static_cast<double>(accepted) / static_cast<double>(outcomes.size());
}

double asr_at(std::span<const double> scores, double threshold) {
  if (scores.empty()) throw Error("asr: no scores");
  const auto accepted = std::count_if(scores.begin(), scores.end(), [threshold](double s) { return s < threshold; });
  return static_cast<double>(accepted) / static_cast<double>(scores.size());
}

}  // namespace otb
