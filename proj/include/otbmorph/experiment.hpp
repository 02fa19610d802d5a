#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "otbmorph/attack.hpp"
#include "otbmorph/config.hpp"
#include "otbmorph/metrics.hpp"
#include "otbmorph/population.hpp"

namespace otb {

/// The unprotected baseline (no strategy) or OTB-morph with one key strategy.
struct SystemSpec {
  std::optional<KeyStrategy> strategy;

  /// "unprotected" or the strategy name; used in file names and CSV columns.
  std::string label() const;
};

/// One Table I row: rates at the threshold derived for a target FMR.
struct OperatingRow {
  double target_fmr = 0.0;
  double threshold = 0.0;
  double fmr = 0.0;
  double fnmr = 0.0;
  double asr = 0.0;
};

struct SystemResult {
  SystemSpec spec;
  ScoreSets scores;
  EerResult eer;
  double asr_at_eer = 0.0;
  std::vector<OperatingRow> rows;  // one per target FMR, config order
  /// One trajectory per victim identity, population order. Decisions are
  /// recorded against the EER threshold; scores do not depend on it.
  std::vector<AttackTrajectory> trajectories;
  AttackSummary at_eer;
  std::vector<AttackSummary> at_target;  // parallel to rows
};

struct ReportBundle {
  std::vector<std::string> victim_ids;
  std::vector<SystemResult> systems;  // unprotected first, then config.strategies
  nlohmann::json manifest;
};

/// Throws EmptyCohortError, ConfigError or LoadError if `assets` cannot
/// support `config` (missing opposite-group keys, overlapping ids, short
/// sample lists). Called by run_experiment before any work starts.
void preflight(const ExperimentConfig& config, const Assets& assets);

/// Performance phase, threshold derivation and attack phase for every
/// system. Output is independent of config.threads.
ReportBundle run_experiment(const ExperimentConfig& config, const Assets& assets);

/// Generates or loads the assets named by `config`, then runs.
ReportBundle run_experiment(const ExperimentConfig& config);

/// Writes the bundle into `dir` via a staging directory, so a failed write
/// leaves no partial report. An existing report in `dir` is replaced; any
/// other non-empty directory is refused.
void write_report(const ReportBundle& bundle, const std::filesystem::path& dir);

/// "0.1" for 0.001: the target FMR in percent as used in file names.
std::string percent_label(double fraction);

}  // namespace otb
