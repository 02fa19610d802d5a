#include <fstream>
#include <system_error>

#include <fmt/format.h>

#include "otbmorph/experiment.hpp"

namespace otb {
namespace {

class Csv {
 public:
  Csv(const std::filesystem::path& path, std::string_view header) : path_(path), out_(path) {
    if (!out_) throw Error(fmt::format("{}: cannot write", path.string()));
    out_ << header << '\n';
  }
  template <typename... Args>
  void row(fmt::format_string<Args...> f, Args&&... args) {
    out_ << fmt::format(f, std::forward<Args>(args)...) << '\n';
  }
  ~Csv() noexcept(false) {
    out_.flush();
    if (!out_ && std::uncaught_exceptions() == 0) throw Error(fmt::format("{}: write failed", path_.string()));
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

void write_summary(const std::filesystem::path& path, const ReportBundle& bundle,
                   const AttackSummary& (*pick)(const SystemResult&, std::size_t), std::size_t index,
                   bool mean) {
  Csv csv(path, mean ? "system,attempt,mean_score" : "system,attempt,cumulative_chance");
  for (const auto& s : bundle.systems) {
    const AttackSummary& summary = pick(s, index);
    const auto& values = mean ? summary.mean_scores : summary.cumulative_chance;
    for (std::size_t t = 0; t < values.size(); ++t) csv.row("{},{},{}", s.spec.label(), t, values[t]);
  }
}

void write_files(const ReportBundle& bundle, const std::filesystem::path& dir) {
  {
    Csv csv(dir / "table1.csv", "system,strategy,eer_pct,target_fmr_pct,fnmr_pct,threshold,asr_pct");
    for (const auto& s : bundle.systems) {
      const auto system = s.spec.strategy ? "OTB-morph" : "unprotected";
      const auto strategy = s.spec.strategy ? s.spec.label() : "-";
      for (const auto& r : s.rows) {
        csv.row("{},{},{:.2f},{:.4f},{:.2f},{:.4f},{:.2f}", system, strategy, 100 * s.eer.eer, 100 * r.target_fmr,
                100 * r.fnmr, r.threshold, 100 * r.asr);
      }
    }
  }
  {
    Csv csv(dir / "operating_points.csv", "system,kind,target_fmr,threshold,fmr,fnmr,asr");
    for (const auto& s : bundle.systems) {
      csv.row("{},eer,,{},{},{},{}", s.spec.label(), s.eer.point.threshold, s.eer.point.fmr, s.eer.point.fnmr,
              s.asr_at_eer);
      for (const auto& r : s.rows) {
        csv.row("{},target,{},{},{},{},{}", s.spec.label(), r.target_fmr, r.threshold, r.fmr, r.fnmr, r.asr);
      }
    }
  }
  const auto at_eer = [](const SystemResult& s, std::size_t) -> const AttackSummary& { return s.at_eer; };
  const auto at_target = [](const SystemResult& s, std::size_t i) -> const AttackSummary& { return s.at_target[i]; };
  write_summary(dir / "mean_scores.csv", bundle, at_eer, 0, true);
  write_summary(dir / "cumulative_eer.csv", bundle, at_eer, 0, false);
  const auto& first = bundle.systems.front();
  for (std::size_t i = 0; i < first.rows.size(); ++i) {
    write_summary(dir / fmt::format("cumulative_fmr_{}pct.csv", percent_label(first.rows[i].target_fmr)), bundle,
                  at_target, i, false);
  }
  {
    Csv csv(dir / "det.csv", "system,threshold,fmr,fnmr");
    for (const auto& s : bundle.systems) {
      for (const auto& p : det_points(s.scores)) csv.row("{},{},{},{}", s.spec.label(), p.threshold, p.fmr, p.fnmr);
    }
  }
  for (const auto& s : bundle.systems) {
    Csv csv(dir / fmt::format("scores_{}.csv", s.spec.label()), "label,score");
    for (double v : s.scores.mated) csv.row("mated,{}", v);
    for (double v : s.scores.nonmated) csv.row("nonmated,{}", v);
  }
  {
    Csv csv(dir / "attack_scores.csv", "system,victim,attempt,score,key_id");
    for (const auto& s : bundle.systems) {
      for (std::size_t v = 0; v < s.trajectories.size(); ++v) {
        for (const auto& o : s.trajectories[v].outcomes) {
          csv.row("{},{},{},{},{}", s.spec.label(), bundle.victim_ids[v], o.attempt_index, o.score.value,
                  o.key_id.value_or(""));
        }
      }
    }
  }
  std::ofstream manifest(dir / "manifest.json");
  manifest << bundle.manifest.dump(2) << '\n';
  if (!manifest) throw Error(fmt::format("{}: write failed", (dir / "manifest.json").string()));
}

}  // namespace

void write_report(const ReportBundle& bundle, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (bundle.systems.empty()) throw Error("empty report bundle");
  fs::path target = fs::absolute(dir).lexically_normal();
  if (target.filename().empty()) target = target.parent_path();
  if (fs::exists(target) && !fs::is_empty(target) && !fs::exists(target / "manifest.json")) {
    throw Error(fmt::format("{}: exists and does not hold a previous report; refusing to overwrite", dir.string()));
  }
  fs::create_directories(target.parent_path());
  const fs::path staging = target.parent_path() / fmt::format(".{}.staging", target.filename().string());
  fs::remove_all(staging);
  fs::create_directories(staging);
  try {
    write_files(bundle, staging);
    fs::remove_all(target);
    fs::rename(staging, target);
  } catch (...) {
    std::error_code ignored;
    fs::remove_all(staging, ignored);
    throw;
  }
}

}  // namespace otb
