#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "doctest.h"
#include "oracles.hpp"
#include "otbmorph/experiment.hpp"
#include "otbmorph/image_io.hpp"

using namespace otb;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = OTB_FIXTURE_DIR;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("otbmorph_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int cli(const std::string& args, const fs::path& log) {
  const auto cmd = fmt::format("\"{}\" {} > \"{}\" 2>&1", OTB_CLI_PATH, args, log.string());
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_small_config(const fs::path& path) {
  std::ofstream(path) << R"({"identity_count": 6, "samples_per_identity": 10, "performance_samples": 4,
    "attack_references": 3, "attack_probes": 3, "key_pool_size": 40, "target_fmrs": [0.1, 0.5],
    "attack": {"budget": 5}})";
}

}  // namespace

TEST_CASE("gen then an ingested run reproduces the synthetic report") {
  const auto dir = scratch("roundtrip");
  write_small_config(dir / "small.json");
  REQUIRE(cli(fmt::format("gen --config \"{}\" --seed 11 --out \"{}\"", (dir / "small.json").string(),
                          (dir / "assets").string()),
              dir / "gen.log") == 0);
  REQUIRE(cli(fmt::format("run --config \"{}\" --seed 11 --out \"{}\"", (dir / "small.json").string(),
                          (dir / "synthetic").string()),
              dir / "run1.log") == 0);
  REQUIRE(cli(fmt::format("run --config \"{}\" --out \"{}\"", (dir / "assets" / "config.json").string(),
                          (dir / "ingested").string()),
              dir / "run2.log") == 0);
  for (const char* f : {"table1.csv", "det.csv", "mean_scores.csv", "attack_scores.csv", "scores_Random_key.csv"}) {
    CHECK_MESSAGE(slurp(dir / "synthetic" / f) == slurp(dir / "ingested" / f), f);
  }
}

TEST_CASE("strategy and mode flags") {
  const auto dir = scratch("flags");
  write_small_config(dir / "small.json");
  const auto config = (dir / "small.json").string();
  REQUIRE(cli(fmt::format("run --config \"{}\" --strategy SFrandom_key,Distance_key --out \"{}\"", config,
                          (dir / "two").string()),
              dir / "a.log") == 0);
  const auto table = slurp(dir / "two" / "table1.csv");
  CHECK(table.find("SFrandom_key") != std::string::npos);
  CHECK(table.find(",Random_key,") == std::string::npos);
  CHECK(table.find("SFdistance_key") == std::string::npos);

  CHECK(cli(fmt::format("run --config \"{}\" --strategy Best_key --out \"{}\"", config, (dir / "x").string()),
            dir / "b.log") != 0);
  CHECK(slurp(dir / "b.log").find("Best_key") != std::string::npos);
  CHECK(cli(fmt::format("run --config \"{}\" --mode ingested --out \"{}\"", config, (dir / "x").string()),
            dir / "c.log") != 0);
  CHECK(!fs::exists(dir / "x"));
  CHECK(cli("frobnicate", dir / "d.log") != 0);
}

TEST_CASE("an empty cohort aborts without partial output") {
  const auto dir = scratch("cohort");
  CHECK(cli(fmt::format("run --config \"{}\" --out \"{}\"",
                        (kFixtures / "three_identities" / "config_only_a.json").string(), (dir / "out").string()),
            dir / "log") != 0);
  CHECK(slurp(dir / "log").find("SFdistance_key") != std::string::npos);
  CHECK(!fs::exists(dir / "out"));
}

TEST_CASE("metrics recomputes rates from a score file") {
  const auto dir = scratch("metrics");
  std::ofstream(dir / "scores.csv") << "label,score\nmated,0.1\nmated,0.3\nmated,0.5\n"
                                    << "nonmated,0.2\nnonmated,0.4\nnonmated,0.6\n";
  REQUIRE(cli(fmt::format("metrics \"{}\" --target-fmr 0.3333333333333333 --out \"{}\"",
                          (dir / "scores.csv").string(), (dir / "rates.csv").string()),
              dir / "log") == 0);
  CHECK(slurp(dir / "rates.csv") ==
        "mated,nonmated,eer_pct,eer_threshold,target_fmr_pct,fmr_pct,fnmr_pct,threshold\n"
        "3,3,33.33,0.3500,33.3333,33.3333,33.33,0.4000\n");

  std::ofstream(dir / "bad.csv") << "label,score\nmated,0.1\ngenuine,abc\n";
  CHECK(cli(fmt::format("metrics \"{}\"", (dir / "bad.csv").string()), dir / "bad.log") != 0);
  CHECK(slurp(dir / "bad.log").find("bad.csv:3") != std::string::npos);
}

TEST_CASE("morph writes the morphed image and its landmarks") {
  const auto dir = scratch("morph");
  const auto& fx = oracle::kGoldenFixtures[0];
  const auto a = oracle::face(fx.landmarks_a, fx.pixels_a);
  const auto b = oracle::face(fx.landmarks_b, fx.pixels_b);
  write_png(a.pixels, dir / "a.png");
  write_landmarks({"a", a.landmarks}, dir / "a.json");
  write_png(b.pixels, dir / "b.png");
  write_landmarks({"b", b.landmarks}, dir / "b_points.json");
  REQUIRE(cli(fmt::format("morph \"{}\" \"{}\" --key-landmarks \"{}\" --alpha 0.25 --out \"{}\"",
                          (dir / "a.png").string(), (dir / "b.png").string(), (dir / "b_points.json").string(),
                          (dir / "m.png").string()),
              dir / "log") == 0);
  const auto out = load_raster_face(dir / "m.png", dir / "m.json");
  CHECK(out.pixels == morph_raster(a, b, 0.25).pixels);
  CHECK(std::equal(fx.expected[1].begin(), fx.expected[1].end(), out.pixels.data().begin()));
  CHECK(cli(fmt::format("morph \"{}\" \"{}\" --alpha 2 --out \"{}\"", (dir / "a.png").string(),
                        (dir / "b.png").string(), (dir / "n.png").string()),
            dir / "log2") != 0);
}
