#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "doctest.h"
#include "oracles.hpp"
#include "otbmorph/keysel.hpp"
#include "otbmorph/random.hpp"

using namespace otb;

namespace {

Embedding unit(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  for (double& x : v) x = rng.normal();
  return l2_normalize(v);
}

KeyPool random_pool(Rng& rng, std::size_t size, std::size_t dim, double share_a = 0.5) {
  std::vector<KeyPoolEntry> entries;
  for (std::size_t i = 0; i < size; ++i) {
    auto e = unit(rng, dim);
    const auto values = std::vector<double>(e.values().begin(), e.values().end());
    entries.push_back({"k" + std::to_string(i), {"k" + std::to_string(i), ParametricFace{values}}, std::move(e),
                       rng.uniform01() < share_a ? Group::A : Group::B});
  }
  return KeyPool(std::move(entries));
}

KeyPoolEntry entry(const std::string& id, std::vector<double> v, Group g) {
  return {id, {id, ParametricFace{v}}, l2_normalize(v), g};
}

std::filesystem::path write_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("otbmorph_keysel_" + name);
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("strategy names round-trip") {
  for (KeyStrategy s : kAllStrategies) CHECK(parse_strategy(to_string(s)) == s);
  CHECK(to_string(KeyStrategy::SFDistance) == "SFdistance_key");
  CHECK_THROWS_AS(parse_strategy("distance_key"), ConfigError);
  CHECK(is_cross_group(KeyStrategy::SFRandom));
  CHECK_FALSE(is_cross_group(KeyStrategy::Distance));
  CHECK(parse_group("B") == Group::B);
  CHECK_THROWS_AS(parse_group("male"), Error);
}

TEST_CASE("pool ids are unique and groups counted") {
  std::vector<KeyPoolEntry> entries{entry("x", {1, 0}, Group::A), entry("y", {0, 1}, Group::B),
                                    entry("z", {1, 1}, Group::A)};
  const KeyPool pool(entries);
  CHECK(pool.count(Group::A) == 2);
  CHECK(pool.count(Group::B) == 1);
  entries.push_back(entry("x", {1, 2}, Group::B));
  CHECK_THROWS_AS(KeyPool{entries}, Error);
}

TEST_CASE("distance strategies pick the farthest key") {
  const KeyPool pool({entry("near", {1, 0.1}, Group::B), entry("far", {-1, 0}, Group::A),
                      entry("mid", {0, 1}, Group::B)});
  Rng rng(1);
  const auto anchor = l2_normalize(std::vector<double>{1, 0});
  CHECK(select_key(KeyStrategy::Distance, anchor, Group::A, pool, rng).id == "far");
  CHECK(select_key(KeyStrategy::SFDistance, anchor, Group::A, pool, rng).id == "mid");
  CHECK(select_key(KeyStrategy::SFDistance, anchor, Group::B, pool, rng).id == "far");
}

TEST_CASE("distance ties go to the smallest id") {
  const KeyPool pool({entry("k2", {0, 1}, Group::B), entry("k1", {0, -1}, Group::B), entry("k3", {1, 0}, Group::B)});
  Rng rng(1);
  const auto anchor = l2_normalize(std::vector<double>{1, 0});
  CHECK(select_key(KeyStrategy::Distance, anchor, Group::A, pool, rng).id == "k1");
}

TEST_CASE("distance strategies match the linear scan oracle") {
  Rng rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t dim = 2 + rng.uniform_index(63);
    const auto pool = random_pool(rng, 1 + rng.uniform_index(2000), dim);
    for (int q = 0; q < 5; ++q) {
      const auto anchor = unit(rng, dim);
      const Group g = rng.uniform01() < 0.5 ? Group::A : Group::B;
      REQUIRE(&select_key(KeyStrategy::Distance, anchor, g, pool, rng) == oracle::farthest(pool, anchor, {}));
      if (pool.count(opposite(g)) > 0) {
        REQUIRE(&select_key(KeyStrategy::SFDistance, anchor, g, pool, rng) ==
                oracle::farthest(pool, anchor, opposite(g)));
      }
    }
  }
}

TEST_CASE("distance strategies draw nothing from the generator") {
  Rng rng(5), twin(5);
  const auto pool = random_pool(rng, 50, 8);
  Rng used(9), fresh(9);
  const auto anchor = unit(twin, 8);
  select_key(KeyStrategy::Distance, anchor, Group::A, pool, used);
  select_key(KeyStrategy::SFDistance, anchor, Group::A, pool, used);
  CHECK(used.next_u64() == fresh.next_u64());
}

TEST_CASE("random strategies consume one index draw") {
  Rng rng(5);
  const auto pool = random_pool(rng, 50, 8);
  const auto anchor = unit(rng, 8);
  Rng used(9), twin(9);
  const auto& picked = select_key(KeyStrategy::Random, anchor, Group::A, pool, used);
  CHECK(&picked == &pool.entries()[twin.uniform_index(pool.size())]);
  CHECK(used.next_u64() == twin.next_u64());
}

TEST_CASE("cross-group strategies never return the anchor's group") {
  Rng rng(77);
  const auto pool = random_pool(rng, 300, 6, 0.8);
  for (int i = 0; i < 5000; ++i) {
    const Group g = i % 2 == 0 ? Group::A : Group::B;
    const auto anchor = unit(rng, 6);
    REQUIRE(select_key(KeyStrategy::SFRandom, anchor, g, pool, rng).group == opposite(g));
    REQUIRE(select_key(KeyStrategy::SFDistance, anchor, g, pool, rng).group == opposite(g));
  }
}

TEST_CASE("random key draws are uniform") {
  Rng rng(3);
  const auto pool = random_pool(rng, 10, 4);
  const auto anchor = unit(rng, 4);
  std::map<std::string, int> hits;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++hits[select_key(KeyStrategy::Random, anchor, Group::A, pool, rng).id];
  double chi2 = 0.0;
  const double expected = draws / 10.0;
  for (const auto& e : pool.entries()) chi2 += (hits[e.id] - expected) * (hits[e.id] - expected) / expected;
  CHECK(chi2 < 27.88);  // chi-square, 9 degrees of freedom, p = 0.001
}

TEST_CASE("SFrandom draws are uniform over the opposite group") {
  Rng rng(4);
  const auto pool = random_pool(rng, 40, 4);
  const auto anchor = unit(rng, 4);
  const std::size_t cohort = pool.count(Group::B);
  std::map<std::string, int> hits;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++hits[select_key(KeyStrategy::SFRandom, anchor, Group::A, pool, rng).id];
  CHECK(hits.size() == cohort);
  double chi2 = 0.0;
  const double expected = static_cast<double>(draws) / static_cast<double>(cohort);
  for (const auto& [id, n] : hits) chi2 += (n - expected) * (n - expected) / expected;
  // Upper p = 0.001 quantile for up to 40 degrees of freedom.
  CHECK(chi2 < 73.4);
}

TEST_CASE("empty pools and cohorts raise EmptyCohortError") {
  Rng rng(1);
  const auto anchor = l2_normalize(std::vector<double>{1, 0});
  const KeyPool empty;
  for (KeyStrategy s : kAllStrategies) CHECK_THROWS_AS(select_key(s, anchor, Group::A, empty, rng), EmptyCohortError);
  const KeyPool only_a({entry("a1", {1, 0}, Group::A), entry("a2", {0, 1}, Group::A)});
  CHECK_THROWS_AS(select_key(KeyStrategy::SFDistance, anchor, Group::A, only_a, rng), EmptyCohortError);
  CHECK_THROWS_AS(select_key(KeyStrategy::SFRandom, anchor, Group::A, only_a, rng), EmptyCohortError);
  CHECK(select_key(KeyStrategy::SFRandom, anchor, Group::B, only_a, rng).group == Group::A);
  CHECK_NOTHROW(select_key(KeyStrategy::Distance, anchor, Group::A, only_a, rng));
}

TEST_CASE("key pool manifests load") {
  const auto path = write_file("ok.jsonl",
                               "{\"id\": \"k1\", \"group\": \"A\", \"vector\": [3, 4]}\n"
                               "\n"
                               "{\"id\": \"k2\", \"group\": \"B\", \"vector\": [0, 2], \"face\": [1, 2, 3]}\n");
  const auto pool = load_key_pool(path, 2);
  REQUIRE(pool.size() == 2);
  CHECK(pool.entries()[0].embedding[0] == doctest::Approx(0.6));
  CHECK(std::get<ParametricFace>(pool.entries()[0].face.repr).params == std::vector<double>{3, 4});
  CHECK(std::get<ParametricFace>(pool.entries()[1].face.repr).params == std::vector<double>{1, 2, 3});
  CHECK(pool.count(Group::B) == 1);
}

TEST_CASE("key pool errors name file, line and id") {
  auto message = [](const std::string& name, const std::string& text) {
    try {
      load_key_pool(write_file(name, text), 2);
    } catch (const LoadError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  const auto dim = message("dim.jsonl",
                           "{\"id\": \"k1\", \"group\": \"A\", \"vector\": [3, 4]}\n"
                           "{\"id\": \"odd\", \"group\": \"A\", \"vector\": [3, 4, 5]}\n");
  CHECK(dim.find("dim.jsonl:2") != std::string::npos);
  CHECK(dim.find("'odd'") != std::string::npos);
  CHECK(message("json.jsonl", "{\"id\": \"k1\", \"group\":").find("json.jsonl:1") != std::string::npos);
  CHECK(message("dup.jsonl",
                "{\"id\": \"k\", \"group\": \"A\", \"vector\": [1, 0]}\n"
                "{\"id\": \"k\", \"group\": \"B\", \"vector\": [0, 1]}\n")
            .find("duplicate") != std::string::npos);
  CHECK(message("group.jsonl", "{\"id\": \"k\", \"group\": \"C\", \"vector\": [1, 0]}\n").find("group") !=
        std::string::npos);
  CHECK(message("zero.jsonl", "{\"id\": \"k\", \"group\": \"A\", \"vector\": [0, 0]}\n") != "no error");
  CHECK_THROWS_AS(load_key_pool("/nonexistent/pool.jsonl", 2), LoadError);
}
