#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace otb {

/// Seeded generator with platform-independent derived distributions.
///
/// std::normal_distribution and friends are implementation-defined, so the
/// draws below are built directly on mt19937_64 output to keep runs
/// bit-reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform01();

  /// Uniform integer in [0, n); n must be > 0. Unbiased (rejection).
  std::size_t uniform_index(std::size_t n);

  /// Standard normal via Box-Muller; consumes exactly two u64 per call.
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// 64-bit FNV-1a over the bytes of `text`.
std::uint64_t fnv1a64(std::string_view text);

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for a named task: splitmix64(master ^ fnv1a64(label)).
/// Pure; independent of the order in which tasks run.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view task_label);

}  // namespace otb
