#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace damcc {

/// Seedable random stream built on std::mt19937_64.
///
/// The engine's output sequence is fixed by the C++ standard, but the
/// standard distributions are not, so every draw goes through the helpers
/// below. Runs are therefore reproducible across compilers and platforms.
class Rng {
public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform double in the open interval (0, 1).
  double uniform_open() {
    double u = 0.0;
    while (u == 0.0) u = uniform();
    return u;
  }

  /// Uniform integer in [0, n). Unbiased (rejection sampling). n must be > 0.
  std::uint64_t uniform_int(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

  /// `k` distinct values from [0, n) in draw order (partial Fisher-Yates).
  std::vector<std::uint32_t> sample_without_replacement(std::uint32_t n, std::uint32_t k);

  /// Child stream whose seed is a hash of this stream's seed and `name`.
  /// Does not advance this stream.
  Rng split(std::string_view name, std::uint64_t index = 0) const;

private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed of the named sub-stream `name`/`index` under `master`.
std::uint64_t derive_seed(std::uint64_t master, std::string_view name, std::uint64_t index = 0);

}  // namespace damcc
