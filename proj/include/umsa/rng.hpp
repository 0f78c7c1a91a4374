#pragma once

#include <array>
#include <cstdint>
#include <random>

namespace umsa {

/// Random stream owned by one chain or replicate.
///
/// Draws are deterministic given the seed words and the order of calls; the
/// kernels rely on this to reproduce paths bit-for-bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : Rng(seed, 0) {}

  Rng(std::uint64_t seed, std::uint64_t stream) : seed_{seed}, stream_{stream} {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  /// Independent stream derived from this one's seed material; does not
  /// advance this stream.
  [[nodiscard]] Rng split(std::uint64_t tag) const {
    return Rng{seed_ ^ mix(tag + 0x9e3779b97f4a7c15ULL), mix(stream_ ^ tag)};
  }

  std::mt19937_64& engine() { return engine_; }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Per-replicate stream assignment: replicate i always gets the same stream.
struct SeedPlan {
  std::uint64_t master_seed = 0;

  [[nodiscard]] Rng stream(std::uint64_t replicate_id) const { return Rng{master_seed, replicate_id + 1}; }

  /// Seed for a nested experiment (e.g. repetition r of grid point M).
  [[nodiscard]] std::uint64_t child_seed(std::uint64_t a, std::uint64_t b = 0) const {
    return Rng::mix(master_seed ^ Rng::mix(a ^ Rng::mix(b + 0x632be59bd9b4e019ULL)));
  }
};

}  // namespace umsa
