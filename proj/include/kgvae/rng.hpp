#pragma once

#include <cstdint>
#include <random>

namespace kgvae {

/// Seeded random stream with a fixed, documented algorithm.
///
/// The engine is std::mt19937_64 (its output sequence is fixed by the
/// standard). Uniform and normal variates are derived here rather than
/// through <random> distributions, whose algorithms vary between standard
/// libraries:
///   uniform  = (x >> 11) * 2^-53            in [0, 1)
///   normal   = Box-Muller on two uniforms, one variate per call
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [lo, hi] (inclusive), by rejection.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  double normal();

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used to derive independent sub-stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Named sub-streams split off one run seed.
enum class Stream : std::uint64_t {
  kInit = 1,
  kReparam = 2,
  kShuffle = 3,
  kGenerate = 4,
  kSplit = 5,
  kCorpus = 6,
};

inline Rng make_stream(std::uint64_t seed, Stream s) {
  return Rng(mix_seed(seed, static_cast<std::uint64_t>(s)));
}

}  // namespace kgvae
