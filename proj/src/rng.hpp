#pragma once

#include <cstdint>

namespace semwire {

// Counter-based pseudo-random generator. Every draw is a pure hash of
// (seed, stream, counter), so draws can be made in any order, in parallel,
// and reproduce bit-identically on any platform. Streams separate
// independent consumers (e.g. semantic vs. random masking); counters index
// draws within a stream (e.g. the patch index).
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed) : seed_(seed) {}

  uint64_t seed() const { return seed_; }

  uint64_t bits(uint64_t stream, uint64_t counter) const {
    uint64_t z = mix(seed_ ^ (kGolden * (stream + 1)));
    return mix(z + kGolden * counter);
  }

  // Uniform in [0, 1) with 53 significant bits.
  double uniform01(uint64_t stream, uint64_t counter) const {
    return static_cast<double>(bits(stream, counter) >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, n). Uses a 128-bit multiply; the residual bias is
  // below 2^-64 and irrelevant for grid-sized n.
  uint64_t bounded(uint64_t stream, uint64_t counter, uint64_t n) const {
    using u128 = unsigned __int128;
    return static_cast<uint64_t>((u128(bits(stream, counter)) * u128(n)) >> 64);
  }

 private:
  // SplitMix64 finalizer.
  static uint64_t mix(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  static constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ull;

  uint64_t seed_;
};

}  // namespace semwire
