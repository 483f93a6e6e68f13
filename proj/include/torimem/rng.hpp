#pragma once

#include <cstdint>
#include <random>

namespace torimem {

// SplitMix64 finalizer, used to scramble seeds and derive per-trajectory
// streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stream seed for trajectory `index`: master seed XORed with the scrambled
// index, scrambled again. Streams for distinct indices are decorrelated for
// any master seed, and the derivation does not depend on worker scheduling.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 1));
}

// mt19937_64 with fully specified draw helpers. The engine sequence is
// pinned by the standard and the helpers avoid std::uniform_*_distribution,
// whose output is implementation-defined, so identical seeds reproduce
// identical trajectories everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // uniform in [0, 1), 53-bit resolution
  double next_double() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // uniform integer in [0, n) via the multiply-shift map (bias < n / 2^64)
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(gen_()) * n) >> 64);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace torimem
