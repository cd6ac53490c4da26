#pragma once

#include <cstdint>
#include <random>

namespace dra {

// Deterministic RNG with platform-independent uniform draws. The standard
// distributions are implementation-defined, so we derive doubles and bounded
// integers from the raw mt19937_64 stream ourselves.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, bound), rejection-sampled to avoid modulo bias.
  std::uint64_t uniform_int(std::uint64_t bound) {
    if (bound == 0) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  // Derive an independent stream, e.g. one per trial or per link.
  Rng fork(std::uint64_t salt) const {
    std::uint64_t s = seed_mix_ ^ (salt * 0x9e3779b97f4a7c15ULL);
    s ^= s >> 30;
    s *= 0xbf58476d1ce4e5b9ULL;
    s ^= s >> 27;
    return Rng(s ? s : 1);
  }

  void note_seed(std::uint64_t seed) { seed_mix_ = seed; }

  static Rng seeded(std::uint64_t seed) {
    Rng r(seed);
    r.note_seed(seed);
    return r;
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_mix_ = 0;
};

}  // namespace dra
