// Counter-based deterministic random generator. Every draw is a pure
// function of (seed, stream, counters), so independent streams (e.g. batch
// sampling vs. noise) never perturb each other.
#pragma once

#include <cmath>
#include <cstdint>

namespace secretprot {

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive(std::uint64_t seed, std::uint64_t stream,
                            std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ stream);
  h = mix64(h ^ a);
  return mix64(h ^ b);
}

// uniform in [0, 1)
inline double unit_double(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double counter_uniform(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t a, std::uint64_t b = 0) {
  return unit_double(derive(seed, stream, a, b));
}

// standard normal via Box-Muller from two derived uniforms
inline double counter_gaussian(std::uint64_t seed, std::uint64_t stream,
                               std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t h = derive(seed, stream, a, b);
  double u1 = (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
  double u2 = unit_double(mix64(h));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

// Sequential stream for consumers that just need a cheap reproducible
// sequence (attack trials, data generation shuffles).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix64(mix64(seed) ^ stream)) {}

  std::uint64_t next() { return mix64(key_ + ++ctr_); }
  double uniform() { return unit_double(next()); }
  double gaussian() {
    std::uint64_t h = next();
    double u1 = (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;
    double u2 = unit_double(next());
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }
  // integer in [0, n)
  std::uint64_t below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

}  // namespace secretprot
