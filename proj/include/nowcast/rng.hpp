#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace nowcast {

// Deterministic RNG wrapper. Uniform and normal draws are derived from raw
// mt19937_64 words instead of std::*_distribution, so sequences are stable
// across standard-library implementations and the full state round-trips
// through a checkpoint as a single string.
class Rng {
 public:
  Rng() : engine_(0x9e3779b97f4a7c15ULL) {}
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Integer in [0, n).
  uint64_t below(uint64_t n) { return n ? engine_() % n : 0; }

  // Standard normal via Box-Muller. No cached spare, so the engine state is
  // the whole state.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  std::string state() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
  }

  void set_state(const std::string& s) {
    std::istringstream is(s);
    is >> engine_;
  }

 private:
  std::mt19937_64 engine_;
};

// Mixes a base seed with stream identifiers so derived streams are
// independent and reproducible regardless of evaluation order.
inline uint64_t mix_seed(uint64_t a, uint64_t b = 0, uint64_t c = 0) {
  uint64_t x = a * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL;
  x ^= b + 0x9e3779b97f4a7c15ULL + (x << 6) + (x >> 2);
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= c + 0x94d049bb133111ebULL + (x << 13) + (x >> 7);
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

}  // namespace nowcast
