#pragma once

// Seeded randomness with portable output. std::mt19937_64 is fully specified
// by the standard, but the std::*_distribution adaptors are not, so every
// transform used by the simulation is written out here. All randomness in a
// world or training run flows through one of these objects.

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <vector>

namespace skirmish {

class Rng {
 public:
  Rng() : engine_(0x9e3779b97f4a7c15ull) {}
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). Multiply-shift mapping; the modulo bias of the
  // naive approach is avoided entirely.
  std::uint64_t uniform_index(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<__uint128_t>(next_u64()) * static_cast<__uint128_t>(n)) >> 64);
  }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(uniform_index(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller. The second value of each pair is cached,
  // which makes the draw order part of the generator state.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    // Guard against log(0).
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Fisher-Yates; std::shuffle is implementation-defined.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_index(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Derive an independent stream (for per-env / per-episode seeding).
  std::uint64_t derive(std::uint64_t salt) {
    std::uint64_t z = salt + 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31) ^ next_u64();
  }

  friend std::ostream& operator<<(std::ostream& os, const Rng& r) {
    os << r.engine_ << ' ' << (r.has_spare_ ? 1 : 0);
    if (r.has_spare_) {
      os << ' ';
      os.precision(17);
      os << r.spare_;
    }
    return os;
  }
  friend std::istream& operator>>(std::istream& is, Rng& r) {
    int spare_flag = 0;
    is >> r.engine_ >> spare_flag;
    r.has_spare_ = spare_flag != 0;
    r.spare_ = 0.0;
    if (r.has_spare_) is >> r.spare_;
    return is;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Stateless mix for deriving episode seeds from (base seed, index).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed ^ (0x9e3779b97f4a7c15ull * (index + 1));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace skirmish
