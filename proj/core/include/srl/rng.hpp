#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace srl {

// Deterministic xoshiro256** stream seeded via splitmix64. All randomness in
// the project flows through this type so identical seeds reproduce identical
// artifacts byte for byte, independent of libstdc++ distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : s_) w = splitmix64(x);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Index sampled from an (approximately normalized) probability row.
  // Residual rounding mass falls on the last positive entry.
  std::size_t categorical(std::span<const double> probs) {
    double u = uniform01();
    std::size_t last_positive = 0;
    bool any = false;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] > 0.0) {
        last_positive = i;
        any = true;
      }
      u -= probs[i];
      if (u < 0.0) return i;
    }
    if (!any) throw std::invalid_argument("categorical: all-zero probability row");
    return last_positive;
  }

  std::size_t categorical(const std::vector<double>& probs) {
    return categorical(std::span<const double>(probs));
  }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = 0.0;
    while (u1 <= 1e-300) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

  // Independent child stream; used to fan out per-episode streams.
  Rng fork(std::uint64_t stream) {
    std::uint64_t x = next() ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    return Rng(x);
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

  std::uint64_t s_[4];
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace srl
