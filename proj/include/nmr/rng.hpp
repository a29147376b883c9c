#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

// Seedable, splittable random source with the generation algorithms pinned
// in this header (xoshiro256++ over a splitmix64-expanded seed, Box-Muller
// normals), so streams are reproducible independent of the standard
// library's distribution implementations.

namespace nmr {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : s_) w = splitmix64(x);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Standard normal via Box-Muller; the paired draw is cached.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  std::vector<double> normal_vector(int d) {
    std::vector<double> v(static_cast<std::size_t>(d));
    for (auto& c : v) c = normal();
    return v;
  }

  // Uniform on the unit sphere: normalized vector of independent normals.
  std::vector<double> unit_sphere(int d) {
    std::vector<double> v = normal_vector(d);
    double n = 0.0;
    for (double c : v) n += c * c;
    n = std::sqrt(n);
    if (n == 0.0) {
      v[0] = 1.0;
      return v;
    }
    for (auto& c : v) c /= n;
    return v;
  }

  // Independent child stream.
  Rng split() { return Rng(next_u64() ^ 0x9e3779b97f4a7c15ull); }

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
    return splitmix64(x);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t s_[4];
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace nmr
