#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace axb {

// Deterministic random source shared by generators and solvers.
//
// The integer stream is std::mt19937_64, whose output is pinned by the
// standard, so equal seeds give identical streams on every platform. Gaussians
// use a fixed Box-Muller transform over that stream rather than
// std::normal_distribution (whose algorithm is implementation-defined).
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double next_unit() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller on (u1, u2); u1 is shifted into (0, 1]
  // so log(u1) is finite. The second variate of each pair is cached.
  double next_gaussian() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
    double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.14159265358979323846 * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 gen_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace axb
