#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "stablescat/model.hpp"

namespace stablescat {

/// Philox4x32-10 block function.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t(kM0) * ctr[0];
    const std::uint64_t p1 = std::uint64_t(kM1) * ctr[2];
    ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1), std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1],
           std::uint32_t(p0)};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Counter-based stream keyed by (seed, tag) and positioned at a stream index.
/// Distinct (seed, tag, stream) triples give independent, reproducible sequences.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t tag = 0) {
    const std::uint64_t k = splitmix64(seed ^ splitmix64(tag + 0x5851F42D4C957F2Dull));
    key_ = {std::uint32_t(k), std::uint32_t(k >> 32)};
    stream_ = stream;
  }

  std::uint32_t next_u32() {
    if (pos_ == 4) refill();
    return buf_[pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  /// Uniform on the open interval (0,1) with 53-bit resolution.
  double uniform() { return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform(), u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 6.283185307179586476925 * u2;
    spare_ = r * std::sin(th);
    has_spare_ = true;
    return r * std::cos(th);
  }

  double exponential() { return -std::log(uniform()); }

  /// Marsaglia-Tsang gamma(shape, 1).
  double gamma(double shape) {
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double dd = shape - 1.0 / 3.0, c = 1.0 / std::sqrt(9.0 * dd);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return dd * v;
      if (std::log(u) < 0.5 * x * x + dd * (1.0 - v + std::log(v))) return dd * v;
    }
  }

  double beta(double a, double b) {
    const double x = gamma(a), y = gamma(b);
    return x / (x + y);
  }

  /// Count of events of a Poisson(mean) law (inversion for small means, normal-free
  /// multiplication method split into chunks for large means).
  std::uint64_t poisson(double mean) {
    std::uint64_t n = 0;
    while (mean > 20.0) {
      // split into independent Poisson(20) pieces
      n += poisson(20.0);
      mean -= 20.0;
    }
    const double limit = std::exp(-mean);
    double prod = uniform();
    while (prod > limit) {
      ++n;
      prod *= uniform();
    }
    return n;
  }

  /// Uniform direction on S^{d-1}.
  Point unit_vector(int d) {
    Point v{};
    double n2 = 0.0;
    do {
      n2 = 0.0;
      for (int i = 0; i < d; ++i) {
        v[i] = normal();
        n2 += v[i] * v[i];
      }
    } while (n2 < 1e-300);
    const double inv = 1.0 / std::sqrt(n2);
    for (int i = 0; i < d; ++i) v[i] *= inv;
    return v;
  }

  Point gaussian_vector(int d, double sd) {
    Point v{};
    for (int i = 0; i < d; ++i) v[i] = sd * normal();
    return v;
  }

 private:
  void refill() {
    buf_ = philox4x32({std::uint32_t(block_), std::uint32_t(block_ >> 32), std::uint32_t(stream_),
                       std::uint32_t(stream_ >> 32)},
                      key_);
    ++block_;
    pos_ = 0;
  }

  std::array<std::uint32_t, 2> key_{};
  std::uint64_t stream_ = 0;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace stablescat
