// Copyright (c) 2026 the floq authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace floq {

/**
 * Deterministic random stream.
 *
 * Wraps std::mt19937_64 (whose output sequence is pinned by the standard)
 * and derives all variates from raw 64-bit draws, so identical seeds give
 * identical streams on every platform and toolchain.  The library never
 * uses std::uniform_real_distribution / std::normal_distribution, whose
 * outputs are implementation-defined.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform double in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Rejection sampling, unbiased.
  std::uint64_t uniform_int(std::uint64_t n) {
    // Largest multiple of n that fits in 64 bits.
    const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
    std::uint64_t x;
    do {
      x = eng_();
    } while (x >= limit);
    return x % n;
  }

  /// Standard normal via Box-Muller (pair cached).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::complex<double> gaussian_complex() {
    const double re = normal();
    const double im = normal();
    return {re, im};
  }

  /// Uniform random permutation of {0, .., n-1} (Fisher-Yates).
  std::vector<int> permutation(int n) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    shuffle(p);
    return p;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// One round of the splitmix64 mixing function.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/**
 * Derive an independent stream seed from a master seed and up to two
 * indices (grid point, trajectory).  Each argument passes through a full
 * splitmix64 round, so nearby (master, a, b) triples map to well-separated
 * seeds and collisions are not realizable at practical index ranges.
 */
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ (0x9e3779b97f4a7c15ULL * (a + 1)));
  h = splitmix64(h ^ (0xc2b2ae3d27d4eb4fULL * (b + 1)));
  return h;
}

}  // namespace floq
