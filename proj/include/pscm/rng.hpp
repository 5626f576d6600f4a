#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace pscm {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Stable per-task seed derivation: hash the master seed with one or two
// stream indices so independent tasks never share an engine state.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(splitmix64(master ^ 0x5851f42d4c957f2dull) ^ splitmix64(a + 0x9e3779b97f4a7c15ull * (b + 1)));
}

// Wrapper over std::mt19937_64 with hand-rolled value mappings. The std
// distribution objects are implementation defined, and outputs here must be
// bit-identical across platforms for a fixed seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform on [0,1) with 53-bit resolution.
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  // Uniform magnitude on [lo,hi] with a random sign.
  double signed_coefficient(double lo, double hi) {
    double mag = uniform(lo, hi);
    return (eng_() & 1ull) ? mag : -mag;
  }

  bool bernoulli(double prob) { return unit() < prob; }

  // Uniform integer on [0,n). Rejection-free modulo bias is negligible for
  // the small n used here, but do it properly anyway.
  int uniform_int(int n) {
    if (n <= 1) return 0;
    std::uint64_t bound = static_cast<std::uint64_t>(n);
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
      v = eng_();
    } while (v >= limit);
    return static_cast<int>(v % bound);
  }

  // Box-Muller, caching the second variate.
  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1, u2;
    do {
      u1 = unit();
    } while (u1 <= 0.0);
    u2 = unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  // Standard Laplace via inverse CDF.
  double laplace() {
    double u = unit() - 0.5;
    return (u < 0.0 ? 1.0 : -1.0) * std::log(1.0 - 2.0 * std::fabs(u));
  }

  // Fisher-Yates permutation of 0..n-1.
  std::vector<int> permutation(int n) {
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int i = n - 1; i > 0; --i) {
      int j = uniform_int(i + 1);
      std::swap(perm[i], perm[j]);
    }
    return perm;
  }

 private:
  std::mt19937_64 eng_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace pscm
