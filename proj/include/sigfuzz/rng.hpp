#pragma once

#include <cstdint>
#include <cstddef>

namespace sigfuzz {

// splitmix64: tiny, fast, identical output on every platform. We avoid
// <random> distributions because their output is implementation-defined
// and campaign reproducibility depends on the exact byte stream.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0x9e3779b97f4a7c15ull) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n). n == 0 returns 0.
  uint64_t below(uint64_t n) {
    if (n == 0) return 0;
    // Lemire's multiply-shift with rejection for exact uniformity.
    uint64_t x = next();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    uint64_t lo = static_cast<uint64_t>(m);
    if (lo < n) {
      uint64_t t = (0 - n) % n;
      while (lo < t) {
        x = next();
        m = static_cast<__uint128_t>(x) * n;
        lo = static_cast<uint64_t>(m);
      }
    }
    return static_cast<uint64_t>(m >> 64);
  }

  // Uniform in [lo, hi] inclusive.
  int64_t range_i64(int64_t lo, int64_t hi) {
    if (hi <= lo) return lo;
    uint64_t span = static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo) + 1;
    if (span == 0) return static_cast<int64_t>(next());  // full 64-bit range
    return lo + static_cast<int64_t>(below(span));
  }

  // Uniform double in [0, 1).
  double unit() { return (next() >> 11) * 0x1.0p-53; }

  double range_f64(double lo, double hi) {
    if (!(hi > lo)) return lo;
    return lo + unit() * (hi - lo);
  }

  bool chance(double p) { return unit() < p; }

  // Derive an independent stream, e.g. one per worker.
  Rng split(uint64_t salt) {
    Rng r(state_ ^ (salt * 0xff51afd7ed558ccdull + 0x2545f4914f6cdd1dull));
    r.next();
    return r;
  }

 private:
  uint64_t state_;
};

}  // namespace sigfuzz
