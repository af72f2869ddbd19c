#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace mcp {

// Philox4x32-10 counter-based generator (Random123 constants).
//
// Stream splitting rule: derive(master, a, b) feeds (master, a, b) through a
// SplitMix64 finalizer chain; the first output becomes the 64-bit Philox key,
// the second the high counter words.  Distinct (a, b) under one master seed
// therefore get distinct keys, so streams can be created per replicate (or per
// (cell, replicate) in sweeps) and consumed in any order without coupling.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key, std::uint64_t ctr_hi = 0) {
    key_[0] = static_cast<std::uint32_t>(key);
    key_[1] = static_cast<std::uint32_t>(key >> 32);
    ctr_[0] = 0;
    ctr_[1] = 0;
    ctr_[2] = static_cast<std::uint32_t>(ctr_hi);
    ctr_[3] = static_cast<std::uint32_t>(ctr_hi >> 32);
    idx_ = 4;
  }

  static std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

  static CounterRng derive(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t h = mix64(master);
    h = mix64(h ^ (a * 0xD6E8FEB86659FD93ull));
    std::uint64_t key = mix64(h ^ (b * 0xCA5A826395121157ull));
    std::uint64_t hi = mix64(key ^ 0xA0761D6478BD642Full);
    return CounterRng(key, hi);
  }

  // One Philox block: 4 output words from the current counter, then increment.
  void block(const std::uint32_t ctr_in[4], std::uint32_t out[4]) const {
    std::uint32_t c0 = ctr_in[0], c1 = ctr_in[1], c2 = ctr_in[2], c3 = ctr_in[3];
    std::uint32_t k0 = key_[0], k1 = key_[1];
    for (int r = 0; r < 10; ++r) {
      std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c0;
      std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c2;
      std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      std::uint32_t n0 = hi1 ^ c1 ^ k0;
      std::uint32_t n1 = lo1;
      std::uint32_t n2 = hi0 ^ c3 ^ k1;
      std::uint32_t n3 = lo0;
      c0 = n0;
      c1 = n1;
      c2 = n2;
      c3 = n3;
      if (r < 9) {
        k0 += kWeyl0;
        k1 += kWeyl1;
      }
    }
    out[0] = c0;
    out[1] = c1;
    out[2] = c2;
    out[3] = c3;
  }

  std::uint32_t next_u32() {
    if (idx_ == 4) {
      block(ctr_, buf_);
      // 128-bit counter increment; low words first.
      if (++ctr_[0] == 0 && ++ctr_[1] == 0 && ++ctr_[2] == 0) ++ctr_[3];
      idx_ = 0;
    }
    return buf_[idx_++];
  }

  std::uint64_t next_u64() {
    std::uint64_t lo = next_u32();
    std::uint64_t hi = next_u32();
    return lo | (hi << 32);
  }

  // [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double exponential(double rate) {
    // -log1p(-U) is exact near 0 and finite for U in [0,1).
    return -std::log1p(-uniform01()) / rate;
  }

  // Unbiased integer in [0, n) by rejection on the top of the 64-bit range.
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_below: n == 0");
    std::uint64_t limit = ~0ull - (~0ull % n);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  // Inversion sampler; intended for modest means (validated for mu < 60).
  int poisson(double mu) {
    if (mu < 0 || mu >= 60) throw std::invalid_argument("poisson: mu out of supported range");
    double u = uniform01();
    double p = std::exp(-mu);
    double cum = p;
    int k = 0;
    while (u >= cum && k < 1000) {
      ++k;
      p *= mu / k;
      cum += p;
    }
    return k;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  std::uint32_t key_[2];
  std::uint32_t ctr_[4];
  std::uint32_t buf_[4];
  int idx_;
};

}  // namespace mcp
