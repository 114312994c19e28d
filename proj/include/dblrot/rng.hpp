#pragma once

#include <cstdint>

#include "dblrot/torus.hpp"

namespace dblrot {

// Counter based uniform noise.
//
// Every draw is a pure function of (master seed, stream id, counter): the
// splitmix64 finalizer applied to an affine counter walk. That buys three
// things the standard library does not give us:
//   * byte identical output across platforms and compilers
//     (std::uniform_real_distribution is implementation defined),
//   * random access to the n-th draw, so reversed order compositions can
//     replay a noise prefix without storing it,
//   * cheap derivation of independent substreams per purpose and per seed.

inline uint64_t mix64(uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// Identifies one logical stream of i.i.d. uniforms. Copyable, cheap, and
// never mutated by drawing (NoiseSource holds the cursor).
struct NoiseStream {
  uint64_t master_seed = 0;
  uint64_t stream_id = 0;

  // Deterministic child stream. Distinct tags give decorrelated streams;
  // the mix of id and tag keeps sub(a).sub(b) != sub(b).sub(a).
  NoiseStream sub(uint64_t tag) const {
    return {master_seed, mix64(stream_id * kGolden + tag + 1)};
  }
};

inline double unit_from_bits(uint64_t bits) {
  // top 53 bits, uniform on [0,1)
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

class NoiseSource {
 public:
  explicit NoiseSource(NoiseStream s)
      : key_(mix64(s.master_seed ^ mix64(s.stream_id + kGolden))) {}

  // n-th raw draw, independent of cursor state
  uint64_t raw_at(uint64_t n) const { return mix64(key_ + (n + 1) * kGolden); }
  double uniform_at(uint64_t n) const { return unit_from_bits(raw_at(n)); }

  // noise vector for step n in dimension k (consumes counters n*k .. n*k+k-1)
  TranslationVector vector_at(uint64_t n, int k) const {
    Vec w = Vec::zero(k);
    for (int i = 0; i < k; ++i)
      w[i] = uniform_at(n * static_cast<uint64_t>(k) + static_cast<uint64_t>(i));
    return w;
  }

  // sequential interface
  double uniform() { return uniform_at(cursor_++); }
  TranslationVector vector(int k) {
    Vec w = Vec::zero(k);
    for (int i = 0; i < k; ++i) w[i] = uniform();
    return w;
  }
  uint64_t cursor() const { return cursor_; }

 private:
  uint64_t key_;
  uint64_t cursor_ = 0;
};

}  // namespace dblrot
