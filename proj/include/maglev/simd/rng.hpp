#pragma once

#include <cstdint>

namespace maglev::simd {

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Stream seed for run `index` under a master seed. Each simulated trajectory
/// gets its own xoshiro stream, so ensemble results do not depend on how runs
/// are grouped into SIMD lanes or threads.
inline uint64_t derive_stream_seed(uint64_t master, uint64_t index) {
  uint64_t s = master ^ (0xD1B54A32D192ED03ULL * (index + 1));
  return splitmix64(s);
}

/// xoshiro256++ with one independent generator per lane. Integer-only state
/// transition, so packed and scalar lanes agree exactly.
template <class A>
struct Xoshiro256pp {
  typename A::u s0, s1, s2, s3;

  typename A::u next() {
    const auto result = A::uadd(A::template urotl<23>(A::uadd(s0, s3)), s0);
    const auto t = A::template ushl<17>(s1);
    s2 = A::uxor(s2, s0);
    s3 = A::uxor(s3, s1);
    s1 = A::uxor(s1, s2);
    s0 = A::uxor(s0, s3);
    s2 = A::uxor(s2, t);
    s3 = A::template urotl<45>(s3);
    return result;
  }

  /// Seeds lane i from lane_seeds[i] via a splitmix64 expansion.
  static Xoshiro256pp seeded(const uint64_t* lane_seeds) {
    uint64_t w0[A::width], w1[A::width], w2[A::width], w3[A::width];
    for (int i = 0; i < A::width; ++i) {
      uint64_t st = lane_seeds[i];
      w0[i] = splitmix64(st);
      w1[i] = splitmix64(st);
      w2[i] = splitmix64(st);
      w3[i] = splitmix64(st);
      if ((w0[i] | w1[i] | w2[i] | w3[i]) == 0) w0[i] = 1;  // all-zero is absorbing
    }
    Xoshiro256pp g;
    g.s0 = A::uload(w0);
    g.s1 = A::uload(w1);
    g.s2 = A::uload(w2);
    g.s3 = A::uload(w3);
    return g;
  }
};

}  // namespace maglev::simd
