#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>

namespace maglev::simd {

// One-lane reference architecture. Every operation here is the exact scalar
// counterpart of the packed variants in arch_avx2.hpp: same IEEE rounding,
// fused multiply-adds only where the kernel asks for them. Kernels are
// templates over an arch, so the scalar and SIMD builds execute the same
// operation sequence per lane and produce bit-identical lanes.
struct ScalarArch {
  static constexpr int width = 1;

  struct f { double v; };
  struct u { uint64_t v; };
  struct m { bool v; };

  static f fset(double c) { return {c}; }
  static f fload(const double* p) { return {p[0]}; }
  static void fstore(double* p, f a) { p[0] = a.v; }

  static f add(f a, f b) { return {a.v + b.v}; }
  static f sub(f a, f b) { return {a.v - b.v}; }
  static f mul(f a, f b) { return {a.v * b.v}; }
  static f div(f a, f b) { return {a.v / b.v}; }
  static f fmadd(f a, f b, f c) { return {std::fma(a.v, b.v, c.v)}; }   // a*b + c
  static f fnmadd(f a, f b, f c) { return {std::fma(-a.v, b.v, c.v)}; } // c - a*b
  static f sqrt_(f a) { return {std::sqrt(a.v)}; }
  static f neg(f a) { return {-a.v}; }
  static f floor_(f a) { return {std::floor(a.v)}; }
  static f round_nearest(f a) { return {std::nearbyint(a.v)}; }  // ties to even

  static m cmp_gt(f a, f b) { return {a.v > b.v}; }
  static m cmp_eq(f a, f b) { return {a.v == b.v}; }
  static f select(m k, f a, f b) { return {k.v ? a.v : b.v}; }

  static u uset(uint64_t c) { return {c}; }
  static u uload(const uint64_t* p) { return {p[0]}; }
  static void ustore(uint64_t* p, u a) { p[0] = a.v; }
  static u uadd(u a, u b) { return {a.v + b.v}; }
  static u uxor(u a, u b) { return {a.v ^ b.v}; }
  static u uor(u a, u b) { return {a.v | b.v}; }
  static u uand(u a, u b) { return {a.v & b.v}; }
  template <int K> static u ushl(u a) { return {a.v << K}; }
  template <int K> static u ushr(u a) { return {a.v >> K}; }
  template <int K> static u urotl(u a) { return {(a.v << K) | (a.v >> (64 - K))}; }

  static f cast_f(u a) {
    double d;
    std::memcpy(&d, &a.v, 8);
    return {d};
  }
  static u cast_u(f a) {
    uint64_t x;
    std::memcpy(&x, &a.v, 8);
    return {x};
  }

  // Exact conversion of integers in [0, 2^52]; matches the packed
  // magic-number trick bit for bit over that range.
  static f u52_to_f(u a) { return {static_cast<double>(a.v)}; }
};

}  // namespace maglev::simd
