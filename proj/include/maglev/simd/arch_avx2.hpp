#pragma once

// Four-lane AVX2+FMA architecture. Only include from a translation unit
// compiled with -mavx2 -mfma; callers go through the runtime dispatcher.

#include <immintrin.h>

#include <cstdint>

namespace maglev::simd {

struct Avx2Arch {
  static constexpr int width = 4;

  struct f { __m256d v; };
  struct u { __m256i v; };
  struct m { __m256d v; };  // all-ones / all-zero lanes from comparisons

  static f fset(double c) { return {_mm256_set1_pd(c)}; }
  static f fload(const double* p) { return {_mm256_loadu_pd(p)}; }
  static void fstore(double* p, f a) { _mm256_storeu_pd(p, a.v); }

  static f add(f a, f b) { return {_mm256_add_pd(a.v, b.v)}; }
  static f sub(f a, f b) { return {_mm256_sub_pd(a.v, b.v)}; }
  static f mul(f a, f b) { return {_mm256_mul_pd(a.v, b.v)}; }
  static f div(f a, f b) { return {_mm256_div_pd(a.v, b.v)}; }
  static f fmadd(f a, f b, f c) { return {_mm256_fmadd_pd(a.v, b.v, c.v)}; }
  static f fnmadd(f a, f b, f c) { return {_mm256_fnmadd_pd(a.v, b.v, c.v)}; }
  static f sqrt_(f a) { return {_mm256_sqrt_pd(a.v)}; }
  static f neg(f a) {
    return {_mm256_xor_pd(a.v, _mm256_set1_pd(-0.0))};
  }
  static f floor_(f a) { return {_mm256_floor_pd(a.v)}; }
  static f round_nearest(f a) {
    return {_mm256_round_pd(a.v, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC)};
  }

  static m cmp_gt(f a, f b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_GT_OQ)}; }
  static m cmp_eq(f a, f b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_EQ_OQ)}; }
  static f select(m k, f a, f b) { return {_mm256_blendv_pd(b.v, a.v, k.v)}; }

  static u uset(uint64_t c) { return {_mm256_set1_epi64x(static_cast<long long>(c))}; }
  static u uload(const uint64_t* p) {
    return {_mm256_loadu_si256(reinterpret_cast<const __m256i*>(p))};
  }
  static void ustore(uint64_t* p, u a) {
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(p), a.v);
  }
  static u uadd(u a, u b) { return {_mm256_add_epi64(a.v, b.v)}; }
  static u uxor(u a, u b) { return {_mm256_xor_si256(a.v, b.v)}; }
  static u uor(u a, u b) { return {_mm256_or_si256(a.v, b.v)}; }
  static u uand(u a, u b) { return {_mm256_and_si256(a.v, b.v)}; }
  template <int K> static u ushl(u a) { return {_mm256_slli_epi64(a.v, K)}; }
  template <int K> static u ushr(u a) { return {_mm256_srli_epi64(a.v, K)}; }
  template <int K> static u urotl(u a) {
    return {_mm256_or_si256(_mm256_slli_epi64(a.v, K),
                            _mm256_srli_epi64(a.v, 64 - K))};
  }

  static f cast_f(u a) { return {_mm256_castsi256_pd(a.v)}; }
  static u cast_u(f a) { return {_mm256_castpd_si256(a.v)}; }

  // Integers in [0, 2^52] -> double, exactly. OR in the exponent of 2^52 and
  // subtract it back; the 2^52 endpoint lands on the exponent carry and still
  // converts exactly.
  static f u52_to_f(u a) {
    const __m256i magic = _mm256_set1_epi64x(0x4330000000000000LL);
    const __m256d offs = _mm256_set1_pd(0x1.0p52);
    return {_mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(a.v, magic)), offs)};
  }
};

}  // namespace maglev::simd
