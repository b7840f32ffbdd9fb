#pragma once

#include <cstdint>

#include "maglev/simd/rng.hpp"

// Portable elementary functions used by the Gaussian sampler. libm is not an
// option here: scalar and packed kernels must agree bit for bit, so both run
// these polynomial versions through the same arch template. Accuracy is a few
// ulp, verified against libm in the kernel tests.
namespace maglev::simd {

namespace detail {
// fdlibm constants
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kTwoOverPi = 6.36619772367581343076e-01;
inline constexpr double kPio2_1 = 1.57079632673412561417e+00;
inline constexpr double kPio2_2 = 6.07710050650619224932e-11;
inline constexpr double kPio2_3 = 2.02226624879595063154e-21;
inline constexpr double kTwoPi = 6.28318530717958647692;

// sin(r) = r + r z P(z), cos(r) = 1 - z/2 + z^2 C(z), z = r^2, |r| <= pi/4
// (Cephes minimax coefficients, highest degree first)
inline constexpr double kSinCof[6] = {
    1.58962301576546568060e-10, -2.50507477628578072866e-8,
    2.75573136213857245213e-6,  -1.98412698295895385996e-4,
    8.33333333332211858878e-3,  -1.66666666666666307295e-1};
inline constexpr double kCosCof[6] = {
    -1.13585365213876817300e-11, 2.08757008419747316778e-9,
    -2.75573141792967388112e-7,  2.48015872888517179954e-5,
    -1.38888888888730564116e-3,  4.16666666666665929218e-2};

// atanh series for log: log(m) = 2s + 2 s z P(z), s = (m-1)/(m+1), z = s^2,
// P(z) = sum z^k / (2k+3). Ten terms cover |s| <= sqrt(2)-1 to ~1e-17.
inline constexpr double kLogCof[10] = {
    1.0 / 21.0, 1.0 / 19.0, 1.0 / 17.0, 1.0 / 15.0, 1.0 / 13.0,
    1.0 / 11.0, 1.0 / 9.0,  1.0 / 7.0,  1.0 / 5.0,  1.0 / 3.0};
}  // namespace detail

/// Natural log for finite positive normal doubles.
template <class A>
typename A::f fast_log(typename A::f x) {
  using f = typename A::f;
  using u = typename A::u;
  const u bits = A::cast_u(x);
  const u expo = A::template ushr<52>(bits);
  f e = A::sub(A::u52_to_f(expo), A::fset(1023.0));
  const u mant = A::uor(A::uand(bits, A::uset(0x000FFFFFFFFFFFFFULL)),
                        A::uset(0x3FF0000000000000ULL));
  f m = A::cast_f(mant);  // [1, 2)
  const auto hi = A::cmp_gt(m, A::fset(detail::kSqrt2));
  m = A::select(hi, A::mul(m, A::fset(0.5)), m);
  e = A::select(hi, A::add(e, A::fset(1.0)), e);

  const f one = A::fset(1.0);
  const f s = A::div(A::sub(m, one), A::add(m, one));
  const f z = A::mul(s, s);
  f p = A::fset(detail::kLogCof[0]);
  for (int i = 1; i < 10; ++i) p = A::fmadd(p, z, A::fset(detail::kLogCof[i]));
  const f two_s = A::add(s, s);
  const f log_m = A::fmadd(A::mul(two_s, z), p, two_s);
  f r = A::fmadd(e, A::fset(detail::kLn2Lo), log_m);
  return A::fmadd(e, A::fset(detail::kLn2Hi), r);
}

template <class A>
struct SinCos {
  typename A::f sin, cos;
};

/// Simultaneous sin/cos for theta in [0, 2 pi] (the Box-Muller range).
template <class A>
SinCos<A> fast_sincos(typename A::f theta) {
  using f = typename A::f;
  const f q = A::round_nearest(A::mul(theta, A::fset(detail::kTwoOverPi)));
  f r = A::fnmadd(q, A::fset(detail::kPio2_1), theta);
  r = A::fnmadd(q, A::fset(detail::kPio2_2), r);
  r = A::fnmadd(q, A::fset(detail::kPio2_3), r);

  const f z = A::mul(r, r);
  f sp = A::fset(detail::kSinCof[0]);
  for (int i = 1; i < 6; ++i) sp = A::fmadd(sp, z, A::fset(detail::kSinCof[i]));
  const f sin_r = A::fmadd(A::mul(z, r), sp, r);

  f cp = A::fset(detail::kCosCof[0]);
  for (int i = 1; i < 6; ++i) cp = A::fmadd(cp, z, A::fset(detail::kCosCof[i]));
  const f one = A::fset(1.0);
  const f cos_r = A::fmadd(A::mul(z, z), cp, A::fnmadd(A::fset(0.5), z, one));

  // quadrant = q mod 4 (q in {0..4} for theta in [0, 2 pi])
  const f qm = A::sub(q, A::mul(A::fset(4.0), A::floor_(A::mul(q, A::fset(0.25)))));
  const auto is1 = A::cmp_eq(qm, A::fset(1.0));
  const auto is2 = A::cmp_eq(qm, A::fset(2.0));
  const auto is3 = A::cmp_eq(qm, A::fset(3.0));

  SinCos<A> out;
  out.sin = A::select(is1, cos_r,
            A::select(is2, A::neg(sin_r), A::select(is3, A::neg(cos_r), sin_r)));
  out.cos = A::select(is1, A::neg(sin_r),
            A::select(is2, A::neg(cos_r), A::select(is3, sin_r, cos_r)));
  return out;
}

/// Uniform in (0, 1] with 52-bit resolution from a 64-bit draw.
template <class A>
typename A::f uniform01(typename A::u bits) {
  const auto h = A::uadd(A::template ushr<12>(bits), A::uset(1));
  return A::mul(A::u52_to_f(h), A::fset(0x1.0p-52));
}

template <class A>
struct GaussPair {
  typename A::f g0, g1;
};

/// Box-Muller transform; consumes exactly two draws, yields two N(0,1)
/// variates per lane. Fixed consumption keeps noise streams aligned across
/// configurations.
template <class A>
GaussPair<A> box_muller(typename A::u r0, typename A::u r1) {
  using f = typename A::f;
  const f u0 = uniform01<A>(r0);
  const f u1 = uniform01<A>(r1);
  const f rad = A::sqrt_(A::mul(A::fset(-2.0), fast_log<A>(u0)));
  const f theta = A::mul(A::fset(detail::kTwoPi), u1);
  const SinCos<A> sc = fast_sincos<A>(theta);
  return {A::mul(rad, sc.cos), A::mul(rad, sc.sin)};
}

}  // namespace maglev::simd
