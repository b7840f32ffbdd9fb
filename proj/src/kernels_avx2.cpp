// Compiled with -mavx2 -mfma; reached only after the cpuid check.

#include "maglev/simd/arch_avx2.hpp"
#include "maglev/simd/kernel_impl.hpp"

namespace maglev::simd {

void run_langevin_batch_avx2(const LangevinBatchParams& p,
                             const LangevinRecording& rec,
                             LangevinBatchResult& out) {
  impl::run_langevin_batch_impl<Avx2Arch>(p, rec, out);
}

void gaussian_fill_avx2(const uint64_t* lane_seeds, int lanes, double* out,
                        size_t count) {
  impl::gaussian_fill_impl<Avx2Arch>(lane_seeds, lanes, out, count);
}

void apply_window_avx2(const double* x, const double* w, double mean,
                       double* out, size_t n) {
  impl::apply_window_impl<Avx2Arch>(x, w, mean, out, n);
}

void accumulate_power_avx2(const double* interleaved, size_t bins,
                           double* accum) {
  size_t k = 0;
  for (; k + 4 <= bins; k += 4) {
    const __m256d v0 = _mm256_loadu_pd(interleaved + 2 * k);      // r0 i0 r1 i1
    const __m256d v1 = _mm256_loadu_pd(interleaved + 2 * k + 4);  // r2 i2 r3 i3
    const __m256d s0 = _mm256_mul_pd(v0, v0);
    const __m256d s1 = _mm256_mul_pd(v1, v1);
    // hadd -> [b0 b2 b1 b3]; permute back to bin order
    const __m256d h = _mm256_hadd_pd(s0, s1);
    const __m256d p = _mm256_permute4x64_pd(h, _MM_SHUFFLE(3, 1, 2, 0));
    _mm256_storeu_pd(accum + k,
                     _mm256_add_pd(_mm256_loadu_pd(accum + k), p));
  }
  for (; k < bins; ++k) {
    const double re = interleaved[2 * k];
    const double im = interleaved[2 * k + 1];
    accum[k] += re * re + im * im;
  }
}

}  // namespace maglev::simd
