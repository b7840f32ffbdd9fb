#include "maglev/simd/arch_scalar.hpp"
#include "maglev/simd/kernel_impl.hpp"

namespace maglev::simd {

void run_langevin_batch_scalar(const LangevinBatchParams& p,
                               const LangevinRecording& rec,
                               LangevinBatchResult& out) {
  impl::run_langevin_batch_impl<ScalarArch>(p, rec, out);
}

void gaussian_fill_scalar(const uint64_t* lane_seeds, int lanes, double* out,
                          size_t count) {
  impl::gaussian_fill_impl<ScalarArch>(lane_seeds, lanes, out, count);
}

void apply_window_scalar(const double* x, const double* w, double mean,
                         double* out, size_t n) {
  impl::apply_window_impl<ScalarArch>(x, w, mean, out, n);
}

void accumulate_power_scalar(const double* interleaved, size_t bins,
                             double* accum) {
  // two roundings per bin (re^2, im^2 separately), matching the packed hadd
  for (size_t k = 0; k < bins; ++k) {
    const double re = interleaved[2 * k];
    const double im = interleaved[2 * k + 1];
    accum[k] += re * re + im * im;
  }
}

}  // namespace maglev::simd
