#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace maglev {

bool is_power_of_two(size_t n);
size_t next_power_of_two(size_t n);

/// Radix-2 complex FFT with a precomputed twiddle table; reuse the plan when
/// transforming many segments of the same length.
class FftPlan {
 public:
  explicit FftPlan(size_t n);  // throws unless n is a power of two
  size_t size() const { return n_; }
  /// Forward transform, in place, no normalization.
  void forward(std::vector<std::complex<double>>& data) const;

 private:
  size_t n_;
  std::vector<std::complex<double>> twiddle_;  // exp(-2 pi i k / n), k < n/2
};

/// One-shot convenience wrapper.
void fft_radix2(std::vector<std::complex<double>>& data);

}  // namespace maglev
