#include "maglev/fft.hpp"

#include <cmath>
#include <stdexcept>

#include "maglev/constants.hpp"

namespace maglev {

bool is_power_of_two(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

size_t next_power_of_two(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

FftPlan::FftPlan(size_t n) : n_(n) {
  if (!is_power_of_two(n)) {
    throw std::invalid_argument("FFT length must be a power of two");
  }
  twiddle_.resize(n / 2);
  for (size_t k = 0; k < n / 2; ++k) {
    const double ang = -constants::two_pi * static_cast<double>(k) /
                       static_cast<double>(n);
    twiddle_[k] = {std::cos(ang), std::sin(ang)};
  }
}

void FftPlan::forward(std::vector<std::complex<double>>& data) const {
  if (data.size() != n_) {
    throw std::invalid_argument("FFT data length does not match the plan");
  }
  const size_t n = n_;
  if (n < 2) return;

  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  for (size_t len = 2; len <= n; len <<= 1) {
    const size_t stride = n / len;
    const size_t half = len / 2;
    for (size_t i = 0; i < n; i += len) {
      for (size_t k = 0; k < half; ++k) {
        const std::complex<double> w = twiddle_[k * stride];
        const std::complex<double> u = data[i + k];
        const std::complex<double> v = data[i + k + half] * w;
        data[i + k] = u + v;
        data[i + k + half] = u - v;
      }
    }
  }
}

void fft_radix2(std::vector<std::complex<double>>& data) {
  FftPlan(data.size()).forward(data);
}

}  // namespace maglev
