#include "maglev/welch.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>

#include "maglev/constants.hpp"
#include "maglev/fft.hpp"
#include "maglev/simd/kernels.hpp"

namespace maglev {

PSDResult welch_psd(std::span<const double> data, double sample_rate,
                    size_t segment_length, double overlap_fraction,
                    const std::string& unit) {
  if (!(sample_rate > 0.0)) throw std::invalid_argument("sample_rate must be > 0");
  if (!is_power_of_two(segment_length) || segment_length < 8) {
    throw std::invalid_argument(
        "segment_length must be a power of two >= 8 (got " +
        std::to_string(segment_length) + ")");
  }
  if (segment_length > data.size()) {
    throw std::invalid_argument("series too short for the requested segment length");
  }
  if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0)) {
    throw std::invalid_argument("overlap_fraction must be in [0, 1)");
  }

  const size_t n = segment_length;
  size_t hop = static_cast<size_t>(
      std::llround(static_cast<double>(n) * (1.0 - overlap_fraction)));
  if (hop == 0) hop = 1;
  const size_t segments = (data.size() - n) / hop + 1;

  // periodic Hann window
  std::vector<double> window(n);
  double wsum2 = 0.0;
  double wsum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    window[i] = 0.5 * (1.0 - std::cos(constants::two_pi * static_cast<double>(i) /
                                      static_cast<double>(n)));
    wsum2 += window[i] * window[i];
    wsum += window[i];
  }

  const size_t bins = n / 2 + 1;
  std::vector<double> accum(bins, 0.0);
  std::vector<double> windowed(n);
  std::vector<std::complex<double>> spec(n);
  const FftPlan plan(n);
  const simd::Level level = simd::active_level();

  for (size_t s = 0; s < segments; ++s) {
    const double* seg = data.data() + s * hop;
    double mean = 0.0;
    for (size_t i = 0; i < n; ++i) mean += seg[i];
    mean /= static_cast<double>(n);
    simd::apply_window(level, seg, window.data(), mean, windowed.data(), n);
    for (size_t i = 0; i < n; ++i) spec[i] = {windowed[i], 0.0};
    plan.forward(spec);
    // interleaved (re, im) view of the first n/2+1 bins
    simd::accumulate_power(level,
                           reinterpret_cast<const double*>(spec.data()), bins,
                           accum.data());
  }

  PSDResult out;
  out.unit = unit;
  out.averages = static_cast<int>(segments);
  out.frequencies.resize(bins);
  out.values.resize(bins);
  const double df = sample_rate / static_cast<double>(n);
  const double norm = 1.0 / (sample_rate * wsum2 * static_cast<double>(segments));
  for (size_t k = 0; k < bins; ++k) {
    out.frequencies[k] = df * static_cast<double>(k);
    const double one_sided = (k == 0 || k == bins - 1) ? 1.0 : 2.0;
    out.values[k] = one_sided * accum[k] * norm;
  }
  out.resolution_bandwidth = sample_rate * wsum2 / (wsum * wsum);
  return out;
}

PSDResult welch_psd(const TimeSeries& series, const std::string& channel,
                    size_t segment_length, double overlap_fraction) {
  series.validate();
  return welch_psd(series.channel(channel), series.sample_rate, segment_length,
                   overlap_fraction, to_string(series.unit));
}

size_t segment_for_bandwidth(double sample_rate, double target_rbw) {
  if (!(target_rbw > 0.0)) throw std::invalid_argument("target_rbw must be > 0");
  // Hann ENBW = 1.5 fs / N
  return next_power_of_two(
      static_cast<size_t>(std::ceil(1.5 * sample_rate / target_rbw)));
}

double band_power(const PSDResult& psd, double f_lo, double f_hi) {
  if (psd.frequencies.size() < 2) throw std::invalid_argument("empty PSD");
  const double df = psd.frequencies[1] - psd.frequencies[0];
  double power = 0.0;
  for (size_t k = 0; k < psd.frequencies.size(); ++k) {
    if (psd.frequencies[k] >= f_lo && psd.frequencies[k] <= f_hi) {
      power += psd.values[k] * df;
    }
  }
  return power;
}

double band_rms(const PSDResult& psd, double f_lo, double f_hi) {
  return std::sqrt(band_power(psd, f_lo, f_hi));
}

double total_power(const PSDResult& psd) {
  if (psd.frequencies.empty()) return 0.0;
  return band_power(psd, psd.frequencies.front(), psd.frequencies.back());
}

void write_psd_csv(const PSDResult& psd, const std::filesystem::path& path) {
  std::string body;
  body += "# unit: " + psd.unit + "^2/Hz\n";
  char num[64];
  std::snprintf(num, sizeof(num), "# resolution_bandwidth_hz: %.17g\n",
                psd.resolution_bandwidth);
  body += num;
  std::snprintf(num, sizeof(num), "# averages: %d\n", psd.averages);
  body += num;
  body += "frequency_hz,psd_value\n";
  for (size_t k = 0; k < psd.frequencies.size(); ++k) {
    std::snprintf(num, sizeof(num), "%.17g,%.17g\n", psd.frequencies[k],
                  psd.values[k]);
    body += num;
  }
  atomic_write_text(path, body);
}

}  // namespace maglev
