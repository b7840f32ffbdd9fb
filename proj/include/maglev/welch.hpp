#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "maglev/timeseries.hpp"

namespace maglev {

/// One-sided power spectral density estimate on a uniform frequency grid.
struct PSDResult {
  std::vector<double> frequencies;  // Hz, strictly increasing from 0
  std::vector<double> values;       // (unit)^2/Hz
  double resolution_bandwidth = 0.0;  // Hz (equivalent noise bandwidth)
  int averages = 0;
  std::string unit = "m";  // base signal unit; PSD values are unit^2/Hz
};

/// Welch estimate: Hann window, per-segment mean removal, window power
/// compensated so white noise of PSD S shows a plateau at S. Segment length
/// must be a power of two and fit inside the data.
PSDResult welch_psd(std::span<const double> data, double sample_rate,
                    size_t segment_length, double overlap_fraction = 0.5,
                    const std::string& unit = "m");

PSDResult welch_psd(const TimeSeries& series, const std::string& channel,
                    size_t segment_length, double overlap_fraction = 0.5);

/// Smallest power-of-two segment giving resolution bandwidth <= target_rbw.
size_t segment_for_bandwidth(double sample_rate, double target_rbw);

/// Integrated PSD over [f_lo, f_hi] (trapezoid-free bin sum, one-sided).
double band_power(const PSDResult& psd, double f_lo, double f_hi);
double band_rms(const PSDResult& psd, double f_lo, double f_hi);

/// Total integrated power; equals the time-domain variance (Parseval).
double total_power(const PSDResult& psd);

/// CSV export: `frequency_hz,psd_value` with unit metadata in a header comment.
void write_psd_csv(const PSDResult& psd, const std::filesystem::path& path);

}  // namespace maglev
