#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace maglev {

enum class SignalUnit { meter, radian, volt };

std::string to_string(SignalUnit unit);
SignalUnit signal_unit_from_string(const std::string& s);

/// Uniformly sampled record of one simulation/measurement, one or more
/// channels of equal length.
struct TimeSeries {
  double sample_rate = 0.0;  // Hz
  SignalUnit unit = SignalUnit::meter;
  std::vector<std::string> channel_names;
  std::vector<std::vector<double>> channels;

  size_t length() const { return channels.empty() ? 0 : channels.front().size(); }
  bool has_channel(const std::string& name) const;
  const std::vector<double>& channel(const std::string& name) const;
  void validate() const;  // throws std::invalid_argument
};

// Channel names used by the simulator.
inline constexpr const char* kTruePosition = "true_position";
inline constexpr const char* kMeasuredPosition = "measured_position";
inline constexpr const char* kFeedbackForce = "feedback_force";

/// CSV: `# unit: <u>` comment, then header `time_s,<channels...>`.
void write_timeseries_csv(const TimeSeries& ts, const std::filesystem::path& path);
TimeSeries read_timeseries_csv(const std::filesystem::path& path);

/// Compact binary layout (little endian):
///   char[8]  magic "MAGLEVTS"
///   u32      version (1)
///   u32      channel count
///   f64      sample rate [Hz]
///   u64      samples per channel
///   u32+N    unit string
///   per channel: u32+N name string
///   per channel: samples f64 values
void write_timeseries_bin(const TimeSeries& ts, const std::filesystem::path& path);
TimeSeries read_timeseries_bin(const std::filesystem::path& path);

/// Reads .csv or .bin based on file magic/extension.
TimeSeries read_timeseries(const std::filesystem::path& path);

/// Writes to a temporary file in the target directory, then renames, so an
/// interrupted run never leaves a truncated result behind.
void atomic_write_text(const std::filesystem::path& path, const std::string& body);

}  // namespace maglev
