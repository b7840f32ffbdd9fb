#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "maglev/coil.hpp"
#include "maglev/constants.hpp"
#include "maglev/langevin.hpp"
#include "maglev/limits.hpp"
#include "maglev/magnet.hpp"
#include "maglev/mode.hpp"
#include "maglev/pressure.hpp"

namespace maglev {

/// Raw INI-style content: [section] blocks of key = value lines, comments
/// with '#' or ';'. Dimensioned values carry a mandatory unit suffix
/// ("radius = 100 um"); parsing into SI happens per field.
struct RawConfig {
  // section -> key -> value, with insertion order preserved for serialization
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::vector<std::string> section_order;
  std::map<std::string, std::vector<std::string>> key_order;

  bool has(const std::string& section, const std::string& key) const;
  const std::string* find(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key,
           const std::string& value);
};

RawConfig parse_config_text(const std::string& text, const std::string& origin = "");
RawConfig parse_config_file(const std::filesystem::path& path);

struct SimulateSettings {
  std::string mode_label = "z";
  double timestep = 0.0;  // 0 = period/200
  double duration = 0.0;
  bool record_true = true;
  bool record_measured = true;
  bool record_feedback = false;
  std::optional<double> x0, v0;
  std::string format = "csv";  // csv | bin | both
};

struct AnalyzeSettings {
  std::string mode_label = "z";
  std::string channel = "measured_position";
  size_t segment_length = 0;       // 0 = derive from rbw or default
  double target_rbw = 0.0;         // Hz
  double overlap = 0.5;
  double band_center = 0.0;        // Hz, 0 = spectrum peak
  double band_halfwidth_linewidths = 5.0;
  std::optional<double> reference_temperature;  // K
  std::optional<double> reference_rms;          // same unit as the series
  bool emit_psd = true;
  bool emit_plot = false;
};

struct CoilOptimizeSettings {
  std::optional<CoilBounds> bounds;
  int grid = 64;
  bool emit_map = false;
};

struct OutputSettings {
  std::string directory = ".";
  std::string format = "text";  // text | json
};

/// Fully resolved experiment description (all values SI).
struct ExperimentConfig {
  std::optional<MagnetSpec> magnet;
  std::vector<std::string> magnet_warnings;
  double gravity = constants::standard_gravity;
  std::map<std::string, ModeSpec> modes;  // by label string
  NoiseConfig noise;
  std::string detector_noise_unit;  // "m" or "rad" as written in the config
  FeedbackConfig feedback;
  std::optional<CoilGeometry> coil;
  CoilOptimizeSettings coil_optimize;
  SimulateSettings simulate;
  AnalyzeSettings analyze;
  std::optional<TableFixture> table;
  std::optional<PressureReading> pressure;
  OutputSettings outputs;
};

/// Parses and validates; throws config_error with section/key context.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ExperimentConfig resolve_experiment_config(const RawConfig& raw);

/// Canonical SI serialization; parse(serialize(parse(f))) == parse(f).
std::string serialize(const ExperimentConfig& config);

/// The mode a command should act on; throws config_error when absent.
const ModeSpec& required_mode(const ExperimentConfig& config,
                              const std::string& label);

}  // namespace maglev
