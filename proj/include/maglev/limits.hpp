#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "maglev/magnet.hpp"
#include "maglev/mode.hpp"

namespace maglev {

/// Noise inputs for the detection-limited cooling floor. PSDs are one-sided;
/// SQUID flux noise is expressed in flux quanta.
struct NoiseBudget {
  double force_psd = 0.0;     // N^2/Hz or (N*m)^2/Hz
  double detector_psd = 0.0;  // m^2/Hz or rad^2/Hz
  std::optional<double> squid_flux_psd;      // phi0^2/Hz
  std::optional<double> flux_coupling;       // Wb/m (from the coil module)
  std::optional<double> flux_transfer_ratio; // SQUID input transfer
};

struct LimitReport {
  double t_min = 0.0;          // K
  double n_min = 0.0;          // phonons, k_B t_min / (hbar omega0)
  double min_amplitude = 0.0;  // m or rad, peak convention
  std::string caveat;
};

/// Detection-noise-limited cooling floor:
///   T_min = omega0 / (2 k_B) * sqrt(S_F S_xd),  N_min = k_B T_min / (hbar omega0).
LimitReport min_temperature(const ModeSpec& mode, const NoiseBudget& budget);

/// Displacement-referred detector noise from SQUID flux noise:
///   sqrt(S_xd) = sqrt(S_phi) * phi0 / (transfer_ratio * |dPhi/dz|).
/// Returns the PSD in m^2/Hz (or rad^2/Hz). Throws on zero coupling.
double detector_noise_from_flux(double squid_flux_psd, double flux_coupling,
                                double flux_transfer_ratio);

/// Uses the explicit detector_psd if set, otherwise derives it from the
/// budget's flux chain.
double resolved_detector_psd(const NoiseBudget& budget);

/// Per-mode slice of the experiment parameter table.
struct TableModeFixture {
  ModeSpec mode;  // measured frequency and Q; inertia from the magnet
  double reference_temperature = 0.0;    // K, thermal-limited reference
  double equilibrium_temperature = 0.0;  // K, vibration-limited equilibrium
  double feedback_temperature = 0.0;     // K, reported cooled temperature
  double future_bath_temperature = 0.0;  // K
  double detector_asd = 0.0;             // m/rtHz or rad/rtHz, current
  double future_detector_asd = 0.0;      // at the SQUID noise floor
  std::optional<double> squid_floor_asd; // phi0/rtHz, informational
};

struct TableFixture {
  MagnetSpec magnet;
  TableModeFixture z;
  TableModeFixture beta;
  std::optional<double> flux_transfer_ratio;  // fitted, see the fixture file
  // published values keyed by row name, SI units
  std::map<std::string, double> paper;
};

struct TableRow {
  std::string name;
  std::string unit;
  std::optional<double> computed;
  std::optional<double> paper;
  std::optional<double> rel_dev;  // |computed - paper| / |paper|
  std::string missing;            // when inputs for the row are absent
};

struct TableReport {
  std::vector<TableRow> rows;
  double max_rel_dev = 0.0;  // over rows with both values
  bool all_within(double tolerance) const;
};

/// Recomputes every derivable parameter-table row from the fixture inputs and
/// compares against the published values. Missing inputs mark the row, they
/// do not fail the call.
TableReport table_report(const TableFixture& fixture);

std::string table_report_text(const TableReport& report, double tolerance);

}  // namespace maglev
