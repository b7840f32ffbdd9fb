#pragma once

#include <optional>
#include <vector>

#include "maglev/mode.hpp"

namespace maglev {

/// Thermal-noise-limited reference used to convert measured RMS amplitudes to
/// effective temperatures (and volts to displacement/angle).
struct CalibrationReference {
  double reference_temperature = 0.0;  // K
  double reference_rms = 0.0;          // m, rad, or V — any unit, used ratiometrically
};

/// Equipartition ratio: T = T_ref (rms / rms_ref)^2. Unit-agnostic, so a
/// calibration in volts equals one in meters.
double mode_temperature(double measured_rms, const CalibrationReference& reference);

/// Voltage-to-displacement (or angle) factor from a thermal-noise-limited
/// reference record: C = V_rms / thermal_rms(mode, T).
double conversion_factor(double voltage_rms, const ModeSpec& mode,
                         double temperature);

struct QAmplitudePoint {
  double quality_factor = 0.0;
  double v_rms = 0.0;
};

struct ThermalLimitReport {
  // classification per input point (sorted by Q): true = thermal-limited
  std::vector<QAmplitudePoint> points;
  std::vector<bool> thermal_limited;
  std::optional<double> crossover_q;
  // Q ranges; empty optionals when a regime is absent
  std::optional<double> thermal_q_min, thermal_q_max;
  std::optional<double> vibration_q_min, vibration_q_max;
};

/// Classifies ring-down calibration data: V_rms independent of Q means
/// thermal-limited, V_rms/sqrt(Q) independent of Q means vibration-limited.
/// The crossover is found by a two-segment least-squares change-point, each
/// segment fit as a constant in its own normalized coordinate. Needs >= 4
/// points spanning >= 2 decades of Q.
ThermalLimitReport thermal_limit_diagnostic(std::vector<QAmplitudePoint> points);

}  // namespace maglev
