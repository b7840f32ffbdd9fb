#pragma once

#include <string>

namespace maglev {

enum class ModeLabel { x, y, z, alpha, beta };
enum class ModeKind { translational, librational };

/// One mechanical mode of the levitated magnet. `inertia` is a mass (kg) for
/// translational modes and a moment of inertia (kg*m^2) for librational ones;
/// all formulas below are written once in terms of it.
struct ModeSpec {
  ModeLabel label = ModeLabel::z;
  ModeKind kind = ModeKind::translational;
  double omega0 = 0.0;            // rad/s
  double inertia = 0.0;           // kg or kg*m^2
  double quality_factor = 0.0;    // dimensionless
  double bath_temperature = 0.0;  // K

  /// Background damping rate. Single source of truth: Gamma0 = omega0 / Q.
  double gamma0() const { return omega0 / quality_factor; }
};

ModeLabel mode_label_from_string(const std::string& s);
std::string to_string(ModeLabel label);
std::string to_string(ModeKind kind);

/// Throws std::invalid_argument unless omega0, inertia, Q > 0 and T >= 0.
void require_valid(const ModeSpec& mode);

/// One-sided thermal force (or torque) noise PSD driving the mode:
/// S_F = 4 k_B T inertia omega0 / Q. Units N^2/Hz or (N*m)^2/Hz.
/// Shared by the simulator and the cooling-limit calculations.
double thermal_force_psd(const ModeSpec& mode);
double thermal_force_psd(double temperature, double inertia, double omega0,
                         double quality_factor);

/// RMS displacement (or angle) of the mode in equilibrium at temperature T:
/// sqrt(k_B T / (inertia omega0^2)).
double thermal_rms(const ModeSpec& mode, double temperature);

/// Peak thermal amplitude, sqrt(2) times the RMS. This is the convention the
/// published amplitude figures follow (e.g. 270 pm at 4.4 K for the z mode).
double thermal_amplitude(const ModeSpec& mode, double temperature);

}  // namespace maglev
