#include "maglev/mode.hpp"

#include <cmath>
#include <stdexcept>

#include "maglev/constants.hpp"

namespace maglev {

ModeLabel mode_label_from_string(const std::string& s) {
  if (s == "x") return ModeLabel::x;
  if (s == "y") return ModeLabel::y;
  if (s == "z") return ModeLabel::z;
  if (s == "alpha") return ModeLabel::alpha;
  if (s == "beta") return ModeLabel::beta;
  throw std::invalid_argument("unknown mode label '" + s + "'");
}

std::string to_string(ModeLabel label) {
  switch (label) {
    case ModeLabel::x: return "x";
    case ModeLabel::y: return "y";
    case ModeLabel::z: return "z";
    case ModeLabel::alpha: return "alpha";
    case ModeLabel::beta: return "beta";
  }
  return "?";
}

std::string to_string(ModeKind kind) {
  return kind == ModeKind::translational ? "translational" : "librational";
}

void require_valid(const ModeSpec& mode) {
  if (!(mode.omega0 > 0.0)) throw std::invalid_argument("mode omega0 must be > 0");
  if (!(mode.inertia > 0.0)) throw std::invalid_argument("mode inertia must be > 0");
  if (!(mode.quality_factor > 0.0)) {
    throw std::invalid_argument("mode quality_factor must be > 0");
  }
  if (!(mode.bath_temperature >= 0.0)) {
    throw std::invalid_argument("mode bath_temperature must be >= 0");
  }
}

double thermal_force_psd(double temperature, double inertia, double omega0,
                         double quality_factor) {
  return 4.0 * constants::k_boltzmann * temperature * inertia * omega0 /
         quality_factor;
}

double thermal_force_psd(const ModeSpec& mode) {
  require_valid(mode);
  return thermal_force_psd(mode.bath_temperature, mode.inertia, mode.omega0,
                           mode.quality_factor);
}

double thermal_rms(const ModeSpec& mode, double temperature) {
  if (!(temperature >= 0.0)) {
    throw std::invalid_argument("temperature must be >= 0");
  }
  return std::sqrt(constants::k_boltzmann * temperature /
                   (mode.inertia * mode.omega0 * mode.omega0));
}

double thermal_amplitude(const ModeSpec& mode, double temperature) {
  return std::sqrt(2.0) * thermal_rms(mode, temperature);
}

}  // namespace maglev
