#include "maglev/magnet.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "maglev/constants.hpp"

namespace maglev {

MagnetValidation validate(const MagnetSpec& spec) {
  MagnetValidation v;
  auto positive = [&](double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      v.errors.push_back(std::string(name) + " must be > 0");
    }
  };
  positive(spec.mass, "mass");
  positive(spec.radius, "radius");
  positive(spec.thickness, "thickness");

  const bool has_m = spec.magnetization.has_value();
  const bool has_br = spec.residual_flux_density.has_value();
  if (!has_m && !has_br) {
    v.errors.push_back("one of magnetization / residual_flux_density is required");
  }
  if (has_m && !(*spec.magnetization >= 0.0)) {
    v.errors.push_back("magnetization must be >= 0");
  }
  if (has_br && !(*spec.residual_flux_density >= 0.0)) {
    v.errors.push_back("residual_flux_density must be >= 0");
  }
  if (has_m && has_br) {
    const double m_from_br = *spec.residual_flux_density / constants::mu0;
    const double ref = std::max(std::abs(*spec.magnetization), std::abs(m_from_br));
    if (ref > 0.0 && std::abs(*spec.magnetization - m_from_br) > 0.01 * ref) {
      v.errors.push_back("magnetization and residual_flux_density disagree by more "
                         "than 1% (M = B_r/mu0)");
    }
  }

  if (v.errors.empty() && spec.density > 0.0) {
    const double expected = spec.density * volume(spec);
    const double dev = std::abs(spec.mass - expected) / expected;
    if (dev > 0.05) {
      std::ostringstream os;
      os << "mass " << spec.mass << " kg deviates " << dev * 100.0
         << "% from density*volume = " << expected << " kg";
      v.warnings.push_back(os.str());
    }
  }
  return v;
}

void require_valid(const MagnetSpec& spec) {
  const MagnetValidation v = validate(spec);
  if (!v.ok()) {
    std::string msg = "invalid magnet spec:";
    for (const auto& e : v.errors) msg += " " + e + ";";
    throw std::invalid_argument(msg);
  }
}

double volume(const MagnetSpec& spec) {
  return constants::pi * spec.radius * spec.radius * spec.thickness;
}

double magnetization_si(const MagnetSpec& spec) {
  if (spec.magnetization) return *spec.magnetization;
  if (spec.residual_flux_density) return *spec.residual_flux_density / constants::mu0;
  throw std::invalid_argument("magnet spec has no magnetization");
}

double dipole_moment(const MagnetSpec& spec) {
  require_valid(spec);
  return magnetization_si(spec) * volume(spec);
}

double moment_of_inertia(const MagnetSpec& spec) {
  require_valid(spec);
  const double d = spec.thickness;
  const double r = spec.radius;
  return spec.mass * (d * d + 3.0 * r * r) / 12.0;
}

}  // namespace maglev
