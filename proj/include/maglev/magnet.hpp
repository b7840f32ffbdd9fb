#pragma once

#include <optional>
#include <string>
#include <vector>

namespace maglev {

/// Geometry and magnetic properties of the levitated cylinder magnet.
/// Exactly one of `magnetization` / `residual_flux_density` must be set;
/// if both are given they must agree through M = B_r / mu0 within 1%.
struct MagnetSpec {
  double mass = 0.0;       // kg
  double radius = 0.0;     // m
  double thickness = 0.0;  // m
  double density = 0.0;    // kg/m^3 (0 = unknown; disables the mass cross-check)
  std::optional<double> magnetization;          // A/m
  std::optional<double> residual_flux_density;  // T
};

struct MagnetValidation {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

/// Checks positivity, the magnetization/B_r exclusivity rule, and the
/// density*volume vs mass consistency (warning only: the published table
/// carries rounded values).
MagnetValidation validate(const MagnetSpec& spec);

/// Throws std::invalid_argument listing all validation errors.
void require_valid(const MagnetSpec& spec);

double volume(const MagnetSpec& spec);  // pi r^2 d

/// Magnetization in A/m regardless of which of the two fields was given.
double magnetization_si(const MagnetSpec& spec);

/// mu = M V  (equivalently B_r V / mu0). A*m^2
double dipole_moment(const MagnetSpec& spec);

/// Perpendicular moment of inertia of the cylinder, I = m (d^2 + 3 r^2) / 12.
double moment_of_inertia(const MagnetSpec& spec);

}  // namespace maglev
