#pragma once

#include "maglev/constants.hpp"
#include "maglev/magnet.hpp"

namespace maglev {

/// Static levitation solution above an infinite superconducting plane
/// (image-dipole approximation).
struct TrapSolution {
  double z0 = 0.0;                // m, equilibrium height above the plane
  double beta0 = 0.0;             // rad, equilibrium tilt (always 0)
  double omega_z = 0.0;           // rad/s
  double omega_beta = 0.0;        // rad/s
  double dipole_moment = 0.0;     // A*m^2
  double moment_of_inertia = 0.0; // kg*m^2
};

/// Image-method potential of the magnet at height z and tilt beta:
///   U = mu0 mu^2 / (64 pi z^3) * (1 + sin^2 beta) + m g z.
/// Throws std::domain_error for z <= 0 (the image term diverges).
double potential_energy(const MagnetSpec& spec, double z, double beta,
                        double gravity = constants::standard_gravity);

/// Closed form z0 = (3 mu0 mu^2 / (64 pi m g))^(1/4).
double equilibrium_height(const MagnetSpec& spec,
                          double gravity = constants::standard_gravity);

struct ModeFrequencies {
  double omega_z;     // rad/s, sqrt(4 g / z0)
  double omega_beta;  // rad/s, sqrt(2 z0 g m / (3 I))
};

ModeFrequencies mode_frequencies(const MagnetSpec& spec,
                                 double gravity = constants::standard_gravity);

TrapSolution solve_trap(const MagnetSpec& spec,
                        double gravity = constants::standard_gravity);

}  // namespace maglev
