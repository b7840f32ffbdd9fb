#include "maglev/trap.hpp"

#include <cmath>
#include <stdexcept>

namespace maglev {

double potential_energy(const MagnetSpec& spec, double z, double beta,
                        double gravity) {
  require_valid(spec);
  if (!(z > 0.0)) {
    throw std::domain_error("potential_energy: z must be > 0 (image potential "
                            "diverges at the plane)");
  }
  const double mu = dipole_moment(spec);
  const double s = std::sin(beta);
  const double image = constants::mu0 * mu * mu /
                       (64.0 * constants::pi * z * z * z) * (1.0 + s * s);
  return image + spec.mass * gravity * z;
}

double equilibrium_height(const MagnetSpec& spec, double gravity) {
  const double mu = dipole_moment(spec);
  const double num = 3.0 * constants::mu0 * mu * mu;
  const double den = 64.0 * constants::pi * spec.mass * gravity;
  return std::pow(num / den, 0.25);
}

ModeFrequencies mode_frequencies(const MagnetSpec& spec, double gravity) {
  const double z0 = equilibrium_height(spec, gravity);
  const double inertia = moment_of_inertia(spec);
  ModeFrequencies f{};
  f.omega_z = std::sqrt(4.0 * gravity / z0);
  f.omega_beta = std::sqrt(2.0 * z0 * gravity * spec.mass / (3.0 * inertia));
  return f;
}

TrapSolution solve_trap(const MagnetSpec& spec, double gravity) {
  TrapSolution sol{};
  sol.dipole_moment = dipole_moment(spec);
  sol.moment_of_inertia = moment_of_inertia(spec);
  sol.z0 = equilibrium_height(spec, gravity);
  sol.beta0 = 0.0;
  const ModeFrequencies f = mode_frequencies(spec, gravity);
  sol.omega_z = f.omega_z;
  sol.omega_beta = f.omega_beta;
  return sol;
}

}  // namespace maglev
