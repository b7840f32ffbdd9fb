#pragma once

// Physical constants (CODATA 2018). Pinned here so every module computes
// with the same values; the paper quotes results to two significant figures,
// so constant-set choice is immaterial at its precision.
namespace maglev::constants {

inline constexpr double k_boltzmann = 1.380649e-23;       // J/K (exact, SI 2019)
inline constexpr double hbar = 1.054571817e-34;           // J*s
inline constexpr double mu0 = 1.25663706212e-6;           // T*m/A
inline constexpr double flux_quantum = 2.067833848e-15;   // Wb

// Default acceleration due to gravity. The paper never states its value;
// overridable through the [environment] config block.
inline constexpr double standard_gravity = 9.81;          // m/s^2

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 6.28318530717958647692;

}  // namespace maglev::constants
