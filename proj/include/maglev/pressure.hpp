#pragma once

namespace maglev {

/// Nitrogen-equivalent gauge reading plus the chamber temperatures on the
/// warm (gauge) and cold (experiment) sides.
struct PressureReading {
  double gauge_value = 0.0;       // mbar
  double warm_temperature = 0.0;  // K
  double cold_temperature = 0.0;  // K
};

struct PressureCorrection {
  double correction_factor = 0.0;  // helium gas factor C
  double gas_corrected = 0.0;      // mbar, C * gauge
  double cold_side = 0.0;          // mbar, after the thermomolecular ratio
};

/// Helium gas correction (C = 0.8 in the Pirani range > 2e-2 mbar, C = 5.9 in
/// the Bayard-Alpert range < 1e-3 mbar) followed by the Weber-Schmidt
/// thermomolecular ratio P_c/P_w = sqrt(T_c/T_w). Readings inside
/// [1e-3, 2e-2] mbar have no defined correction factor and throw.
PressureCorrection correct_pressure(const PressureReading& reading);

}  // namespace maglev
