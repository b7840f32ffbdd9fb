#include "maglev/pressure.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace maglev {

PressureCorrection correct_pressure(const PressureReading& reading) {
  if (!(reading.gauge_value > 0.0)) {
    throw std::invalid_argument("gauge_value must be > 0");
  }
  if (!(reading.warm_temperature > 0.0) || !(reading.cold_temperature > 0.0)) {
    throw std::invalid_argument("temperatures must be > 0");
  }

  PressureCorrection out;
  if (reading.gauge_value > 2e-2) {
    out.correction_factor = 0.8;  // Pirani range
  } else if (reading.gauge_value < 1e-3) {
    out.correction_factor = 5.9;  // Bayard-Alpert range
  } else {
    std::ostringstream os;
    os << "no correction factor defined for " << reading.gauge_value
       << " mbar: the gauge calibration covers only > 2e-2 mbar (C = 0.8) "
          "and < 1e-3 mbar (C = 5.9)";
    throw std::domain_error(os.str());
  }
  out.gas_corrected = out.correction_factor * reading.gauge_value;
  out.cold_side = out.gas_corrected *
                  std::sqrt(reading.cold_temperature / reading.warm_temperature);
  return out;
}

}  // namespace maglev
