#pragma once

#include <stdexcept>
#include <string>

namespace maglev {

/// Bad experiment description: missing blocks, unit mismatches, invalid values.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A fit failed to converge or its input is unusable for fitting.
class fit_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace maglev
