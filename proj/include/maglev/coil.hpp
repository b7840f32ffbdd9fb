#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace maglev {

enum class CoilOrientation { perpendicular, parallel };

/// Pick-up coil placed at lateral offset x and separation z from the magnet
/// dipole. `orientation` is the coil normal relative to the dipole axis.
struct CoilGeometry {
  int turns = 1;              // N
  double loop_radius = 0.0;   // m
  double lateral_offset = 0.0;  // m, x >= 0
  double separation = 0.0;      // m, z > 0
  CoilOrientation orientation = CoilOrientation::perpendicular;
};

struct DipoleSource {
  double moment = 0.0;                      // A*m^2
  std::array<double, 3> axis = {0, 0, 1.0}; // unit vector
};

void require_valid(const CoilGeometry& geometry);
void require_valid(const DipoleSource& source);

/// Point-dipole field B(r) = mu0/(4 pi r^3) (3 (mu.rhat) rhat - mu).
/// Throws std::domain_error at r = 0.
std::array<double, 3> dipole_field(const DipoleSource& source,
                                   const std::array<double, 3>& position);

/// The published closed forms for the parallel-orientation flux disagree
/// dimensionally between their two terms, and only one reading is the exact
/// antiderivative of the published coupling derivative. Both are available;
/// `derivative_consistent` (the default) integrates the published dPhi/dz
/// exactly, `as_printed` keeps the (x^2+z^2)^(5/2) second-term exponent.
enum class ParallelFluxForm { derivative_consistent, as_printed };

/// Closed-form flux through the pick-up coil:
///   perpendicular: Phi = 3 N mu0 R^2 mu x z / (4 (x^2+z^2)^2)
///   parallel:      Phi = N mu0 R^2 mu / 4 * (3x^2/(x^2+z^2)^2 - 1/(x^2+z^2)^p)
/// with p = 3/2 (derivative-consistent) or 5/2 (as printed).
double flux(const CoilGeometry& geometry, const DipoleSource& source,
            ParallelFluxForm form = ParallelFluxForm::derivative_consistent);

/// Independent small-loop oracle: Phi = N * (B at coil centre . n) * pi R^2
/// from the point-dipole field. Note the perpendicular closed form above
/// equals this oracle times sqrt(x^2+z^2); the closed forms are kept as canon
/// because the published coupling numbers follow from them.
double flux_small_loop(const CoilGeometry& geometry, const DipoleSource& source);

/// Closed-form dPhi/dz:
///   perpendicular: 3 N mu0 R^2 mu x (x^2 - 3 z^2) / (4 (x^2+z^2)^3)
///   parallel:      N mu0 R^2 mu / 4 * (3z/(x^2+z^2)^(5/2) - 12 x^2 z/(x^2+z^2)^3)
double coupling_dz(const CoilGeometry& geometry, const DipoleSource& source);

/// Warns when the dipole approximation degrades (z < 5 magnet radii).
std::optional<std::string> near_field_warning(const CoilGeometry& geometry,
                                              double magnet_radius);

struct CoilBounds {
  double x_min = 0.0, x_max = 0.0;  // m
  double z_min = 0.0, z_max = 0.0;  // m, z_min > 0
  std::vector<CoilOrientation> orientations = {CoilOrientation::perpendicular,
                                               CoilOrientation::parallel};
};

struct CoilOptimum {
  CoilGeometry geometry;
  double coupling = 0.0;  // |dPhi/dz|, Wb/m
};

/// Maximizes |dPhi/dz| over the bounded box by grid scan plus golden-section
/// refinement on each axis. Deterministic.
CoilOptimum optimize_geometry(const DipoleSource& source, const CoilBounds& bounds,
                              int turns, double loop_radius,
                              int grid_points_per_axis = 64);

/// CSV map of the coupling over the bounds grid:
/// x_m,z_m,orientation,dphi_dz_wb_per_m
std::string coupling_map_csv(const DipoleSource& source, const CoilBounds& bounds,
                             int turns, double loop_radius,
                             int grid_points_per_axis = 32);

}  // namespace maglev
