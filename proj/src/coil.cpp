#include "maglev/coil.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "maglev/constants.hpp"

namespace maglev {

namespace {

using constants::mu0;
using constants::pi;

double golden_section_max(double lo, double hi, const auto& f) {
  constexpr double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - (b - a) * invphi;
  double d = a + (b - a) * invphi;
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && (b - a) > 1e-12 * (std::abs(a) + std::abs(b)); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) * invphi;
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) * invphi;
      fd = f(d);
    }
  }
  return fc > fd ? c : d;
}

}  // namespace

// The closed forms are odd in the lateral offset, so signed x evaluates fine;
// canonical geometries (config, optimizer bounds) keep x >= 0.
void require_valid(const CoilGeometry& g) {
  if (g.turns < 1) throw std::invalid_argument("coil turns must be >= 1");
  if (!(g.loop_radius > 0.0)) throw std::invalid_argument("loop_radius must be > 0");
  if (!(g.separation > 0.0)) throw std::invalid_argument("separation must be > 0");
  if (std::isnan(g.lateral_offset)) {
    throw std::invalid_argument("lateral_offset must be finite");
  }
}

void require_valid(const DipoleSource& s) {
  if (!(s.moment >= 0.0)) throw std::invalid_argument("dipole moment must be >= 0");
  const double norm = std::sqrt(s.axis[0] * s.axis[0] + s.axis[1] * s.axis[1] +
                                s.axis[2] * s.axis[2]);
  if (std::abs(norm - 1.0) > 1e-9) {
    throw std::invalid_argument("dipole axis must be a unit vector");
  }
}

std::array<double, 3> dipole_field(const DipoleSource& source,
                                   const std::array<double, 3>& position) {
  require_valid(source);
  const double r2 = position[0] * position[0] + position[1] * position[1] +
                    position[2] * position[2];
  if (!(r2 > 0.0)) {
    throw std::domain_error("dipole_field: field point coincides with the dipole");
  }
  const double r = std::sqrt(r2);
  const std::array<double, 3> rhat = {position[0] / r, position[1] / r,
                                      position[2] / r};
  const std::array<double, 3> m = {source.moment * source.axis[0],
                                   source.moment * source.axis[1],
                                   source.moment * source.axis[2]};
  const double mdotr = m[0] * rhat[0] + m[1] * rhat[1] + m[2] * rhat[2];
  const double pref = mu0 / (4.0 * pi * r2 * r);
  return {pref * (3.0 * mdotr * rhat[0] - m[0]),
          pref * (3.0 * mdotr * rhat[1] - m[1]),
          pref * (3.0 * mdotr * rhat[2] - m[2])};
}

double flux(const CoilGeometry& g, const DipoleSource& source,
            ParallelFluxForm form) {
  require_valid(g);
  require_valid(source);
  const double x = g.lateral_offset;
  const double z = g.separation;
  const double r2 = x * x + z * z;
  if (!(r2 > 0.0)) throw std::domain_error("flux: coil at the dipole position");
  const double nr2mu = g.turns * mu0 * g.loop_radius * g.loop_radius * source.moment;
  if (g.orientation == CoilOrientation::perpendicular) {
    return 3.0 * nr2mu * x * z / (4.0 * r2 * r2);
  }
  const double first = 3.0 * x * x / (r2 * r2);
  const double second = form == ParallelFluxForm::as_printed
                            ? 1.0 / (r2 * r2 * std::sqrt(r2))
                            : 1.0 / (r2 * std::sqrt(r2));
  return nr2mu / 4.0 * (first - second);
}

double flux_small_loop(const CoilGeometry& g, const DipoleSource& source) {
  require_valid(g);
  // coil centre in the x-z plane of the dipole (axis along z)
  const auto field = dipole_field(source, {g.lateral_offset, 0.0, g.separation});
  const double area = pi * g.loop_radius * g.loop_radius;
  const double b_normal = g.orientation == CoilOrientation::perpendicular
                              ? field[0]
                              : field[2];
  return g.turns * b_normal * area;
}

double coupling_dz(const CoilGeometry& g, const DipoleSource& source) {
  require_valid(g);
  require_valid(source);
  const double x = g.lateral_offset;
  const double z = g.separation;
  const double r2 = x * x + z * z;
  if (!(r2 > 0.0)) throw std::domain_error("coupling_dz: coil at the dipole position");
  const double nr2mu = g.turns * mu0 * g.loop_radius * g.loop_radius * source.moment;
  if (g.orientation == CoilOrientation::perpendicular) {
    return 3.0 * nr2mu * x * (x * x - 3.0 * z * z) / (4.0 * r2 * r2 * r2);
  }
  const double r5 = r2 * r2 * std::sqrt(r2);
  const double first = 3.0 * z / r5;
  const double second = 12.0 * x * x * z / (r2 * r2 * r2);
  return nr2mu / 4.0 * (first - second);
}

std::optional<std::string> near_field_warning(const CoilGeometry& g,
                                              double magnet_radius) {
  if (magnet_radius > 0.0 && g.separation < 5.0 * magnet_radius) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "separation %.3g m is below 5 magnet radii (%.3g m); the "
                  "dipole approximation degrades in the near field",
                  g.separation, 5.0 * magnet_radius);
    return std::string(buf);
  }
  return std::nullopt;
}

CoilOptimum optimize_geometry(const DipoleSource& source, const CoilBounds& bounds,
                              int turns, double loop_radius,
                              int grid_points_per_axis) {
  if (!(bounds.z_min > 0.0) || bounds.z_max < bounds.z_min ||
      bounds.x_max < bounds.x_min || bounds.x_min < 0.0 ||
      bounds.orientations.empty() || grid_points_per_axis < 1) {
    throw std::invalid_argument("optimize_geometry: empty or invalid bounds");
  }
  require_valid(source);

  auto objective = [&](double x, double z, CoilOrientation orient) {
    CoilGeometry g;
    g.turns = turns;
    g.loop_radius = loop_radius;
    g.lateral_offset = x;
    g.separation = z;
    g.orientation = orient;
    return std::abs(coupling_dz(g, source));
  };

  CoilOptimum best;
  best.coupling = -1.0;
  const int npx = bounds.x_max > bounds.x_min ? grid_points_per_axis : 1;
  const int npz = bounds.z_max > bounds.z_min ? grid_points_per_axis : 1;
  for (CoilOrientation orient : bounds.orientations) {
    double grid_x = bounds.x_min, grid_z = bounds.z_min, grid_c = -1.0;
    for (int ix = 0; ix < npx; ++ix) {
      const double x = npx == 1 ? bounds.x_min
                                : bounds.x_min + (bounds.x_max - bounds.x_min) *
                                                     ix / (npx - 1.0);
      for (int iz = 0; iz < npz; ++iz) {
        const double z = npz == 1 ? bounds.z_min
                                  : bounds.z_min + (bounds.z_max - bounds.z_min) *
                                                       iz / (npz - 1.0);
        const double c = objective(x, z, orient);
        if (c > grid_c) {
          grid_c = c;
          grid_x = x;
          grid_z = z;
        }
      }
    }
    // coordinate-wise golden-section refinement around the best grid cell
    double rx = grid_x, rz = grid_z;
    for (int round = 0; round < 3; ++round) {
      if (bounds.x_max > bounds.x_min) {
        const double hx = (bounds.x_max - bounds.x_min) / (npx > 1 ? npx - 1.0 : 1.0);
        rx = golden_section_max(std::max(bounds.x_min, rx - hx),
                                std::min(bounds.x_max, rx + hx),
                                [&](double x) { return objective(x, rz, orient); });
      }
      if (bounds.z_max > bounds.z_min) {
        const double hz = (bounds.z_max - bounds.z_min) / (npz > 1 ? npz - 1.0 : 1.0);
        rz = golden_section_max(std::max(bounds.z_min, rz - hz),
                                std::min(bounds.z_max, rz + hz),
                                [&](double z) { return objective(rx, z, orient); });
      }
    }
    const double refined_c = objective(rx, rz, orient);
    // never return worse than the best grid vertex
    const bool use_refined = refined_c >= grid_c;
    const double cand_c = use_refined ? refined_c : grid_c;
    if (cand_c > best.coupling) {
      best.coupling = cand_c;
      best.geometry.turns = turns;
      best.geometry.loop_radius = loop_radius;
      best.geometry.lateral_offset = use_refined ? rx : grid_x;
      best.geometry.separation = use_refined ? rz : grid_z;
      best.geometry.orientation = orient;
    }
  }
  return best;
}

std::string coupling_map_csv(const DipoleSource& source, const CoilBounds& bounds,
                             int turns, double loop_radius,
                             int grid_points_per_axis) {
  std::string body = "x_m,z_m,orientation,dphi_dz_wb_per_m\n";
  char line[128];
  const int np = grid_points_per_axis;
  for (CoilOrientation orient : bounds.orientations) {
    for (int ix = 0; ix < np; ++ix) {
      const double x = np == 1 ? bounds.x_min
                               : bounds.x_min +
                                     (bounds.x_max - bounds.x_min) * ix / (np - 1.0);
      for (int iz = 0; iz < np; ++iz) {
        const double z = np == 1 ? bounds.z_min
                                 : bounds.z_min +
                                       (bounds.z_max - bounds.z_min) * iz / (np - 1.0);
        CoilGeometry g;
        g.turns = turns;
        g.loop_radius = loop_radius;
        g.lateral_offset = x;
        g.separation = z;
        g.orientation = orient;
        std::snprintf(line, sizeof(line), "%.9g,%.9g,%s,%.9g\n", x, z,
                      orient == CoilOrientation::perpendicular ? "perpendicular"
                                                               : "parallel",
                      coupling_dz(g, source));
        body += line;
      }
    }
  }
  return body;
}

}  // namespace maglev
