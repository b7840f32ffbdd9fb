#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "maglev/coil.hpp"
#include "maglev/constants.hpp"

using namespace maglev;
namespace k = maglev::constants;

namespace {

DipoleSource paper_dipole() {
  DipoleSource s;
  s.moment = 1.4e-6;
  s.axis = {0.0, 0.0, 1.0};
  return s;
}

CoilGeometry paper_coil(CoilOrientation orient) {
  CoilGeometry g;
  g.turns = 15;
  g.loop_radius = 1.0e-3;
  g.lateral_offset = 0.3e-3;
  g.separation = 2.5e-3;
  g.orientation = orient;
  return g;
}

double fd_coupling(const CoilGeometry& g, const DipoleSource& s,
                   ParallelFluxForm form = ParallelFluxForm::derivative_consistent) {
  const double h = 1e-5 * g.separation;
  CoilGeometry up = g, dn = g;
  up.separation += h;
  dn.separation -= h;
  return (flux(up, s, form) - flux(dn, s, form)) / (2.0 * h);
}

}  // namespace

TEST_CASE("dipole field limits") {
  const DipoleSource s = paper_dipole();
  const double d = 2.0e-3;
  const double b0 = k::mu0 * s.moment / (4.0 * k::pi * d * d * d);

  SUBCASE("on axis: 2x the reference, along the moment") {
    const auto b = dipole_field(s, {0.0, 0.0, d});
    CHECK(b[2] == doctest::Approx(2.0 * b0).epsilon(1e-12));
    CHECK(b[0] == 0.0);
    CHECK(b[1] == 0.0);
  }
  SUBCASE("equatorial: antiparallel, half magnitude") {
    const auto b = dipole_field(s, {d, 0.0, 0.0});
    CHECK(b[2] == doctest::Approx(-b0).epsilon(1e-12));
    CHECK(b[0] == 0.0);
  }
  SUBCASE("zero position is out of the domain") {
    CHECK_THROWS_AS(dipole_field(s, {0.0, 0.0, 0.0}), std::domain_error);
  }
  SUBCASE("divergence vanishes (finite differences at random points)") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-5e-3, 5e-3);
    int tested = 0;
    while (tested < 20) {
      const std::array<double, 3> p{u(rng), u(rng), u(rng)};
      const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
      if (r < 1e-3) continue;
      ++tested;
      const double h = 1e-6 * r;
      double div = 0.0;
      for (int axis = 0; axis < 3; ++axis) {
        auto up = p, dn = p;
        up[axis] += h;
        dn[axis] -= h;
        div += (dipole_field(s, up)[axis] - dipole_field(s, dn)[axis]) / (2.0 * h);
      }
      const auto b = dipole_field(s, p);
      const double scale =
          std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]) / r;
      CHECK(std::abs(div) < 1e-6 * scale);
    }
  }
  SUBCASE("axis must be normalized") {
    DipoleSource bad = s;
    bad.axis = {0.0, 0.0, 2.0};
    CHECK_THROWS_AS(dipole_field(bad, {0.0, 0.0, 1e-3}), std::invalid_argument);
  }
}

TEST_CASE("flux closed forms") {
  const DipoleSource s = paper_dipole();

  SUBCASE("perpendicular on-axis symmetry") {
    CoilGeometry g = paper_coil(CoilOrientation::perpendicular);
    g.lateral_offset = 0.0;
    CHECK(flux(g, s) == 0.0);
  }
  SUBCASE("perpendicular flux is odd in the lateral offset") {
    CoilGeometry g = paper_coil(CoilOrientation::perpendicular);
    const double plus = flux(g, s);
    g.lateral_offset = -g.lateral_offset;
    CHECK(flux(g, s) == doctest::Approx(-plus).epsilon(1e-14));
  }
  SUBCASE("perpendicular closed form vs the small-loop field oracle") {
    // The published perpendicular form equals the point-dipole product
    // N B_x pi R^2 times sqrt(x^2 + z^2) exactly; freeze that relation.
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(0.05e-3, 2e-3);
    std::uniform_real_distribution<double> uz(0.5e-3, 8e-3);
    for (int i = 0; i < 25; ++i) {
      CoilGeometry g = paper_coil(CoilOrientation::perpendicular);
      g.lateral_offset = ux(rng);
      g.separation = uz(rng);
      const double r = std::hypot(g.lateral_offset, g.separation);
      CHECK(flux(g, s) ==
            doctest::Approx(flux_small_loop(g, s) * r).epsilon(1e-12));
    }
  }
  SUBCASE("parallel flux forms differ by the documented exponent") {
    const CoilGeometry g = paper_coil(CoilOrientation::parallel);
    const double x = g.lateral_offset, z = g.separation;
    const double r2 = x * x + z * z;
    const double pref = g.turns * k::mu0 * g.loop_radius * g.loop_radius *
                        s.moment / 4.0;
    const double consistent = pref * (3.0 * x * x / (r2 * r2) -
                                      1.0 / (r2 * std::sqrt(r2)));
    const double printed = pref * (3.0 * x * x / (r2 * r2) -
                                   1.0 / (r2 * r2 * std::sqrt(r2)));
    CHECK(flux(g, s) == doctest::Approx(consistent).epsilon(1e-14));
    CHECK(flux(g, s, ParallelFluxForm::as_printed) ==
          doctest::Approx(printed).epsilon(1e-14));
  }
}

TEST_CASE("coupling reproduces the published values") {
  const DipoleSource s = paper_dipole();
  const double perp =
      std::abs(coupling_dz(paper_coil(CoilOrientation::perpendicular), s));
  const double par =
      std::abs(coupling_dz(paper_coil(CoilOrientation::parallel), s));

  // frozen evaluations of the closed forms at the published geometry
  CHECK(perp == doctest::Approx(4.3476596921937836e-10).epsilon(1e-12));
  CHECK(par == doctest::Approx(4.888157480116502e-07).epsilon(1e-12));

  // published: 4.24e-10 Wb/m, 4.77e-7 Wb/m, ratio 1100
  CHECK(std::abs(perp - 4.24e-10) / 4.24e-10 < 0.05);
  CHECK(std::abs(par - 4.77e-7) / 4.77e-7 < 0.05);
  CHECK(std::abs(par / perp - 1100.0) / 1100.0 < 0.05);

  SUBCASE("parallel coupling is dominated by its leading 1/z^4-like term") {
    const CoilGeometry g = paper_coil(CoilOrientation::parallel);
    const double x = g.lateral_offset, z = g.separation;
    const double r2 = x * x + z * z;
    const double first = 3.0 * z / (r2 * r2 * std::sqrt(r2));
    const double second = 12.0 * x * x * z / (r2 * r2 * r2);
    CHECK(second / first < 1e-3);
  }
}

TEST_CASE("coupling equals the flux derivative") {
  const DipoleSource s = paper_dipole();
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ux(0.05e-3, 1.5e-3);
  std::uniform_real_distribution<double> uz(0.8e-3, 6e-3);
  for (int i = 0; i < 10; ++i) {
    for (auto orient :
         {CoilOrientation::perpendicular, CoilOrientation::parallel}) {
      CoilGeometry g = paper_coil(orient);
      g.lateral_offset = ux(rng);
      g.separation = uz(rng);
      const double analytic = coupling_dz(g, s);
      const double numeric = fd_coupling(g, s);
      CHECK(std::abs(numeric - analytic) <= 1e-6 * std::abs(analytic));
    }
  }
}

TEST_CASE("coupling scaling laws") {
  const DipoleSource s = paper_dipole();
  const CoilGeometry base = paper_coil(CoilOrientation::perpendicular);
  const double c0 = coupling_dz(base, s);

  CoilGeometry turns2 = base;
  turns2.turns = 30;
  CHECK(coupling_dz(turns2, s) == doctest::Approx(2.0 * c0).epsilon(1e-12));

  DipoleSource mu2 = s;
  mu2.moment = 2.8e-6;
  CHECK(coupling_dz(base, mu2) == doctest::Approx(2.0 * c0).epsilon(1e-12));

  CoilGeometry r2 = base;
  r2.loop_radius = 2.0e-3;
  CHECK(coupling_dz(r2, s) == doctest::Approx(4.0 * c0).epsilon(1e-12));
}

TEST_CASE("geometry optimization") {
  const DipoleSource s = paper_dipole();

  SUBCASE("paper bounds prefer parallel at the closest separation") {
    CoilBounds bounds;
    bounds.x_min = bounds.x_max = 0.3e-3;
    bounds.z_min = 2.0e-3;
    bounds.z_max = 2.5e-3;
    const auto best = optimize_geometry(s, bounds, 15, 1.0e-3);
    CHECK(best.geometry.orientation == CoilOrientation::parallel);
    CHECK(best.geometry.separation == doctest::Approx(2.0e-3).epsilon(1e-6));
    // moving from 2.5 mm to 2.0 mm gains roughly (2.5/2)^4
    const double at_25 =
        std::abs(coupling_dz(paper_coil(CoilOrientation::parallel), s));
    CHECK(best.coupling / at_25 == doctest::Approx(2.44).epsilon(0.05));
  }

  SUBCASE("collapsed bounds return the configured geometry") {
    CoilBounds bounds;
    bounds.x_min = bounds.x_max = 0.3e-3;
    bounds.z_min = bounds.z_max = 2.5e-3;
    bounds.orientations = {CoilOrientation::perpendicular};
    const auto best = optimize_geometry(s, bounds, 15, 1.0e-3);
    CHECK(best.geometry.lateral_offset == 0.3e-3);
    CHECK(best.geometry.separation == 2.5e-3);
    CHECK(std::abs(best.coupling - 4.24e-10) / 4.24e-10 < 0.05);
  }

  SUBCASE("optimum dominates every grid vertex") {
    CoilBounds bounds;
    bounds.x_min = 0.0;
    bounds.x_max = 1.0e-3;
    bounds.z_min = 1.5e-3;
    bounds.z_max = 4.0e-3;
    const int n = 16;
    const auto best = optimize_geometry(s, bounds, 15, 1.0e-3, n);
    for (int ix = 0; ix < n; ++ix) {
      for (int iz = 0; iz < n; ++iz) {
        CoilGeometry g;
        g.turns = 15;
        g.loop_radius = 1.0e-3;
        g.lateral_offset = bounds.x_min + (bounds.x_max - bounds.x_min) * ix / (n - 1.0);
        g.separation = bounds.z_min + (bounds.z_max - bounds.z_min) * iz / (n - 1.0);
        for (auto orient :
             {CoilOrientation::perpendicular, CoilOrientation::parallel}) {
          g.orientation = orient;
          CHECK(best.coupling >= std::abs(coupling_dz(g, s)) * (1.0 - 1e-12));
        }
      }
    }
  }

  SUBCASE("empty feasible set is rejected") {
    CoilBounds bounds;
    bounds.x_min = 0.0;
    bounds.x_max = 1e-3;
    bounds.z_min = 0.0;  // z must be positive
    bounds.z_max = 1e-3;
    CHECK_THROWS_AS(optimize_geometry(s, bounds, 15, 1e-3), std::invalid_argument);
    bounds.z_min = 2e-3;
    bounds.z_max = 1e-3;  // inverted
    CHECK_THROWS_AS(optimize_geometry(s, bounds, 15, 1e-3), std::invalid_argument);
  }
}

TEST_CASE("near-field warning") {
  const CoilGeometry g = paper_coil(CoilOrientation::perpendicular);
  CHECK_FALSE(near_field_warning(g, 100e-6).has_value());   // 2.5 mm > 0.5 mm
  CHECK(near_field_warning(g, 600e-6).has_value());         // 2.5 mm < 3 mm
}

TEST_CASE("coupling map export shape") {
  const DipoleSource s = paper_dipole();
  CoilBounds bounds;
  bounds.x_min = 0.0;
  bounds.x_max = 1e-3;
  bounds.z_min = 2e-3;
  bounds.z_max = 3e-3;
  const std::string csv = coupling_map_csv(s, bounds, 15, 1e-3, 4);
  CHECK(csv.rfind("x_m,z_m,orientation,dphi_dz_wb_per_m\n", 0) == 0);
  const size_t rows = std::count(csv.begin(), csv.end(), '\n');
  CHECK(rows == 1 + 2 * 4 * 4);  // header + both orientations on a 4x4 grid
}
