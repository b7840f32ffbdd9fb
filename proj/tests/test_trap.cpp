#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "maglev/constants.hpp"
#include "maglev/magnet.hpp"
#include "maglev/trap.hpp"

using namespace maglev;
namespace k = maglev::constants;

namespace {

MagnetSpec table_magnet() {
  MagnetSpec m;
  m.mass = 23e-9;
  m.radius = 100e-6;
  m.thickness = 100e-6;
  m.density = 7430.0;
  m.magnetization = 4.4e5;
  return m;
}

// independent 1-D minimizer used as the equilibrium-height oracle
double golden_min(double lo, double hi, const auto& f) {
  constexpr double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - (b - a) * invphi;
  double d = a + (b - a) * invphi;
  double fc = f(c), fd = f(d);
  while (b - a > 1e-13) {
    if (fc < fd) {
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
  return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("magnet validation") {
  MagnetSpec m = table_magnet();
  CHECK(validate(m).ok());
  CHECK(validate(m).warnings.empty());  // 23 ug vs 23.34 ug is within 5%

  SUBCASE("measured mass far from density*volume only warns") {
    m.mass = 30e-9;
    const auto v = validate(m);
    CHECK(v.ok());
    CHECK(v.warnings.size() == 1);
  }
  SUBCASE("needs exactly one magnetization source") {
    m.magnetization.reset();
    CHECK_FALSE(validate(m).ok());
    m.residual_flux_density = 4.4e5 * k::mu0;
    CHECK(validate(m).ok());
    m.magnetization = 4.4e5;
    CHECK(validate(m).ok());  // consistent within 1%
    m.residual_flux_density = 4.4e5 * k::mu0 * 1.05;
    CHECK_FALSE(validate(m).ok());
  }
  SUBCASE("positivity") {
    m.radius = 0.0;
    CHECK_FALSE(validate(m).ok());
    CHECK_THROWS_AS(dipole_moment(m), std::invalid_argument);
  }
}

TEST_CASE("dipole moment") {
  MagnetSpec m = table_magnet();
  // mu = M V; published value 1.4e-6 A*m^2
  const double mu = dipole_moment(m);
  CHECK(mu == doctest::Approx(1.3823007675795087e-06).epsilon(1e-12));
  CHECK(std::abs(mu - 1.4e-6) / 1.4e-6 < 0.05);

  SUBCASE("zero magnetization") {
    m.magnetization = 0.0;
    CHECK(dipole_moment(m) == 0.0);
  }
  SUBCASE("independent volume arithmetic") {
    // direct formula evaluated separately from the implementation path
    m.radius = 50e-6;
    const double expected = 4.4e5 * (k::pi * 5e-5 * 5e-5 * 1e-4);
    CHECK(dipole_moment(m) == doctest::Approx(expected).epsilon(1e-14));
  }
  SUBCASE("residual flux density route") {
    MagnetSpec m2 = table_magnet();
    m2.magnetization.reset();
    m2.residual_flux_density = 4.4e5 * k::mu0;
    CHECK(dipole_moment(m2) == doctest::Approx(mu).epsilon(1e-12));
  }
}

TEST_CASE("moment of inertia") {
  MagnetSpec m = table_magnet();
  const double inertia = moment_of_inertia(m);
  CHECK(inertia == doctest::Approx(7.666666666666666e-17).epsilon(1e-12));
  CHECK(std::abs(inertia - 7.8e-17) / 7.8e-17 < 0.05);  // published rounding

  SUBCASE("degenerate disk: d = 0 keeps only the 3r^2 term") {
    m.thickness = 1e-30;  // validation needs > 0
    m.density = 0.0;
    const double i2 = moment_of_inertia(m);
    CHECK(i2 == doctest::Approx(23e-9 * 3.0 * 1e-8 / 12.0).epsilon(1e-9));
    CHECK(i2 == doctest::Approx(5.75e-17).epsilon(1e-3));
  }
}

TEST_CASE("potential energy and equilibrium") {
  const MagnetSpec m = table_magnet();
  const double mg = m.mass * k::standard_gravity;
  const double z0 = equilibrium_height(m);
  CHECK(z0 == doctest::Approx(6.312514399750208e-4).epsilon(1e-10));

  SUBCASE("z <= 0 is out of the domain") {
    CHECK_THROWS_AS(potential_energy(m, 0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(potential_energy(m, -1e-3, 0.0), std::domain_error);
  }

  SUBCASE("equilibrium condition via central finite difference") {
    const double h = 1e-6 * z0;
    const double dudz =
        (potential_energy(m, z0 + h, 0.0) - potential_energy(m, z0 - h, 0.0)) /
        (2.0 * h);
    CHECK(std::abs(dudz) < 1e-6 * mg);
  }

  SUBCASE("tilting raises the image energy") {
    for (double z : {1e-4, z0, 5e-3}) {
      CHECK(potential_energy(m, z, 0.0) < potential_energy(m, z, k::pi / 2));
    }
  }

  SUBCASE("numeric minimization oracle agrees with the closed form") {
    const double z_oracle = golden_min(
        1e-4, 1e-2, [&](double z) { return potential_energy(m, z, 0.0); });
    CHECK(std::abs(z_oracle - z0) < 1e-9);
  }

  SUBCASE("scaling laws") {
    // mu -> 0 sends z0 -> 0 (quartic root of mu^2)
    MagnetSpec small = m;
    small.magnetization = 4.4e-2;
    CHECK(equilibrium_height(small) < 1e-3 * z0);
    // doubling mu scales z0 by sqrt(2)
    MagnetSpec dbl = m;
    dbl.magnetization = 8.8e5;
    CHECK(equilibrium_height(dbl) ==
          doctest::Approx(z0 * std::sqrt(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("mode frequencies") {
  const MagnetSpec m = table_magnet();
  const ModeFrequencies f = mode_frequencies(m);
  const double fz = f.omega_z / k::two_pi;
  const double fb = f.omega_beta / k::two_pi;

  // published analytic values 39.7 Hz and 175.4 Hz
  CHECK(std::abs(fz - 39.7) / 39.7 < 0.01);
  CHECK(std::abs(fb - 175.4) / 175.4 < 0.01);

  // measured 42.4 Hz and 178.8 Hz sit within 10% of the analytic predictions
  CHECK(std::abs(42.4 - fz) / fz < 0.10);
  CHECK(std::abs(178.8 - fb) / fb < 0.10);

  SUBCASE("spring constant consistency against finite differences") {
    const double z0 = equilibrium_height(m);
    const double h = 1e-5 * z0;
    auto u = [&](double z, double beta) { return potential_energy(m, z, beta); };
    const double d2u_dz2 = (u(z0 + h, 0) - 2.0 * u(z0, 0) + u(z0 - h, 0)) / (h * h);
    CHECK(d2u_dz2 > 0.0);
    CHECK(f.omega_z * f.omega_z * m.mass ==
          doctest::Approx(d2u_dz2).epsilon(1e-3));

    const double hb = 1e-5;
    const double d2u_db2 =
        (u(z0, hb) - 2.0 * u(z0, 0.0) + u(z0, -hb)) / (hb * hb);
    CHECK(d2u_db2 > 0.0);
    CHECK(f.omega_beta * f.omega_beta * moment_of_inertia(m) ==
          doctest::Approx(d2u_db2).epsilon(1e-3));
  }

  SUBCASE("composite g scaling of omega_z") {
    // z0 depends on g, so evaluate the full chain at 4g
    const ModeFrequencies f4 = mode_frequencies(m, 4.0 * k::standard_gravity);
    const double z0 = equilibrium_height(m);
    const double z0_4g = equilibrium_height(m, 4.0 * k::standard_gravity);
    CHECK(z0_4g == doctest::Approx(z0 * std::pow(0.25, 0.25)).epsilon(1e-12));
    const double expected =
        std::sqrt(4.0 * 4.0 * k::standard_gravity / z0_4g);
    CHECK(f4.omega_z == doctest::Approx(expected).epsilon(1e-12));
    // net effect: omega_z scales as g^(1/2) * g^(1/8)
    CHECK(f4.omega_z / f.omega_z ==
          doctest::Approx(std::pow(4.0, 0.625)).epsilon(1e-10));
  }
}

TEST_CASE("trap solution bundle") {
  const MagnetSpec m = table_magnet();
  const TrapSolution sol = solve_trap(m);
  CHECK(sol.beta0 == 0.0);
  CHECK(sol.z0 > 0.0);
  CHECK(sol.omega_z > 0.0);
  CHECK(sol.omega_beta > sol.omega_z);  // beta sits above z for this geometry
  CHECK(sol.dipole_moment == dipole_moment(m));
  CHECK(sol.moment_of_inertia == moment_of_inertia(m));
}
