#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "maglev/config.hpp"
#include "maglev/constants.hpp"
#include "maglev/errors.hpp"
#include "maglev/pressure.hpp"

using namespace maglev;
namespace k = maglev::constants;

namespace {

const char* kBaseConfig = R"(
# minimal experiment description
[magnet]
mass = 23 ug
radius = 100 um
thickness = 100 um
density = 7430 kg/m^3
magnetization = 4.4e5 A/m

[mode.z]
kind = translational
frequency = 42.4 Hz
quality_factor = 1.0e5
bath_temperature = 4.4 K

[mode.beta]
frequency = 178.8 Hz          ; kind defaults to librational for beta
quality_factor = 2.1e4
bath_temperature = 4.2 K

[noise]
thermal = on
detector_noise_asd = 2.1e-11 m/rtHz
seed = 42

[feedback]
mode = ideal_velocity
gain = 0.5

[simulate]
mode = z
duration = 30 s
channels = true_position,measured_position

[coil]
turns = 15
loop_radius = 1 mm
lateral_offset = 0.3 mm
separation = 2.5 mm
orientation = perpendicular

[pressure]
gauge_value = 1e-8 mbar
warm_temperature = 295 K
cold_temperature = 410 mK
)";

}  // namespace

TEST_CASE("config parsing with unit suffixes") {
  const ExperimentConfig cfg =
      resolve_experiment_config(parse_config_text(kBaseConfig));

  REQUIRE(cfg.magnet.has_value());
  CHECK(cfg.magnet->mass == doctest::Approx(23e-9).epsilon(1e-12));
  CHECK(cfg.magnet->radius == doctest::Approx(100e-6).epsilon(1e-12));
  CHECK(cfg.gravity == k::standard_gravity);

  REQUIRE(cfg.modes.count("z") == 1);
  REQUIRE(cfg.modes.count("beta") == 1);
  const ModeSpec& z = cfg.modes.at("z");
  CHECK(z.omega0 == doctest::Approx(k::two_pi * 42.4).epsilon(1e-12));
  CHECK(z.kind == ModeKind::translational);
  CHECK(z.inertia == doctest::Approx(23e-9).epsilon(1e-12));  // from the magnet
  const ModeSpec& beta = cfg.modes.at("beta");
  CHECK(beta.kind == ModeKind::librational);
  CHECK(beta.inertia ==
        doctest::Approx(moment_of_inertia(*cfg.magnet)).epsilon(1e-12));

  CHECK(cfg.noise.seed == 42);
  CHECK(cfg.noise.detector_noise_psd ==
        doctest::Approx(2.1e-11 * 2.1e-11).epsilon(1e-12));
  CHECK(cfg.detector_noise_unit == "m");
  CHECK(cfg.feedback.mode == FeedbackMode::ideal_velocity);
  CHECK(cfg.feedback.gain == 0.5);
  CHECK(cfg.simulate.duration == 30.0);
  CHECK(cfg.simulate.record_true);
  CHECK(cfg.simulate.record_measured);
  CHECK_FALSE(cfg.simulate.record_feedback);
  REQUIRE(cfg.coil.has_value());
  CHECK(cfg.coil->separation == doctest::Approx(2.5e-3).epsilon(1e-12));
  REQUIRE(cfg.pressure.has_value());
  CHECK(cfg.pressure->cold_temperature == doctest::Approx(0.41).epsilon(1e-12));
}

TEST_CASE("dimensioned fields demand the right unit") {
  auto mutate = [&](const std::string& find, const std::string& replace) {
    std::string text = kBaseConfig;
    const auto pos = text.find(find);
    REQUIRE(pos != std::string::npos);
    text.replace(pos, find.size(), replace);
    return text;
  };

  SUBCASE("missing unit") {
    CHECK_THROWS_AS(resolve_experiment_config(
                        parse_config_text(mutate("mass = 23 ug", "mass = 23"))),
                    config_error);
  }
  SUBCASE("wrong dimension") {
    CHECK_THROWS_AS(resolve_experiment_config(parse_config_text(
                        mutate("mass = 23 ug", "mass = 23 um"))),
                    config_error);
  }
  SUBCASE("quality factor must stay dimensionless") {
    CHECK_THROWS_AS(resolve_experiment_config(parse_config_text(mutate(
                        "quality_factor = 1.0e5", "quality_factor = 1.0e5 Hz"))),
                    config_error);
  }
  SUBCASE("unknown keys are rejected") {
    CHECK_THROWS_AS(resolve_experiment_config(parse_config_text(
                        mutate("mass = 23 ug", "mas = 23 ug"))),
                    config_error);
  }
  SUBCASE("duplicate keys are rejected") {
    CHECK_THROWS_AS(
        parse_config_text(mutate("mass = 23 ug", "mass = 23 ug\nmass = 24 ug")),
        config_error);
  }
  SUBCASE("frequency accepts rad/s as well") {
    const auto cfg = resolve_experiment_config(parse_config_text(
        mutate("frequency = 42.4 Hz", "omega0 = 266.40707 rad/s")));
    CHECK(cfg.modes.at("z").omega0 == doctest::Approx(266.40707));
  }
  SUBCASE("angle units convert") {
    const auto cfg = resolve_experiment_config(parse_config_text(mutate(
        "gain = 0.5", "gain = 0.5\nphase_offset = 270 deg")));
    CHECK(cfg.feedback.phase_offset == doctest::Approx(1.5 * k::pi));
  }
}

TEST_CASE("config serialization round trip") {
  const ExperimentConfig a =
      resolve_experiment_config(parse_config_text(kBaseConfig));
  const std::string text = serialize(a);
  const ExperimentConfig b = resolve_experiment_config(parse_config_text(text));

  // semantic identity after SI resolution
  CHECK(a.magnet->mass == b.magnet->mass);
  CHECK(a.magnet->radius == b.magnet->radius);
  CHECK(a.magnet->magnetization == b.magnet->magnetization);
  CHECK(a.gravity == b.gravity);
  REQUIRE(a.modes.size() == b.modes.size());
  for (const auto& [label, mode] : a.modes) {
    const ModeSpec& other = b.modes.at(label);
    CHECK(mode.omega0 == other.omega0);
    CHECK(mode.inertia == other.inertia);
    CHECK(mode.quality_factor == other.quality_factor);
    CHECK(mode.bath_temperature == other.bath_temperature);
    CHECK(mode.kind == other.kind);
  }
  CHECK(a.noise.seed == b.noise.seed);
  CHECK(a.noise.detector_noise_psd == b.noise.detector_noise_psd);
  CHECK(a.noise.thermal == b.noise.thermal);
  CHECK(a.feedback.mode == b.feedback.mode);
  CHECK(a.feedback.gain == b.feedback.gain);
  CHECK(a.simulate.duration == b.simulate.duration);
  CHECK(a.coil->separation == b.coil->separation);
  CHECK(a.pressure->gauge_value == b.pressure->gauge_value);

  // serialization is stable on the second pass
  CHECK(serialize(b) == text);
}

TEST_CASE("table fixture loading") {
  // the shipped fixture exercises the full [table.*]/[paper] path
  const char* env = std::getenv("MAGLEV_FIXTURES");
  const std::string dir = env != nullptr ? env : "fixtures";
  ExperimentConfig cfg;
  try {
    cfg = load_experiment_config(dir + "/table1.cfg");
  } catch (const config_error& e) {
    FAIL("fixture did not load: ", e.what());
    return;
  }
  REQUIRE(cfg.table.has_value());
  CHECK(cfg.table->paper.size() == 22);
  CHECK(cfg.table->z.detector_asd == doctest::Approx(2.1e-11));
  CHECK(cfg.table->beta.future_detector_asd == doctest::Approx(2.1e-9));
  CHECK(cfg.table->flux_transfer_ratio.has_value());
  CHECK(cfg.table->z.mode.inertia == doctest::Approx(23e-9));
  CHECK(cfg.table->beta.mode.inertia ==
        doctest::Approx(7.6667e-17).epsilon(1e-4));
  CHECK(cfg.table->paper.at("z_min_temperature_current") ==
        doctest::Approx(0.070).epsilon(1e-12));
  CHECK(cfg.table->paper.at("beta_min_amplitude_future") ==
        doctest::Approx(4.8e-9).epsilon(1e-12));
}

TEST_CASE("pressure correction") {
  SUBCASE("published Pirani-range factor") {
    const auto out = correct_pressure({1e-1, 295.0, 295.0});
    CHECK(out.correction_factor == 0.8);
    CHECK(out.gas_corrected == doctest::Approx(0.08));
    CHECK(out.cold_side == doctest::Approx(0.08));  // equal temperatures
  }
  SUBCASE("Bayard-Alpert range with the Weber-Schmidt factor") {
    const auto out = correct_pressure({1e-8, 295.0, 0.41});
    CHECK(out.correction_factor == 5.9);
    CHECK(out.gas_corrected == doctest::Approx(5.9e-8).epsilon(1e-12));
    CHECK(out.cold_side / out.gas_corrected ==
          doctest::Approx(0.037280430636925).epsilon(1e-9));
  }
  SUBCASE("gap range has no defined correction") {
    CHECK_THROWS_AS(correct_pressure({5e-3, 295.0, 0.41}), std::domain_error);
    CHECK_THROWS_AS(correct_pressure({1e-3, 295.0, 0.41}), std::domain_error);
    CHECK_THROWS_AS(correct_pressure({2e-2, 295.0, 0.41}), std::domain_error);
  }
  SUBCASE("boundaries just outside the gap work") {
    CHECK(correct_pressure({2.0001e-2, 295.0, 295.0}).correction_factor == 0.8);
    CHECK(correct_pressure({0.9999e-3, 295.0, 295.0}).correction_factor == 5.9);
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS(correct_pressure({0.0, 295.0, 0.41}), std::invalid_argument);
    CHECK_THROWS_AS(correct_pressure({1e-8, 0.0, 0.41}), std::invalid_argument);
  }
}
