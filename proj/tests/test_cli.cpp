#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string bin_path() {
  const char* env = std::getenv("MAGLEV_BIN");
  REQUIRE_MESSAGE(env != nullptr, "MAGLEV_BIN must point at the maglev binary");
  return env;
}

std::string fixtures_dir() {
  const char* env = std::getenv("MAGLEV_FIXTURES");
  REQUIRE_MESSAGE(env != nullptr, "MAGLEV_FIXTURES must point at fixtures/");
  return env;
}

int run(const std::string& args, const fs::path& capture = {}) {
  std::string cmd = bin_path() + " " + args;
  if (!capture.empty()) {
    cmd += " > " + capture.string() + " 2>&1";
  } else {
    cmd += " > /dev/null 2>&1";
  }
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::current_path() / "cli_scratch" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& body) {
  std::ofstream out(p);
  out << body;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing file ", p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json slurp_json(const fs::path& p) { return json::parse(slurp(p)); }

const char* kSimConfig = R"([magnet]
mass = 23 ug
radius = 100 um
thickness = 100 um
magnetization = 4.4e5 A/m

[mode.z]
frequency = 42.4 Hz
quality_factor = 200
bath_temperature = 4.4 K

[noise]
thermal = on
detector_noise_asd = 1e-12 m/rtHz
seed = 1

[simulate]
mode = z
timestep = 589.62406015037593e-6 s
duration = 30 s
format = both
)";

}  // namespace

TEST_CASE("simulate is deterministic byte for byte") {
  const fs::path dir = scratch("determinism");
  write_file(dir / "exp.cfg", kSimConfig);
  const fs::path out1 = dir / "run1";
  const fs::path out2 = dir / "run2";
  REQUIRE(run("simulate --config " + (dir / "exp.cfg").string() + " --out " +
              out1.string()) == 0);
  REQUIRE(run("simulate --config " + (dir / "exp.cfg").string() + " --out " +
              out2.string()) == 0);
  CHECK(slurp(out1 / "timeseries_z.csv") == slurp(out2 / "timeseries_z.csv"));
  CHECK(slurp(out1 / "timeseries_z.bin") == slurp(out2 / "timeseries_z.bin"));

  const json report = slurp_json(out1 / "simulate_report.json");
  CHECK(report["unstable"] == false);
  CHECK(report["seed"] == 1);

  SUBCASE("a different seed changes the data") {
    const fs::path out3 = dir / "run3";
    REQUIRE(run("simulate --config " + (dir / "exp.cfg").string() + " --out " +
                out3.string() + " --seed 2") == 0);
    CHECK(slurp(out1 / "timeseries_z.csv") != slurp(out3 / "timeseries_z.csv"));
  }
}

TEST_CASE("simulate then analyze recovers the bath temperature") {
  const fs::path dir = scratch("roundtrip");
  std::string cfg = kSimConfig;
  cfg.replace(cfg.find("duration = 30 s"), 15, "duration = 600 s");
  write_file(dir / "exp.cfg", cfg);
  REQUIRE(run("simulate --config " + (dir / "exp.cfg").string() + " --out " +
              dir.string()) == 0);
  REQUIRE(run("analyze --config " + (dir / "exp.cfg").string() + " --input " +
              (dir / "timeseries_z.bin").string() + " --out " + dir.string() +
              " --format json") == 0);
  const json report = slurp_json(dir / "analyze_report.json");
  CHECK(std::abs(report["temperature_k"].get<double>() - 4.4) / 4.4 < 0.10);
  const double f0 = report["omega0_rad_s"].get<double>() / (2.0 * 3.14159265358979);
  CHECK(std::abs(f0 - 42.4) < 0.1);
  CHECK(fs::exists(dir / "psd.csv"));
  CHECK(fs::exists(dir / "psd.gp"));
}

TEST_CASE("ringdown command fits Q") {
  const fs::path dir = scratch("ringdown");
  write_file(dir / "exp.cfg", R"([magnet]
mass = 23 ug
radius = 100 um
thickness = 100 um
magnetization = 4.4e5 A/m

[mode.z]
frequency = 42.4 Hz
quality_factor = 1e4
bath_temperature = 0 K

[noise]
thermal = off
seed = 1

[simulate]
mode = z
timestep = 589.62406015037593e-6 s
duration = 160 s
channels = true_position
x0 = 1 nm
format = bin

[analyze]
mode = z
channel = true_position
)");
  REQUIRE(run("simulate --config " + (dir / "exp.cfg").string() + " --out " +
              dir.string()) == 0);
  REQUIRE(run("ringdown --config " + (dir / "exp.cfg").string() + " --input " +
              (dir / "timeseries_z.bin").string() + " --out " + dir.string()) ==
          0);
  const json report = slurp_json(dir / "ringdown_report.json");
  CHECK(std::abs(report["q_factor"].get<double>() - 1e4) / 1e4 < 0.02);
}

TEST_CASE("table-check against the shipped fixture") {
  const fs::path dir = scratch("table");
  const std::string fixture = fixtures_dir() + "/table1.cfg";
  CHECK(run("table-check --config " + fixture + " --out " + dir.string()) == 0);
  const json report = slurp_json(dir / "table_report.json");
  CHECK(report["pass"] == true);
  CHECK(report["rows"].size() == 22);
  CHECK(report["max_rel_dev"].get<double>() < 0.05);

  SUBCASE("unreachable tolerance exits with the tolerance code") {
    CHECK(run("table-check --config " + fixture + " --out " + dir.string() +
              " --tolerance 0.001") == 4);
  }
}

TEST_CASE("limits command reports cooling floors") {
  const fs::path dir = scratch("limits");
  const std::string fixture = fixtures_dir() + "/table1.cfg";
  REQUIRE(run("limits --config " + fixture + " --out " + dir.string()) == 0);
  const json report = slurp_json(dir / "limits_report.json");
  REQUIRE(report["modes"].size() == 4);  // z/beta, current/future
  bool saw_future_z = false;
  for (const auto& m : report["modes"]) {
    if (m["mode"] == "z" && m["case"] == "future") {
      CHECK(std::abs(m["t_min_k"].get<double>() - 5e-6) / 5e-6 < 0.05);
      CHECK(std::abs(m["n_min"].get<double>() - 2500.0) / 2500.0 < 0.05);
      saw_future_z = true;
    }
  }
  CHECK(saw_future_z);
}

TEST_CASE("coil-optimize finds the parallel close geometry") {
  const fs::path dir = scratch("coil");
  const std::string fixture = fixtures_dir() + "/table1.cfg";
  REQUIRE(run("coil-optimize --config " + fixture + " --out " + dir.string()) ==
          0);
  const json report = slurp_json(dir / "coil_report.json");
  CHECK(report["optimum"]["orientation"] == "parallel");
  CHECK(report["optimum"]["z_m"].get<double>() == doctest::Approx(2.0e-3));
  // configured perpendicular coupling matches the published 4.24e-10 Wb/m
  for (const auto& c : report["configured"]) {
    if (c["orientation"] == "perpendicular") {
      CHECK(std::abs(std::abs(c["dphi_dz_wb_per_m"].get<double>()) - 4.24e-10) /
                4.24e-10 <
            0.05);
    }
  }
}

TEST_CASE("pressure-correct runs from flags alone") {
  const fs::path dir = scratch("pressure");
  const fs::path capture = dir / "out.json";
  REQUIRE(run("pressure-correct --gauge 1e-8 --warm 295 --cold 0.41 "
              "--format json",
              capture) == 0);
  const json report = json::parse(slurp(capture));
  CHECK(report["correction_factor"] == 5.9);
  CHECK(std::abs(report["cold_side_mbar"].get<double>() -
                 5.9e-8 * 0.037280430636925) < 1e-12);

  SUBCASE("gap reading is a hard error") {
    CHECK(run("pressure-correct --gauge 5e-3 --warm 295 --cold 0.41") == 2);
  }
}

TEST_CASE("documented exit codes") {
  const fs::path dir = scratch("exitcodes");
  SUBCASE("unknown command") {
    CHECK(run("frobnicate") == 2);
  }
  SUBCASE("missing config file") {
    CHECK(run("simulate --config /nonexistent/exp.cfg") == 2);
  }
  SUBCASE("bad config: missing unit") {
    write_file(dir / "bad.cfg", "[magnet]\nmass = 23\n");
    CHECK(run("simulate --config " + (dir / "bad.cfg").string()) == 2);
  }
  SUBCASE("help exits zero") {
    CHECK(run("--help") == 0);
  }
}
