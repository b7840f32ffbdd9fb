// maglev — simulation and analysis toolkit for feedback cooling of a
// Meissner-levitated micromagnet.

#include <CLI11.hpp>

#include "maglev/cli_commands.hpp"

int main(int argc, char** argv) {
  using namespace maglev::cli;

  CLI::App app{
      "maglev: Langevin simulation, spectral analysis, cooling limits and\n"
      "pick-up-coil optimization for a Meissner-levitated micromagnet.\n"};
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 success, 2 config/usage error, 3 fit/convergence error,\n"
      "4 tolerance failure, 1 unexpected internal error.\n"
      "Environment: MAGLEV_WORKERS (thread count), MAGLEV_SIMD "
      "(auto|scalar|avx2).");

  GlobalOptions opt;
  std::string config_path, out_dir, input_path;
  uint64_t seed = 0;
  bool seed_set = false;

  auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
    auto* c = cmd->add_option("--config", config_path, "experiment config file");
    if (needs_config) c->required();
    cmd->add_option("--out", out_dir, "output directory (default from [outputs])");
    cmd->add_option("--format", opt.format, "stdout format: text|json")
        ->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--seed", seed, "override the [noise] seed")
        ->each([&](const std::string&) { seed_set = true; });
  };

  auto* sim = app.add_subcommand("simulate", "integrate the configured mode");
  add_common(sim);
  auto* analyze = app.add_subcommand(
      "analyze", "Welch PSD + Lorentzian fit + temperature of a time series");
  add_common(analyze);
  analyze->add_option("--input", input_path, "time series file (csv or bin)")
      ->required();
  auto* ringdown = app.add_subcommand(
      "ringdown", "envelope + exponential decay fit, Q = omega0 tau / 2");
  add_common(ringdown);
  ringdown->add_option("--input", input_path, "time series file (csv or bin)")
      ->required();
  auto* limits = app.add_subcommand(
      "limits", "detection-noise-limited cooling floors from the fixture");
  add_common(limits);
  auto* coil = app.add_subcommand(
      "coil-optimize", "pick-up coil couplings and geometry optimization");
  add_common(coil);
  auto* table = app.add_subcommand(
      "table-check", "recompute the parameter table and compare to published "
                     "values");
  add_common(table);
  table->add_option("--tolerance", opt.tolerance,
                    "max relative deviation (default 0.05)");

  PressureArgs pargs;
  double gauge = 0.0, warm = 0.0, cold = 0.0;
  auto* pressure = app.add_subcommand(
      "pressure-correct", "helium gauge correction + Weber-Schmidt cold-side "
                          "pressure");
  add_common(pressure, /*needs_config=*/false);
  pressure->add_option("--gauge", gauge, "gauge reading [mbar], nitrogen equivalent");
  pressure->add_option("--warm", warm, "warm-side temperature [K]");
  pressure->add_option("--cold", cold, "cold-side temperature [K]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    const std::string name = e.get_name();
    return (name == "CallForHelp" || name == "CallForAllHelp" ||
            name == "CallForVersion")
               ? kExitOk
               : kExitConfig;
  }

  opt.config = config_path;
  if (!out_dir.empty()) opt.out_dir = out_dir;
  if (!input_path.empty()) opt.input = input_path;
  if (seed_set) opt.seed = seed;
  if (gauge > 0.0) pargs.gauge_mbar = gauge;
  if (warm > 0.0) pargs.warm_k = warm;
  if (cold > 0.0) pargs.cold_k = cold;

  try {
    if (sim->parsed()) return cmd_simulate(opt);
    if (analyze->parsed()) return cmd_analyze(opt);
    if (ringdown->parsed()) return cmd_ringdown(opt);
    if (limits->parsed()) return cmd_limits(opt);
    if (coil->parsed()) return cmd_coil_optimize(opt);
    if (table->parsed()) return cmd_table_check(opt);
    if (pressure->parsed()) return cmd_pressure_correct(opt, pargs);
  } catch (...) {
    return exit_code_for_current_exception();
  }
  return kExitConfig;
}
