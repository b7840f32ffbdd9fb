#include "maglev/cli_commands.hpp"

#include <cmath>
#include <iostream>

#include <json.hpp>

#include "maglev/calibration.hpp"
#include "maglev/config.hpp"
#include "maglev/constants.hpp"
#include "maglev/errors.hpp"
#include "maglev/fits.hpp"
#include "maglev/limits.hpp"
#include "maglev/pressure.hpp"
#include "maglev/simd/kernels.hpp"
#include "maglev/trap.hpp"
#include "maglev/welch.hpp"

namespace maglev::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Context {
  ExperimentConfig cfg;
  fs::path out_dir;
  bool json_out = false;
};

Context make_context(const GlobalOptions& opt) {
  if (opt.config.empty()) throw config_error("--config <file> is required");
  Context ctx;
  ctx.cfg = load_experiment_config(opt.config);
  if (opt.seed) ctx.cfg.noise.seed = *opt.seed;
  ctx.out_dir = opt.out_dir.value_or(fs::path(ctx.cfg.outputs.directory));
  const std::string fmt = opt.format.empty() ? ctx.cfg.outputs.format : opt.format;
  if (fmt != "text" && fmt != "json") {
    throw config_error("--format must be text or json");
  }
  ctx.json_out = fmt == "json";
  for (const auto& w : ctx.cfg.magnet_warnings) {
    std::cerr << "warning: " << w << "\n";
  }
  return ctx;
}

void emit(const Context& ctx, const json& machine, const std::string& human) {
  if (ctx.json_out) {
    std::cout << machine.dump(2) << "\n";
  } else {
    std::cout << human;
  }
}

std::string gnuplot_script(const std::string& data_file, const std::string& title,
                           const std::string& xlabel, const std::string& ylabel,
                           bool loglog, int columns) {
  std::string s;
  s += "set datafile separator ','\n";
  s += "set title '" + title + "'\n";
  s += "set xlabel '" + xlabel + "'\n";
  s += "set ylabel '" + ylabel + "'\n";
  if (loglog) s += "set logscale xy\n";
  s += "plot ";
  for (int c = 2; c <= columns + 1; ++c) {
    if (c > 2) s += ", ";
    s += "'" + data_file + "' using 1:" + std::to_string(c) +
         " with lines title columnheader(" + std::to_string(c) + ")";
  }
  s += "\n";
  return s;
}

struct AnalysisOutcome {
  PSDResult psd;
  LorentzianFit fit;
  double band_lo = 0.0, band_hi = 0.0;
  double band_rms_value = 0.0;
  double temperature = 0.0;
  double q_factor = 0.0;
  double q_error = 0.0;
};

// Welch + peak band selection + Lorentzian fit + band-RMS temperature.
AnalysisOutcome analyze_series(const TimeSeries& series,
                               const AnalyzeSettings& settings,
                               const std::optional<ModeSpec>& mode) {
  AnalysisOutcome out;

  size_t segment = settings.segment_length;
  if (segment == 0) {
    double rbw = settings.target_rbw;
    if (rbw <= 0.0 && mode) {
      // aim at Gamma/5, clamped by the record length below
      rbw = mode->gamma0() / constants::two_pi / 5.0;
    }
    if (rbw <= 0.0) rbw = series.sample_rate / 4096.0;
    segment = segment_for_bandwidth(series.sample_rate, rbw);
  }
  size_t max_segment = 8;
  while (max_segment * 2 <= series.length() / 2) max_segment *= 2;
  segment = std::min(segment, max_segment);
  if (segment < 8) throw fit_error("series too short for spectral analysis");

  out.psd = welch_psd(series, settings.channel, segment, settings.overlap);

  // band around the configured centre or the spectrum peak
  const auto& f = out.psd.frequencies;
  const auto& s = out.psd.values;
  size_t peak = 1;
  for (size_t k = 1; k + 1 < f.size(); ++k) {
    if (settings.band_center > 0.0) {
      if (std::abs(f[k] - settings.band_center) <
          std::abs(f[peak] - settings.band_center)) {
        peak = k;
      }
    } else if (s[k] > s[peak]) {
      peak = k;
    }
  }
  if (settings.band_center > 0.0) {
    // move to the local maximum near the requested centre
    size_t p = peak;
    while (p + 1 < s.size() && s[p + 1] > s[p]) ++p;
    while (p > 1 && s[p - 1] > s[p]) --p;
    peak = p;
  }
  // half-power width estimate for the fit band
  const double half = 0.5 * s[peak];
  size_t lo = peak, hi = peak;
  while (lo > 1 && s[lo] > half) --lo;
  while (hi + 1 < s.size() && s[hi] > half) ++hi;
  const double fwhm = std::max(f[hi] - f[lo], 4.0 * out.psd.resolution_bandwidth);
  const double halfband =
      std::max(settings.band_halfwidth_linewidths * fwhm,
               6.0 * out.psd.resolution_bandwidth);
  out.band_lo = std::max(f[peak] - halfband, f.front());
  out.band_hi = std::min(f[peak] + halfband, f.back());

  out.fit = fit_lorentzian(out.psd, out.band_lo, out.band_hi);
  out.band_rms_value = band_rms(out.psd, out.band_lo, out.band_hi);

  out.q_factor = out.fit.omega0 / out.fit.gamma_total;
  const auto& c = out.fit.covariance;
  const double dq_dw = 1.0 / out.fit.gamma_total;
  const double dq_dg = -out.fit.omega0 / (out.fit.gamma_total * out.fit.gamma_total);
  const double var_q = dq_dw * dq_dw * c[0][0] + dq_dg * dq_dg * c[1][1] +
                       2.0 * dq_dw * dq_dg * c[0][1];
  out.q_error = var_q > 0.0 ? std::sqrt(var_q) : 0.0;

  if (settings.reference_temperature && settings.reference_rms) {
    out.temperature = mode_temperature(
        out.band_rms_value,
        {*settings.reference_temperature, *settings.reference_rms});
  } else if (mode) {
    // self-calibration through equipartition at the fitted frequency
    out.temperature = mode->inertia * out.fit.omega0 * out.fit.omega0 *
                      out.band_rms_value * out.band_rms_value /
                      constants::k_boltzmann;
  }
  return out;
}

json fit_report_json(const AnalysisOutcome& a) {
  return json{{"omega0_rad_s", a.fit.omega0},
              {"gamma_total_s", a.fit.gamma_total},
              {"q_factor", a.q_factor},
              {"q_error", a.q_error},
              {"temperature_k", a.temperature},
              {"band_rms", a.band_rms_value},
              {"band_lo_hz", a.band_lo},
              {"band_hi_hz", a.band_hi},
              {"resolution_bandwidth_hz", a.psd.resolution_bandwidth},
              {"averages", a.psd.averages},
              {"residual_norm", a.fit.residual_norm}};
}

}  // namespace

int cmd_simulate(const GlobalOptions& opt) {
  Context ctx = make_context(opt);
  const ExperimentConfig& cfg = ctx.cfg;
  const ModeSpec& mode = required_mode(cfg, cfg.simulate.mode_label);
  if (!(cfg.simulate.duration > 0.0)) {
    throw config_error("[simulate] duration is required");
  }
  const double dt = cfg.simulate.timestep > 0.0 ? cfg.simulate.timestep
                                                : default_timestep(mode);
  SimOptions sim_opt;
  sim_opt.x0 = cfg.simulate.x0;
  sim_opt.v0 = cfg.simulate.v0;
  sim_opt.record_true = cfg.simulate.record_true;
  sim_opt.record_measured = cfg.simulate.record_measured;
  sim_opt.record_feedback = cfg.simulate.record_feedback;

  const SimResult result = simulate(mode, cfg.noise, cfg.feedback, dt,
                                    cfg.simulate.duration, sim_opt);

  const std::string base = "timeseries_" + cfg.simulate.mode_label;
  json artifacts = json::array();
  if (cfg.simulate.format == "csv" || cfg.simulate.format == "both") {
    const fs::path p = ctx.out_dir / (base + ".csv");
    write_timeseries_csv(result.series, p);
    artifacts.push_back(p.string());
    atomic_write_text(ctx.out_dir / (base + ".gp"),
                      gnuplot_script(base + ".csv", "simulated mode " +
                                     cfg.simulate.mode_label, "time [s]",
                                     to_string(result.series.unit), false,
                                     static_cast<int>(result.series.channels.size())));
  }
  if (cfg.simulate.format == "bin" || cfg.simulate.format == "both") {
    const fs::path p = ctx.out_dir / (base + ".bin");
    write_timeseries_bin(result.series, p);
    artifacts.push_back(p.string());
  }

  json report{{"command", "simulate"},
              {"mode", cfg.simulate.mode_label},
              {"timestep_s", dt},
              {"duration_s", cfg.simulate.duration},
              {"samples", result.series.length()},
              {"seed", cfg.noise.seed},
              {"kernel", simd::level_name(simd::active_level())},
              {"unstable", result.unstable},
              {"note", result.note},
              {"artifacts", artifacts}};
  atomic_write_text(ctx.out_dir / "simulate_report.json", report.dump(2) + "\n");

  std::string human = "simulated " + std::to_string(result.series.length()) +
                      " samples of mode " + cfg.simulate.mode_label + " (dt = " +
                      std::to_string(dt) + " s)\n";
  if (result.unstable) human += "UNSTABLE: " + result.note + "\n";
  for (const auto& a : artifacts) {
    human += "wrote " + a.get<std::string>() + "\n";
  }
  emit(ctx, report, human);
  return kExitOk;
}

int cmd_analyze(const GlobalOptions& opt) {
  Context ctx = make_context(opt);
  const ExperimentConfig& cfg = ctx.cfg;
  if (!opt.input) throw config_error("analyze needs --input <timeseries file>");
  const TimeSeries series = read_timeseries(*opt.input);

  std::optional<ModeSpec> mode;
  const auto it = cfg.modes.find(cfg.analyze.mode_label);
  if (it != cfg.modes.end()) mode = it->second;

  const AnalysisOutcome a = analyze_series(series, cfg.analyze, mode);

  json report = fit_report_json(a);
  report["command"] = "analyze";
  report["input"] = opt.input->string();
  atomic_write_text(ctx.out_dir / "analyze_report.json", report.dump(2) + "\n");
  if (cfg.analyze.emit_psd) {
    write_psd_csv(a.psd, ctx.out_dir / "psd.csv");
    atomic_write_text(ctx.out_dir / "psd.gp",
                      "set datafile separator ','\nset logscale y\n"
                      "set xlabel 'frequency [Hz]'\nset ylabel 'PSD [" +
                          a.psd.unit + "^2/Hz]'\nplot 'psd.csv' using 1:2 "
                          "with lines title 'Welch PSD'\n");
  }

  char line[256];
  std::snprintf(line, sizeof(line),
                "f0 = %.6g Hz, Gamma_total = %.6g 1/s, Q = %.6g +- %.2g\n"
                "band RMS [%.6g, %.6g] Hz = %.6g %s, temperature = %.6g K\n",
                a.fit.omega0 / constants::two_pi, a.fit.gamma_total, a.q_factor,
                a.q_error, a.band_lo, a.band_hi, a.band_rms_value,
                a.psd.unit.c_str(), a.temperature);
  emit(ctx, report, line);
  return kExitOk;
}

int cmd_ringdown(const GlobalOptions& opt) {
  Context ctx = make_context(opt);
  const ExperimentConfig& cfg = ctx.cfg;
  if (!opt.input) throw config_error("ringdown needs --input <timeseries file>");
  const TimeSeries series = read_timeseries(*opt.input);
  const ModeSpec& mode = required_mode(cfg, cfg.analyze.mode_label);

  const std::string channel = series.has_channel(cfg.analyze.channel)
                                  ? cfg.analyze.channel
                                  : series.channel_names.front();
  const TimeSeries envelope = extract_envelope(series, channel, mode.omega0);
  const RingdownFit fit = fit_ringdown(envelope, mode.omega0);

  json report{{"command", "ringdown"},
              {"omega0_rad_s", mode.omega0},
              {"amplitude0", fit.amplitude0},
              {"tau_s", fit.tau},
              {"q_factor", fit.quality_factor},
              {"q_error", fit.fit_error_q}};
  atomic_write_text(ctx.out_dir / "ringdown_report.json", report.dump(2) + "\n");

  char line[192];
  std::snprintf(line, sizeof(line), "tau = %.6g s, Q = %.6g +- %.2g (A0 = %.6g)\n",
                fit.tau, fit.quality_factor, fit.fit_error_q, fit.amplitude0);
  emit(ctx, report, line);
  return kExitOk;
}

int cmd_limits(const GlobalOptions& opt) {
  Context ctx = make_context(opt);
  const ExperimentConfig& cfg = ctx.cfg;
  if (!cfg.table) {
    throw config_error("limits needs [table.z] and [table.beta] fixture blocks");
  }

  json modes = json::array();
  std::string human;
  auto one = [&](const TableModeFixture& mf, const std::string& name) {
    auto entry = [&](const char* tag, double bath, double det_asd) {
      if (!(bath > 0.0) || !(det_asd > 0.0)) return;
      NoiseBudget budget;
      budget.force_psd = thermal_force_psd(bath, mf.mode.inertia, mf.mode.omega0,
                                           mf.mode.quality_factor);
      budget.detector_psd = det_asd * det_asd;
      const LimitReport rep = min_temperature(mf.mode, budget);
      modes.push_back(json{{"mode", name},
                           {"case", tag},
                           {"bath_temperature_k", bath},
                           {"force_asd", std::sqrt(budget.force_psd)},
                           {"detector_asd", det_asd},
                           {"t_min_k", rep.t_min},
                           {"n_min", rep.n_min},
                           {"min_amplitude", rep.min_amplitude},
                           {"caveat", rep.caveat}});
      char line[256];
      std::snprintf(line, sizeof(line),
                    "%-5s %-8s T_min = %10.4g K   N_min = %10.4g   min amplitude "
                    "= %10.4g\n",
                    name.c_str(), tag, rep.t_min, rep.n_min, rep.min_amplitude);
      human += line;
    };
    entry("current", mf.equilibrium_temperature, mf.detector_asd);
    entry("future", mf.future_bath_temperature, mf.future_detector_asd);
  };
  one(cfg.table->z, "z");
  one(cfg.table->beta, "beta");

  json report{{"command", "limits"}, {"modes", modes}};
  atomic_write_text(ctx.out_dir / "limits_report.json", report.dump(2) + "\n");
  emit(ctx, report, human);
  return kExitOk;
}

int cmd_coil_optimize(const GlobalOptions& opt) {
  Context ctx = make_context(opt);
  const ExperimentConfig& cfg = ctx.cfg;
  if (!cfg.magnet) throw config_error("coil-optimize needs a [magnet] block");
  if (!cfg.coil) throw config_error("coil-optimize needs a [coil] block");
  DipoleSource source;
  source.moment = dipole_moment(*cfg.magnet);

  json report{{"command", "coil-optimize"}};
  std::string human;

  // coupling of the configured geometry, both orientations
  CoilGeometry g = *cfg.coil;
  json current = json::array();
  for (auto orient : {CoilOrientation::perpendicular, CoilOrientation::parallel}) {
    g.orientation = orient;
    const double c = coupling_dz(g, source);
    const char* name =
        orient == CoilOrientation::perpendicular ? "perpendicular" : "parallel";
    current.push_back(json{{"orientation", name}, {"dphi_dz_wb_per_m", c}});
    char line[128];
    std::snprintf(line, sizeof(line), "configured geometry %-13s: |dPhi/dz| = %.6g Wb/m\n",
                  name, std::abs(c));
    human += line;
  }
  report["configured"] = current;
  if (const auto warn = near_field_warning(*cfg.coil, cfg.magnet->radius)) {
    report["near_field_warning"] = *warn;
    std::cerr << "warning: " << *warn << "\n";
  }

  if (cfg.coil_optimize.bounds) {
    const CoilOptimum best =
        optimize_geometry(source, *cfg.coil_optimize.bounds, cfg.coil->turns,
                          cfg.coil->loop_radius, cfg.coil_optimize.grid);
    report["optimum"] = json{
        {"x_m", best.geometry.lateral_offset},
        {"z_m", best.geometry.separation},
        {"orientation", best.geometry.orientation == CoilOrientation::perpendicular
                            ? "perpendicular"
                            : "parallel"},
        {"dphi_dz_wb_per_m", best.coupling}};
    char line[192];
    std::snprintf(line, sizeof(line),
                  "optimum: x = %.4g mm, z = %.4g mm, %s, |dPhi/dz| = %.6g Wb/m\n",
                  best.geometry.lateral_offset * 1e3, best.geometry.separation * 1e3,
                  best.geometry.orientation == CoilOrientation::perpendicular
                      ? "perpendicular"
                      : "parallel",
                  best.coupling);
    human += line;
    if (cfg.coil_optimize.emit_map) {
      const std::string csv =
          coupling_map_csv(source, *cfg.coil_optimize.bounds, cfg.coil->turns,
                           cfg.coil->loop_radius);
      atomic_write_text(ctx.out_dir / "coupling_map.csv", csv);
      report["map"] = (ctx.out_dir / "coupling_map.csv").string();
    }
  }

  atomic_write_text(ctx.out_dir / "coil_report.json", report.dump(2) + "\n");
  emit(ctx, report, human);
  return kExitOk;
}

int cmd_table_check(const GlobalOptions& opt) {
  Context ctx = make_context(opt);
  if (!ctx.cfg.table) {
    throw config_error("table-check needs [table.z], [table.beta] and [paper]");
  }
  const TableReport report = table_report(*ctx.cfg.table);

  json rows = json::array();
  for (const auto& row : report.rows) {
    json j{{"name", row.name}, {"unit", row.unit}};
    if (row.computed) j["computed"] = *row.computed;
    if (row.paper) j["published"] = *row.paper;
    if (row.rel_dev) j["rel_dev"] = *row.rel_dev;
    if (!row.missing.empty()) j["missing"] = row.missing;
    rows.push_back(j);
  }
  const bool ok = report.all_within(opt.tolerance);
  json out{{"command", "table-check"},
           {"tolerance", opt.tolerance},
           {"max_rel_dev", report.max_rel_dev},
           {"pass", ok},
           {"rows", rows}};
  atomic_write_text(ctx.out_dir / "table_report.json", out.dump(2) + "\n");
  emit(ctx, out, table_report_text(report, opt.tolerance));
  return ok ? kExitOk : kExitTolerance;
}

int cmd_pressure_correct(const GlobalOptions& opt, const PressureArgs& args) {
  // flags may replace the config entirely for this utility
  PressureReading reading;
  Context ctx;
  bool have_ctx = false;
  if (!opt.config.empty()) {
    ctx = make_context(opt);
    have_ctx = true;
    if (ctx.cfg.pressure) reading = *ctx.cfg.pressure;
  }
  if (args.gauge_mbar) reading.gauge_value = *args.gauge_mbar;
  if (args.warm_k) reading.warm_temperature = *args.warm_k;
  if (args.cold_k) reading.cold_temperature = *args.cold_k;
  if (!(reading.gauge_value > 0.0)) {
    throw config_error("pressure-correct needs a gauge value ([pressure] block "
                       "or --gauge)");
  }

  const PressureCorrection out = correct_pressure(reading);
  json report{{"command", "pressure-correct"},
              {"gauge_mbar", reading.gauge_value},
              {"warm_k", reading.warm_temperature},
              {"cold_k", reading.cold_temperature},
              {"correction_factor", out.correction_factor},
              {"gas_corrected_mbar", out.gas_corrected},
              {"cold_side_mbar", out.cold_side}};
  char line[224];
  std::snprintf(line, sizeof(line),
                "C = %.3g, gas corrected = %.6g mbar, cold side = %.6g mbar\n",
                out.correction_factor, out.gas_corrected, out.cold_side);
  if (have_ctx) {
    emit(ctx, report, line);
  } else {
    const bool json_out = opt.format == "json";
    if (json_out) {
      std::cout << report.dump(2) << "\n";
    } else {
      std::cout << line;
    }
  }
  return kExitOk;
}

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fit_error& e) {
    std::cerr << "fit error: " << e.what() << "\n";
    return kExitFit;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "file error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace maglev::cli
