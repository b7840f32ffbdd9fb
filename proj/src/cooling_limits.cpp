#include "maglev/limits.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "maglev/constants.hpp"

namespace maglev {

namespace {
constexpr const char* kBackactionCaveat =
    "SQUID backaction is not modeled; reaching this floor additionally "
    "requires backaction-dominated force noise and a near-quantum-limited "
    "SQUID";
}

LimitReport min_temperature(const ModeSpec& mode, const NoiseBudget& budget) {
  require_valid(mode);
  const double s_xd = resolved_detector_psd(budget);
  if (!(budget.force_psd > 0.0)) {
    throw std::invalid_argument("min_temperature: force_psd must be > 0");
  }
  if (!(s_xd > 0.0)) {
    throw std::invalid_argument("min_temperature: detector_psd must be > 0");
  }
  LimitReport report;
  report.t_min = mode.omega0 / (2.0 * constants::k_boltzmann) *
                 std::sqrt(budget.force_psd * s_xd);
  report.n_min = constants::k_boltzmann * report.t_min /
                 (constants::hbar * mode.omega0);
  report.min_amplitude = thermal_amplitude(mode, report.t_min);
  report.caveat = kBackactionCaveat;
  return report;
}

double detector_noise_from_flux(double squid_flux_psd, double flux_coupling,
                                double flux_transfer_ratio) {
  if (!(squid_flux_psd >= 0.0)) {
    throw std::invalid_argument("squid_flux_psd must be >= 0");
  }
  if (!(flux_coupling > 0.0)) {
    throw std::invalid_argument(
        "detector_noise_from_flux: zero flux coupling, detection impossible");
  }
  if (!(flux_transfer_ratio > 0.0)) {
    throw std::invalid_argument("flux_transfer_ratio must be > 0");
  }
  const double asd = std::sqrt(squid_flux_psd) * constants::flux_quantum /
                     (flux_transfer_ratio * flux_coupling);
  return asd * asd;
}

double resolved_detector_psd(const NoiseBudget& budget) {
  if (budget.detector_psd > 0.0) return budget.detector_psd;
  if (budget.squid_flux_psd && budget.flux_coupling && budget.flux_transfer_ratio) {
    return detector_noise_from_flux(*budget.squid_flux_psd, *budget.flux_coupling,
                                    *budget.flux_transfer_ratio);
  }
  return budget.detector_psd;
}

namespace {

struct RowBuilder {
  const std::map<std::string, double>& paper;
  std::vector<TableRow> rows;

  void add(const std::string& name, const std::string& unit,
           std::optional<double> computed, const std::string& missing = "") {
    TableRow row;
    row.name = name;
    row.unit = unit;
    row.computed = computed;
    row.missing = missing;
    const auto it = paper.find(name);
    if (it != paper.end()) row.paper = it->second;
    if (row.computed && row.paper && *row.paper != 0.0) {
      row.rel_dev = std::abs(*row.computed - *row.paper) / std::abs(*row.paper);
    }
    rows.push_back(std::move(row));
  }
};

}  // namespace

bool TableReport::all_within(double tolerance) const {
  for (const auto& row : rows) {
    if (row.rel_dev && *row.rel_dev > tolerance) return false;
  }
  return true;
}

TableReport table_report(const TableFixture& fixture) {
  RowBuilder b{fixture.paper, {}};

  std::optional<double> inertia, moment;
  const MagnetValidation mv = validate(fixture.magnet);
  if (mv.ok()) {
    inertia = moment_of_inertia(fixture.magnet);
    moment = dipole_moment(fixture.magnet);
  }
  b.add("inertia", "kg*m^2", inertia, mv.ok() ? "" : "magnet spec invalid");
  b.add("dipole_moment", "A*m^2", moment, mv.ok() ? "" : "magnet spec invalid");

  auto mode_rows = [&](const TableModeFixture& mf, const std::string& prefix,
                       const std::string& len_unit, const std::string& f_unit) {
    const bool mode_ok = mf.mode.omega0 > 0.0 && mf.mode.inertia > 0.0 &&
                         mf.mode.quality_factor > 0.0;
    const std::string missing = mode_ok ? "" : "mode parameters missing";

    auto force_asd = [&](double t) -> std::optional<double> {
      if (!mode_ok || !(t > 0.0)) return std::nullopt;
      return std::sqrt(thermal_force_psd(t, mf.mode.inertia, mf.mode.omega0,
                                         mf.mode.quality_factor));
    };
    auto amplitude = [&](double t) -> std::optional<double> {
      if (!mode_ok || !(t > 0.0)) return std::nullopt;
      return thermal_amplitude(mf.mode, t);
    };
    auto tmin = [&](double t_bath, double det_asd) -> std::optional<double> {
      const auto sf = force_asd(t_bath);
      if (!sf || !(det_asd > 0.0)) return std::nullopt;
      return mf.mode.omega0 / (2.0 * constants::k_boltzmann) * (*sf) * det_asd;
    };

    b.add(prefix + "_force_noise_equilibrium", f_unit,
          force_asd(mf.equilibrium_temperature), missing);
    b.add(prefix + "_force_noise_future", f_unit,
          force_asd(mf.future_bath_temperature), missing);

    const auto tmin_cur = tmin(mf.equilibrium_temperature, mf.detector_asd);
    const auto tmin_fut = tmin(mf.future_bath_temperature, mf.future_detector_asd);
    b.add(prefix + "_min_temperature_current", "K", tmin_cur,
          tmin_cur ? "" : "needs equilibrium temperature and detector noise");
    b.add(prefix + "_min_temperature_future", "K", tmin_fut,
          tmin_fut ? "" : "needs future bath temperature and detector noise");

    std::optional<double> nmin_fut;
    if (tmin_fut && mode_ok) {
      nmin_fut = constants::k_boltzmann * (*tmin_fut) /
                 (constants::hbar * mf.mode.omega0);
    }
    b.add(prefix + "_min_phonons_future", "-", nmin_fut,
          nmin_fut ? "" : "needs the future minimum temperature");

    b.add(prefix + "_amplitude_equilibrium", len_unit,
          amplitude(mf.equilibrium_temperature), missing);
    b.add(prefix + "_amplitude_reference", len_unit,
          amplitude(mf.reference_temperature), missing);
    b.add(prefix + "_amplitude_feedback", len_unit,
          amplitude(mf.feedback_temperature), missing);
    b.add(prefix + "_min_amplitude_current", len_unit,
          tmin_cur ? amplitude(*tmin_cur) : std::nullopt,
          tmin_cur ? "" : "needs the current minimum temperature");
    b.add(prefix + "_min_amplitude_future", len_unit,
          tmin_fut ? amplitude(*tmin_fut) : std::nullopt,
          tmin_fut ? "" : "needs the future minimum temperature");
  };

  mode_rows(fixture.z, "z", "m", "N/rtHz");
  mode_rows(fixture.beta, "beta", "rad", "N*m/rtHz");

  TableReport report;
  report.rows = std::move(b.rows);
  for (const auto& row : report.rows) {
    if (row.rel_dev) report.max_rel_dev = std::max(report.max_rel_dev, *row.rel_dev);
  }
  return report;
}

std::string table_report_text(const TableReport& report, double tolerance) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-34s %14s %14s %9s %s\n", "row",
                "computed", "published", "dev", "status");
  out += line;
  for (const auto& row : report.rows) {
    char computed[32] = "-", paper[32] = "-", dev[32] = "-";
    if (row.computed) std::snprintf(computed, sizeof(computed), "%.4g", *row.computed);
    if (row.paper) std::snprintf(paper, sizeof(paper), "%.4g", *row.paper);
    if (row.rel_dev) std::snprintf(dev, sizeof(dev), "%.2f%%", *row.rel_dev * 100.0);
    const char* status = "ok";
    if (!row.missing.empty()) {
      status = "missing-inputs";
    } else if (!row.rel_dev) {
      status = row.computed ? "no-published-value" : "not-computed";
    } else if (*row.rel_dev > tolerance) {
      status = "OUT-OF-TOLERANCE";
    }
    std::snprintf(line, sizeof(line), "%-34s %14s %14s %9s %s\n", row.name.c_str(),
                  computed, paper, dev, status);
    out += line;
  }
  std::snprintf(line, sizeof(line), "max relative deviation: %.3f%% (tolerance %.1f%%)\n",
                report.max_rel_dev * 100.0, tolerance * 100.0);
  out += line;
  return out;
}

}  // namespace maglev
