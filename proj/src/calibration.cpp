#include "maglev/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace maglev {

double mode_temperature(double measured_rms, const CalibrationReference& reference) {
  if (!(measured_rms > 0.0)) {
    throw std::invalid_argument("measured_rms must be > 0");
  }
  if (!(reference.reference_temperature > 0.0) || !(reference.reference_rms > 0.0)) {
    throw std::invalid_argument("calibration reference must be positive");
  }
  const double ratio = measured_rms / reference.reference_rms;
  return reference.reference_temperature * ratio * ratio;
}

double conversion_factor(double voltage_rms, const ModeSpec& mode,
                         double temperature) {
  if (!(voltage_rms > 0.0)) throw std::invalid_argument("voltage_rms must be > 0");
  require_valid(mode);
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be > 0");
  return voltage_rms / thermal_rms(mode, temperature);
}

namespace {

double sse_constant(const std::vector<double>& y, size_t lo, size_t hi) {
  if (hi <= lo) return 0.0;
  double mean = 0.0;
  for (size_t i = lo; i < hi; ++i) mean += y[i];
  mean /= static_cast<double>(hi - lo);
  double sse = 0.0;
  for (size_t i = lo; i < hi; ++i) sse += (y[i] - mean) * (y[i] - mean);
  return sse;
}

}  // namespace

ThermalLimitReport thermal_limit_diagnostic(std::vector<QAmplitudePoint> points) {
  if (points.size() < 4) {
    throw std::invalid_argument("thermal_limit_diagnostic needs >= 4 points");
  }
  for (const auto& p : points) {
    if (!(p.quality_factor > 0.0) || !(p.v_rms > 0.0)) {
      throw std::invalid_argument("Q and V_rms must be > 0");
    }
  }
  std::sort(points.begin(), points.end(),
            [](const QAmplitudePoint& a, const QAmplitudePoint& b) {
              return a.quality_factor < b.quality_factor;
            });
  const double span = points.back().quality_factor / points.front().quality_factor;
  if (span < 100.0) {
    throw std::invalid_argument(
        "thermal_limit_diagnostic needs >= 2 decades of Q span");
  }

  const size_t n = points.size();
  std::vector<double> logq(n), logv(n), lognorm(n);
  for (size_t i = 0; i < n; ++i) {
    logq[i] = std::log10(points[i].quality_factor);
    logv[i] = std::log10(points[i].v_rms);
    lognorm[i] = logv[i] - 0.5 * logq[i];  // log(V/sqrt(Q))
  }

  ThermalLimitReport report;
  report.points = points;
  report.thermal_limited.assign(n, false);

  // whole-range slope tests for single-regime data
  auto slope_of = [&](const std::vector<double>& y) {
    double qb = 0.0, yb = 0.0;
    for (size_t i = 0; i < n; ++i) {
      qb += logq[i];
      yb += y[i];
    }
    qb /= static_cast<double>(n);
    yb /= static_cast<double>(n);
    double sqq = 0.0, sqy = 0.0;
    for (size_t i = 0; i < n; ++i) {
      sqq += (logq[i] - qb) * (logq[i] - qb);
      sqy += (logq[i] - qb) * (y[i] - yb);
    }
    return sqy / sqq;
  };
  const double slope_v = slope_of(logv);
  const double slope_norm = slope_of(lognorm);
  if (std::abs(slope_v) < 0.1) {
    // V_rms flat in Q across the whole range
    std::fill(report.thermal_limited.begin(), report.thermal_limited.end(), true);
    report.thermal_q_min = points.front().quality_factor;
    report.thermal_q_max = points.back().quality_factor;
    return report;
  }
  if (std::abs(slope_norm) < 0.1) {
    report.vibration_q_min = points.front().quality_factor;
    report.vibration_q_max = points.back().quality_factor;
    return report;
  }

  // change point: thermal segment constant in log V, vibration segment
  // constant in log(V/sqrt(Q))
  size_t best_k = 2;
  double best_sse = std::numeric_limits<double>::infinity();
  for (size_t k = 2; k + 2 <= n; ++k) {
    const double sse = sse_constant(logv, 0, k) + sse_constant(lognorm, k, n);
    if (sse < best_sse) {
      best_sse = sse;
      best_k = k;
    }
  }
  for (size_t i = 0; i < n; ++i) report.thermal_limited[i] = i < best_k;
  report.crossover_q = std::sqrt(points[best_k - 1].quality_factor *
                                 points[best_k].quality_factor);
  report.thermal_q_min = points.front().quality_factor;
  report.thermal_q_max = points[best_k - 1].quality_factor;
  report.vibration_q_min = points[best_k].quality_factor;
  report.vibration_q_max = points.back().quality_factor;
  return report;
}

}  // namespace maglev
