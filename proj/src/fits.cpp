#include "maglev/fits.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "maglev/constants.hpp"
#include "maglev/errors.hpp"

namespace maglev {

namespace {

// 3x3 solve via Cramer; returns false on a singular system.
bool solve3(const double a[3][3], const double b[3], double x[3]) {
  const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                     a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                     a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  if (!(std::abs(det) > 0.0) || !std::isfinite(det)) return false;
  double m[3][3];
  m[0][0] = a[1][1] * a[2][2] - a[1][2] * a[2][1];
  m[0][1] = a[0][2] * a[2][1] - a[0][1] * a[2][2];
  m[0][2] = a[0][1] * a[1][2] - a[0][2] * a[1][1];
  m[1][0] = a[1][2] * a[2][0] - a[1][0] * a[2][2];
  m[1][1] = a[0][0] * a[2][2] - a[0][2] * a[2][0];
  m[1][2] = a[0][2] * a[1][0] - a[0][0] * a[1][2];
  m[2][0] = a[1][0] * a[2][1] - a[1][1] * a[2][0];
  m[2][1] = a[0][1] * a[2][0] - a[0][0] * a[2][1];
  m[2][2] = a[0][0] * a[1][1] - a[0][1] * a[1][0];
  for (int i = 0; i < 3; ++i) {
    x[i] = (m[i][0] * b[0] + m[i][1] * b[1] + m[i][2] * b[2]) / det;
  }
  return true;
}

bool invert3(const double a[3][3], double inv[3][3]) {
  const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                     a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                     a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  if (!(std::abs(det) > 0.0) || !std::isfinite(det)) return false;
  inv[0][0] = (a[1][1] * a[2][2] - a[1][2] * a[2][1]) / det;
  inv[0][1] = (a[0][2] * a[2][1] - a[0][1] * a[2][2]) / det;
  inv[0][2] = (a[0][1] * a[1][2] - a[0][2] * a[1][1]) / det;
  inv[1][0] = (a[1][2] * a[2][0] - a[1][0] * a[2][2]) / det;
  inv[1][1] = (a[0][0] * a[2][2] - a[0][2] * a[2][0]) / det;
  inv[1][2] = (a[0][2] * a[1][0] - a[0][0] * a[1][2]) / det;
  inv[2][0] = (a[1][0] * a[2][1] - a[1][1] * a[2][0]) / det;
  inv[2][1] = (a[0][1] * a[2][0] - a[0][0] * a[2][1]) / det;
  inv[2][2] = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / det;
  return true;
}

struct Band {
  std::vector<double> omega;  // rad/s
  std::vector<double> log_s;  // ln(psd)
};

// theta = (omega0, ln Gamma, ln D)
double residual_sse(const Band& band, const double theta[3],
                    std::vector<double>* resid) {
  const double w0 = theta[0];
  const double gam = std::exp(theta[1]);
  double sse = 0.0;
  for (size_t i = 0; i < band.omega.size(); ++i) {
    const double w = band.omega[i];
    const double d = w0 * w0 - w * w;
    const double q = d * d + w * w * gam * gam;
    const double model = theta[2] - std::log(q);
    const double r = band.log_s[i] - model;
    if (resid) (*resid)[i] = r;
    sse += r * r;
  }
  return sse;
}

}  // namespace

LorentzianFit fit_lorentzian(const PSDResult& psd, double f_lo, double f_hi,
                             const std::optional<LorentzianGuess>& guess) {
  Band band;
  size_t peak_idx = 0;
  double peak_val = -1.0;
  double peak_freq = 0.0;
  for (size_t k = 0; k < psd.frequencies.size(); ++k) {
    const double f = psd.frequencies[k];
    if (f < f_lo || f > f_hi) continue;
    const double s = psd.values[k];
    if (!(s > 0.0)) continue;  // log-space fit skips empty bins
    if (s > peak_val) {
      peak_val = s;
      peak_idx = band.omega.size();
      peak_freq = f;
    }
    band.omega.push_back(constants::two_pi * f);
    band.log_s.push_back(std::log(s));
  }
  const size_t n = band.omega.size();
  if (n < 10) throw fit_error("fit_lorentzian: band must contain >= 10 usable bins");
  if (peak_idx == 0 || peak_idx == n - 1) {
    throw fit_error("fit_lorentzian: band has no interior local maximum");
  }

  double theta[3];
  if (guess) {
    theta[0] = guess->omega0;
    theta[1] = std::log(guess->gamma_total);
    theta[2] = std::log(guess->drive_strength);
  } else {
    // peak bin for omega0, half-power width for Gamma, peak height for D
    const double w0g = constants::two_pi * peak_freq;
    double f_left = f_lo, f_right = f_hi;
    for (size_t i = peak_idx; i-- > 0;) {
      if (std::exp(band.log_s[i]) < 0.5 * peak_val) {
        f_left = band.omega[i] / constants::two_pi;
        break;
      }
    }
    for (size_t i = peak_idx + 1; i < n; ++i) {
      if (std::exp(band.log_s[i]) < 0.5 * peak_val) {
        f_right = band.omega[i] / constants::two_pi;
        break;
      }
    }
    double gamma_g = constants::two_pi * std::max(f_right - f_left, 1e-12);
    theta[0] = w0g;
    theta[1] = std::log(gamma_g);
    theta[2] = std::log(peak_val * w0g * w0g * gamma_g * gamma_g);
  }

  // Levenberg-Marquardt in log space
  std::vector<double> resid(n);
  double sse = residual_sse(band, theta, &resid);
  double lambda = 1e-3;
  bool converged = false;
  for (int iter = 0; iter < 200 && !converged; ++iter) {
    const double w0 = theta[0];
    const double gam = std::exp(theta[1]);
    double jtj[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double jtr[3] = {0, 0, 0};
    for (size_t i = 0; i < n; ++i) {
      const double w = band.omega[i];
      const double d = w0 * w0 - w * w;
      const double q = d * d + w * w * gam * gam;
      const double j0 = -4.0 * w0 * d / q;              // d model / d omega0
      const double j1 = -2.0 * w * w * gam * gam / q;   // d model / d ln Gamma
      const double j2 = 1.0;                            // d model / d ln D
      const double j[3] = {j0, j1, j2};
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) jtj[a][b] += j[a] * j[b];
        jtr[a] += j[a] * resid[i];
      }
    }
    double lhs[3][3];
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) lhs[a][b] = jtj[a][b];
      lhs[a][a] *= (1.0 + lambda);
    }
    double step[3];
    if (!solve3(lhs, jtr, step)) {
      lambda *= 10.0;
      if (lambda > 1e12) break;
      continue;
    }
    double trial[3] = {theta[0] + step[0], theta[1] + step[1], theta[2] + step[2]};
    const double trial_sse = residual_sse(band, trial, nullptr);
    if (std::isfinite(trial_sse) && trial_sse < sse) {
      const double improvement = (sse - trial_sse) / std::max(sse, 1e-300);
      theta[0] = trial[0];
      theta[1] = trial[1];
      theta[2] = trial[2];
      sse = residual_sse(band, theta, &resid);
      lambda = std::max(lambda * 0.3, 1e-12);
      const double rel_step = std::abs(step[0]) / std::max(std::abs(theta[0]), 1e-300);
      if (improvement < 1e-12 && rel_step < 1e-10) converged = true;
    } else {
      lambda *= 10.0;
      if (lambda > 1e12) break;
    }
  }
  if (!(sse >= 0.0) || !std::isfinite(sse)) {
    throw fit_error("fit_lorentzian: diverged");
  }
  // Accept either explicit convergence or a stalled-but-finite solution;
  // reject only when the residual is still enormous.
  const double rms = std::sqrt(sse / static_cast<double>(n));
  if (!converged && rms > 10.0) {
    std::ostringstream os;
    os << "fit_lorentzian: no convergence, last RMS log residual " << rms;
    throw fit_error(os.str());
  }

  LorentzianFit fit;
  fit.omega0 = theta[0];
  fit.gamma_total = std::exp(theta[1]);
  fit.drive_strength = std::exp(theta[2]);
  fit.residual_norm = rms;

  // covariance of (omega0, Gamma, D) via the Jacobian at the optimum
  const double s2 = sse / static_cast<double>(n > 3 ? n - 3 : 1);
  double jtj[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  const double w0 = theta[0];
  const double gam = fit.gamma_total;
  for (size_t i = 0; i < n; ++i) {
    const double w = band.omega[i];
    const double d = w0 * w0 - w * w;
    const double q = d * d + w * w * gam * gam;
    const double j[3] = {-4.0 * w0 * d / q, -2.0 * w * w * gam * gam / q, 1.0};
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) jtj[a][b] += j[a] * j[b];
    }
  }
  double inv[3][3];
  if (invert3(jtj, inv)) {
    // transform (omega0, lnG, lnD) covariance to (omega0, G, D)
    const double scale[3] = {1.0, fit.gamma_total, fit.drive_strength};
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        fit.covariance[a][b] = s2 * inv[a][b] * scale[a] * scale[b];
      }
    }
  }
  return fit;
}

RingdownFit fit_ringdown(const TimeSeries& envelope, double omega0,
                         const std::string& channel) {
  if (!(omega0 > 0.0)) throw std::invalid_argument("omega0 must be > 0");
  const auto& values = envelope.has_channel(channel)
                           ? envelope.channel(channel)
                           : envelope.channels.front();
  const double dt = 1.0 / envelope.sample_rate;
  std::vector<double> t, y;
  t.reserve(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) {
      throw fit_error("fit_ringdown: envelope must be strictly positive");
    }
    t.push_back(static_cast<double>(i) * dt);
    y.push_back(std::log(values[i]));
  }
  const size_t n = t.size();
  if (n < 3) throw fit_error("fit_ringdown: need at least 3 envelope samples");

  double tbar = 0.0, ybar = 0.0;
  for (size_t i = 0; i < n; ++i) {
    tbar += t[i];
    ybar += y[i];
  }
  tbar /= static_cast<double>(n);
  ybar /= static_cast<double>(n);
  double stt = 0.0, sty = 0.0;
  for (size_t i = 0; i < n; ++i) {
    stt += (t[i] - tbar) * (t[i] - tbar);
    sty += (t[i] - tbar) * (y[i] - ybar);
  }
  const double slope = sty / stt;
  if (!(slope < 0.0)) {
    throw fit_error("fit_ringdown: envelope does not decay on average");
  }
  const double intercept = ybar - slope * tbar;

  double sse = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double r = y[i] - (intercept + slope * t[i]);
    sse += r * r;
  }
  const double var_slope = n > 2 ? sse / static_cast<double>(n - 2) / stt : 0.0;

  RingdownFit fit;
  fit.amplitude0 = std::exp(intercept);
  fit.tau = -1.0 / slope;
  fit.quality_factor = omega0 * fit.tau / 2.0;
  // sigma_Q = omega0/2 * sigma_tau, sigma_tau = sigma_slope / slope^2
  fit.fit_error_q = omega0 / 2.0 * std::sqrt(var_slope) / (slope * slope);
  return fit;
}

TimeSeries extract_envelope(const TimeSeries& series, const std::string& channel,
                            double omega0) {
  series.validate();
  if (!(omega0 > 0.0)) throw std::invalid_argument("omega0 must be > 0");
  const auto& x = series.channel(channel);
  const double dt = 1.0 / series.sample_rate;
  const size_t per_period = std::max<size_t>(
      2, static_cast<size_t>(std::llround(constants::two_pi / omega0 / dt)));
  TimeSeries env;
  env.sample_rate = series.sample_rate / static_cast<double>(per_period);
  env.unit = series.unit;
  env.channel_names = {"envelope"};
  env.channels.resize(1);
  auto& out = env.channels[0];
  for (size_t start = 0; start + per_period <= x.size(); start += per_period) {
    double peak = 0.0;
    for (size_t i = start; i < start + per_period; ++i) {
      peak = std::max(peak, std::abs(x[i]));
    }
    out.push_back(peak);
  }
  if (out.empty()) throw fit_error("extract_envelope: series shorter than one period");
  return env;
}

}  // namespace maglev
