#pragma once

#include <array>
#include <optional>

#include "maglev/timeseries.hpp"
#include "maglev/welch.hpp"

namespace maglev {

/// Thermal-peak model fitted to a PSD band:
///   S(omega) = D / ((omega0^2 - omega^2)^2 + omega^2 Gamma_total^2)
/// with D the drive constant (4 k_B T Gamma0 / inertia for a thermal mode)
/// and Gamma_total = Gamma0 + Gamma_FB.
struct LorentzianFit {
  double omega0 = 0.0;          // rad/s
  double gamma_total = 0.0;     // 1/s
  double drive_strength = 0.0;  // (unit)^2 s^-3
  std::array<std::array<double, 3>, 3> covariance{};  // (omega0, gamma, D)
  double residual_norm = 0.0;   // RMS log-space residual
};

struct LorentzianGuess {
  double omega0;
  double gamma_total;
  double drive_strength;
};

/// Weighted least squares of the model in log space over [f_lo, f_hi]
/// (log-space residuals of a Welch estimate are homoscedastic, so weights are
/// uniform there). Needs >= 10 bins containing a local maximum. Throws
/// fit_error on non-convergence, carrying the last residual in the message.
LorentzianFit fit_lorentzian(const PSDResult& psd, double f_lo, double f_hi,
                             const std::optional<LorentzianGuess>& guess = {});

struct RingdownFit {
  double amplitude0 = 0.0;      // envelope at t = 0
  double tau = 0.0;             // s, amplitude decay time
  double quality_factor = 0.0;  // omega0 tau / 2
  double fit_error_q = 0.0;     // 1 sigma from the regression covariance
};

/// Least squares of A0 exp(-t/tau) on the log of a positive, on-average
/// decaying envelope. Q = omega0 tau / 2. Throws fit_error if the envelope
/// does not decay.
RingdownFit fit_ringdown(const TimeSeries& envelope, double omega0,
                         const std::string& channel = "envelope");

/// Per-period peak envelope of an oscillating decay record.
TimeSeries extract_envelope(const TimeSeries& series, const std::string& channel,
                            double omega0);

}  // namespace maglev
