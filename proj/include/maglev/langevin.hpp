#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "maglev/mode.hpp"
#include "maglev/timeseries.hpp"

namespace maglev {

/// Stochastic drive configuration. PSDs are one-sided. Detector noise is
/// added to the measured channel only; it reaches the dynamics exclusively
/// through the feedback loop.
struct NoiseConfig {
  bool thermal = true;
  double vibration_accel_psd = 0.0;  // (m/s^2)^2/Hz, applied as inertial force
  double detector_noise_psd = 0.0;   // m^2/Hz or rad^2/Hz on the measurement
  uint64_t seed = 1;
};

enum class FeedbackMode { off, ideal_velocity, filtered_displacement };

/// Cold-damping controller. In ideal_velocity mode the feedback force is
/// -inertia * gain * v_meas with v_meas differenced from the measured
/// position, so `gain` is the target Gamma_FB in 1/s. The filtered mode runs
/// measurement -> band-pass biquad -> delay (phase_offset at the band centre
/// plus loop_delay) -> force; with phase_offset = 3 pi/2 it approximates
/// velocity damping with the same gain meaning at band centre.
struct FeedbackConfig {
  FeedbackMode mode = FeedbackMode::off;
  double gain = 0.0;          // 1/s
  double phase_offset = 0.0;  // rad, filtered mode
  double bandpass_center = 0.0;  // rad/s; 0 = use mode omega0
  double bandpass_width = 0.0;   // rad/s, full width; required in filtered mode
  double loop_delay = 0.0;       // s
};

struct SimOptions {
  std::optional<double> x0;  // initial displacement; default: thermal draw
  std::optional<double> v0;
  bool record_true = true;
  bool record_measured = true;
  bool record_feedback = false;
  uint64_t stream_index = 0;  // RNG stream selector under the master seed
};

struct SimResult {
  TimeSeries series;
  bool unstable = false;
  std::string note;
};

/// Integrates the single-mode equation of motion
///   x'' + Gamma0 x' + omega0^2 x = (F_th + F_FB)/inertia
/// with semi-implicit Euler-Maruyama and exact-variance noise increments.
/// Preconditions: timestep < 0.05 * (2 pi / omega0), duration >= 100 periods.
/// An unstable loop configuration is flagged in the result, not thrown.
SimResult simulate(const ModeSpec& mode, const NoiseConfig& noise,
                   const FeedbackConfig& feedback, double timestep,
                   double duration, const SimOptions& options = {});

struct RunStats {
  double mean_x2 = 0.0;
  double mean_v2 = 0.0;
  bool unstable = false;
};

/// Ensemble of independent runs (per-run RNG streams derived from the seed
/// and run index; grouping into SIMD lanes or threads does not change
/// results). Statistics accumulate after `discard_fraction` of the duration.
std::vector<RunStats> simulate_ensemble(const ModeSpec& mode,
                                        const NoiseConfig& noise,
                                        const FeedbackConfig& feedback,
                                        double timestep, double duration,
                                        int n_runs,
                                        double discard_fraction = 0.2);

/// Cold-damping prediction T_fb = T Gamma0 / (Gamma0 + Gamma_FB).
double predicted_feedback_temperature(double bath_temperature, double gamma0,
                                      double gamma_fb);

struct GainSweepEntry {
  double gain = 0.0;
  double temperature = 0.0;  // K, equipartition from the true-position channel
  bool unstable = false;
};

struct GainSweepResult {
  std::vector<GainSweepEntry> entries;
  int best_index = -1;  // argmin temperature over stable entries
};

struct GainSweepOptions {
  int runs_per_gain = 4;
  double settle_gammas = 10.0;   // discard 10/(Gamma0+gain) seconds
  double measure_gammas = 200.0; // then average over 200/(Gamma0+gain) seconds
  double timestep = 0.0;         // 0 = period/200
};

/// Runs the feedback template at each gain and extracts the steady-state
/// equipartition temperature. Unstable runs are kept in the table but
/// excluded from the arg-min. Requires >= 3 gains.
GainSweepResult gain_sweep(const ModeSpec& mode, const NoiseConfig& noise,
                           const FeedbackConfig& feedback_template,
                           const std::vector<double>& gains,
                           const GainSweepOptions& options = {});

/// Wall-clock guard: returns a ModeSpec with Q reduced (and the suggested
/// duration shrunk with it) so duration/timestep stays under max_steps.
/// Equilibrium statistics are Q-independent; feedback ratios must be
/// re-expressed against the new Gamma0.
struct QReduction {
  ModeSpec mode;
  double duration;
  double factor = 1.0;
  std::string note;
};
QReduction reduce_q_for_budget(const ModeSpec& mode, double timestep,
                               double duration, uint64_t max_steps);

/// Default integration step, period/200.
double default_timestep(const ModeSpec& mode);

}  // namespace maglev
