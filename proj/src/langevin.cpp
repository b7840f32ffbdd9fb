#include "maglev/langevin.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "maglev/constants.hpp"
#include "maglev/simd/kernels.hpp"
#include "maglev/simd/rng.hpp"

namespace maglev {

namespace {

using simd::FeedbackKernelMode;
using simd::LangevinBatchParams;
using simd::LangevinBatchResult;
using simd::LangevinRecording;

int worker_count() {
  if (const char* env = std::getenv("MAGLEV_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

void check_preconditions(const ModeSpec& mode, double timestep, double duration) {
  require_valid(mode);
  const double period = constants::two_pi / mode.omega0;
  if (!(timestep > 0.0) || timestep >= 0.05 * period) {
    throw std::invalid_argument("timestep must be positive and < 0.05 * (2 pi / omega0)");
  }
  if (!(duration >= 100.0 * period)) {
    throw std::invalid_argument("duration must cover at least 100 oscillation periods");
  }
}

double total_force_psd(const ModeSpec& mode, const NoiseConfig& noise) {
  double psd = 0.0;
  if (noise.thermal) psd += thermal_force_psd(mode);
  if (noise.vibration_accel_psd < 0.0 || noise.detector_noise_psd < 0.0) {
    throw std::invalid_argument("noise PSDs must be >= 0");
  }
  psd += mode.inertia * mode.inertia * noise.vibration_accel_psd;
  return psd;
}

// Fills everything except lanes/seeds/init overrides.
LangevinBatchParams base_params(const ModeSpec& mode, const NoiseConfig& noise,
                                const FeedbackConfig& fb, double dt,
                                double duration) {
  check_preconditions(mode, dt, duration);
  if (fb.gain < 0.0) throw std::invalid_argument("feedback gain must be >= 0");

  LangevinBatchParams p;
  p.dt = dt;
  p.steps = static_cast<uint64_t>(std::llround(duration / dt));
  p.omega0_sq = mode.omega0 * mode.omega0;
  p.gamma0 = mode.gamma0();
  p.inertia = mode.inertia;
  p.sigma_v = std::sqrt(total_force_psd(mode, noise) * dt / 2.0) / mode.inertia;
  p.sigma_meas = std::sqrt(noise.detector_noise_psd / (2.0 * dt));
  p.gain = fb.gain;

  switch (fb.mode) {
    case FeedbackMode::off:
      p.feedback = FeedbackKernelMode::off;
      break;
    case FeedbackMode::ideal_velocity:
      p.feedback = FeedbackKernelMode::ideal_velocity;
      break;
    case FeedbackMode::filtered_displacement: {
      p.feedback = FeedbackKernelMode::filtered;
      const double wc = fb.bandpass_center > 0.0 ? fb.bandpass_center : mode.omega0;
      if (!(fb.bandpass_width > 0.0)) {
        throw std::invalid_argument("bandpass_width must be > 0 in filtered mode");
      }
      p.omega_c = wc;
      // band-pass biquad (constant peak gain), bilinear design
      const double q_bp = wc / fb.bandpass_width;
      const double w_d = wc * dt;  // radians per sample
      if (w_d >= constants::pi) {
        throw std::invalid_argument("bandpass centre above Nyquist for this timestep");
      }
      const double alpha = std::sin(w_d) / (2.0 * q_bp);
      const double a0 = 1.0 + alpha;
      p.bq_b0 = alpha / a0;
      p.bq_b1 = 0.0;
      p.bq_b2 = -alpha / a0;
      p.bq_a1 = -2.0 * std::cos(w_d) / a0;
      p.bq_a2 = (1.0 - alpha) / a0;
      // phase shift realized as a delay at the band centre, plus loop delay
      double phase = std::fmod(fb.phase_offset, constants::two_pi);
      if (phase < 0.0) phase += constants::two_pi;
      const double delay_s = phase / wc + std::max(0.0, fb.loop_delay);
      p.delay_samples = static_cast<uint32_t>(std::llround(delay_s / dt));
      break;
    }
  }

  // Thermal-equilibrium initial draw widths.
  const double t_init = noise.thermal ? mode.bath_temperature : 0.0;
  p.sigma_x_init = std::sqrt(constants::k_boltzmann * t_init /
                             (mode.inertia * p.omega0_sq));
  p.sigma_v_init = mode.omega0 * p.sigma_x_init;
  return p;
}

double divergence_scale(const LangevinBatchParams& p) {
  double scale = std::max(p.sigma_x_init, p.sigma_meas);
  for (int l = 0; l < p.lanes; ++l) scale = std::max(scale, std::abs(p.x0[l]));
  return std::max(scale, 1e-12);
}

}  // namespace

double default_timestep(const ModeSpec& mode) {
  return constants::two_pi / mode.omega0 / 200.0;
}

SimResult simulate(const ModeSpec& mode, const NoiseConfig& noise,
                   const FeedbackConfig& feedback, double timestep,
                   double duration, const SimOptions& options) {
  LangevinBatchParams p = base_params(mode, noise, feedback, timestep, duration);
  p.lanes = 1;
  p.seeds[0] = simd::derive_stream_seed(noise.seed, options.stream_index);
  for (int l = 1; l < simd::kMaxLanes; ++l) {
    p.seeds[l] = simd::derive_stream_seed(noise.seed, options.stream_index + l);
  }
  if (options.x0 || options.v0) {
    p.use_given_init = true;
    p.x0[0] = options.x0.value_or(0.0);
    p.v0[0] = options.v0.value_or(0.0);
  }
  p.diverge_threshold = 1e9 * divergence_scale(p);

  const uint64_t samples = p.steps + 1;
  std::vector<double> rec_x, rec_xm, rec_f;
  LangevinRecording rec;
  rec.capacity = samples;
  if (options.record_true) {
    rec_x.resize(samples);
    rec.true_position = rec_x.data();
  }
  if (options.record_measured) {
    rec_xm.resize(samples);
    rec.measured_position = rec_xm.data();
  }
  if (options.record_feedback) {
    rec_f.resize(samples);
    rec.feedback_force = rec_f.data();
  }

  LangevinBatchResult out;
  simd::run_langevin_batch(simd::active_level(), p, rec, out);

  SimResult result;
  result.series.sample_rate = 1.0 / timestep;
  result.series.unit = mode.kind == ModeKind::translational ? SignalUnit::meter
                                                            : SignalUnit::radian;
  if (options.record_true) {
    result.series.channel_names.emplace_back(kTruePosition);
    result.series.channels.push_back(std::move(rec_x));
  }
  if (options.record_measured) {
    result.series.channel_names.emplace_back(kMeasuredPosition);
    result.series.channels.push_back(std::move(rec_xm));
  }
  if (options.record_feedback) {
    result.series.channel_names.emplace_back(kFeedbackForce);
    result.series.channels.push_back(std::move(rec_f));
  }
  if (out.first_bad_step[0] != simd::kStableStep) {
    result.unstable = true;
    std::ostringstream os;
    os << "trajectory diverged near t = "
       << static_cast<double>(out.first_bad_step[0]) * timestep
       << " s (effective damping <= 0?)";
    result.note = os.str();
  }
  return result;
}

std::vector<RunStats> simulate_ensemble(const ModeSpec& mode,
                                        const NoiseConfig& noise,
                                        const FeedbackConfig& feedback,
                                        double timestep, double duration,
                                        int n_runs, double discard_fraction) {
  if (n_runs <= 0) throw std::invalid_argument("n_runs must be > 0");
  if (!(discard_fraction >= 0.0 && discard_fraction < 1.0)) {
    throw std::invalid_argument("discard_fraction must be in [0, 1)");
  }
  const LangevinBatchParams base = base_params(mode, noise, feedback, timestep,
                                               duration);
  const simd::Level level = simd::active_level();
  const int width = simd::lane_width(level);

  std::vector<RunStats> stats(n_runs);
  const int n_groups = (n_runs + width - 1) / width;

  auto run_group = [&](int group) {
    LangevinBatchParams p = base;
    p.discard_steps = static_cast<uint64_t>(
        static_cast<double>(p.steps) * discard_fraction);
    const int first = group * width;
    p.lanes = std::min(width, n_runs - first);
    for (int l = 0; l < simd::kMaxLanes; ++l) {
      p.seeds[l] = simd::derive_stream_seed(
          noise.seed, static_cast<uint64_t>(first + (l < p.lanes ? l : 0)));
    }
    p.diverge_threshold = 1e9 * divergence_scale(p);
    LangevinBatchResult out;
    simd::run_langevin_batch(level, p, {}, out);
    for (int l = 0; l < p.lanes; ++l) {
      RunStats& s = stats[first + l];
      s.mean_x2 = out.sum_x2[l] / static_cast<double>(out.stat_count);
      s.mean_v2 = out.sum_v2[l] / static_cast<double>(out.stat_count);
      s.unstable = out.first_bad_step[l] != simd::kStableStep;
    }
  };

  const int workers = std::min(worker_count(), n_groups);
  if (workers <= 1) {
    for (int g = 0; g < n_groups; ++g) run_group(g);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (int g = next.fetch_add(1); g < n_groups; g = next.fetch_add(1)) {
          run_group(g);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  return stats;
}

double predicted_feedback_temperature(double bath_temperature, double gamma0,
                                      double gamma_fb) {
  if (!(gamma0 > 0.0)) throw std::invalid_argument("gamma0 must be > 0");
  if (!(gamma_fb >= 0.0)) throw std::invalid_argument("gamma_fb must be >= 0");
  return bath_temperature * gamma0 / (gamma0 + gamma_fb);
}

GainSweepResult gain_sweep(const ModeSpec& mode, const NoiseConfig& noise,
                           const FeedbackConfig& feedback_template,
                           const std::vector<double>& gains,
                           const GainSweepOptions& options) {
  if (gains.size() < 3) throw std::invalid_argument("gain_sweep needs >= 3 gains");
  require_valid(mode);
  if (feedback_template.mode == FeedbackMode::off) {
    throw std::invalid_argument("gain_sweep needs a feedback mode");
  }
  const double dt = options.timestep > 0.0 ? options.timestep
                                           : default_timestep(mode);
  const double period = constants::two_pi / mode.omega0;

  GainSweepResult result;
  result.entries.reserve(gains.size());
  uint64_t stream_base = 0;
  for (double gain : gains) {
    FeedbackConfig fb = feedback_template;
    fb.gain = gain;
    const double gamma_eff = mode.gamma0() + gain;
    const double settle = options.settle_gammas / gamma_eff;
    const double measure = options.measure_gammas / gamma_eff;
    const double duration = std::max(settle + measure, 101.0 * period);
    const double discard = settle / duration;

    NoiseConfig run_noise = noise;
    run_noise.seed = simd::derive_stream_seed(noise.seed, (1ULL << 32) + stream_base);
    stream_base += static_cast<uint64_t>(options.runs_per_gain);

    const auto stats = simulate_ensemble(mode, run_noise, fb, dt, duration,
                                         options.runs_per_gain, discard);
    GainSweepEntry entry;
    entry.gain = gain;
    double sum = 0.0;
    int good = 0;
    for (const auto& s : stats) {
      if (s.unstable) {
        entry.unstable = true;
        continue;
      }
      sum += s.mean_x2;
      ++good;
    }
    if (good > 0) {
      const double mean_x2 = sum / good;
      entry.temperature = mode.inertia * mode.omega0 * mode.omega0 * mean_x2 /
                          constants::k_boltzmann;
    } else {
      entry.temperature = std::numeric_limits<double>::quiet_NaN();
      entry.unstable = true;
    }
    result.entries.push_back(entry);
  }

  for (size_t i = 0; i < result.entries.size(); ++i) {
    const auto& e = result.entries[i];
    if (e.unstable) continue;
    if (result.best_index < 0 ||
        e.temperature < result.entries[result.best_index].temperature) {
      result.best_index = static_cast<int>(i);
    }
  }
  return result;
}

QReduction reduce_q_for_budget(const ModeSpec& mode, double timestep,
                               double duration, uint64_t max_steps) {
  QReduction r;
  r.mode = mode;
  r.duration = duration;
  const double steps = duration / timestep;
  if (max_steps == 0 || steps <= static_cast<double>(max_steps)) return r;
  const double factor = steps / static_cast<double>(max_steps);
  r.factor = factor;
  r.mode.quality_factor = mode.quality_factor / factor;
  r.duration = duration / factor;
  std::ostringstream os;
  os << "Q reduced by " << factor << " (to " << r.mode.quality_factor
     << ") and duration shrunk to " << r.duration
     << " s to fit the step budget; equilibrium statistics are Q-independent, "
        "rescale feedback gains against the new Gamma0";
  r.note = os.str();
  return r;
}

}  // namespace maglev
