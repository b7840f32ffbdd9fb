#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

// Runtime-dispatched compute kernels. Each kernel has a scalar reference
// build and an AVX2 build generated from the same template; the dispatcher
// picks per process. Lanes are independent trajectories/elements, so results
// are bit-identical across levels and batch groupings.
namespace maglev::simd {

enum class Level { scalar, avx2 };

/// Kernel level in use: AVX2+FMA when the CPU supports it, overridable with
/// MAGLEV_SIMD=scalar|avx2|auto.
Level active_level();
const char* level_name(Level level);
int lane_width(Level level);
bool cpu_supports_avx2();

inline constexpr int kMaxLanes = 4;
inline constexpr uint64_t kStableStep = ~0ULL;

enum class FeedbackKernelMode : int { off = 0, ideal_velocity = 1, filtered = 2 };

/// Flattened per-batch integration plan for the single-mode Langevin kernel.
/// One lane = one trajectory with its own RNG stream.
struct LangevinBatchParams {
  double dt = 0.0;
  uint64_t steps = 0;
  uint64_t discard_steps = 0;  // samples before this index stay out of the stats
  double omega0_sq = 0.0;
  double gamma0 = 0.0;
  double inertia = 0.0;
  double sigma_v = 0.0;     // per-step velocity kick, sqrt(S_F_total dt / 2)/inertia
  double sigma_meas = 0.0;  // detector noise per sample, sqrt(S_xd / (2 dt))
  FeedbackKernelMode feedback = FeedbackKernelMode::off;
  double gain = 0.0;     // ideal mode: Gamma_FB [1/s]; filtered: force scale/omega_c
  double omega_c = 0.0;  // filtered-mode band centre
  // biquad band-pass coefficients, a0 normalized away
  double bq_b0 = 0.0, bq_b1 = 0.0, bq_b2 = 0.0, bq_a1 = 0.0, bq_a2 = 0.0;
  uint32_t delay_samples = 0;

  int lanes = 1;  // 1..kMaxLanes used; remaining lanes run but are ignored
  uint64_t seeds[kMaxLanes] = {};
  bool use_given_init = false;
  double x0[kMaxLanes] = {};
  double v0[kMaxLanes] = {};
  double sigma_x_init = 0.0;  // thermal-equilibrium initial draw widths
  double sigma_v_init = 0.0;
  double diverge_threshold = 0.0;  // 0 disables the divergence check
};

/// Optional per-lane recording. Arrays are lane-major with `capacity` samples
/// per lane (sample 0 is the initial state, then one per step).
struct LangevinRecording {
  double* true_position = nullptr;
  double* measured_position = nullptr;
  double* feedback_force = nullptr;
  uint64_t capacity = 0;
};

struct LangevinBatchResult {
  double sum_x2[kMaxLanes] = {};
  double sum_v2[kMaxLanes] = {};
  uint64_t stat_count = 0;
  uint64_t first_bad_step[kMaxLanes] = {kStableStep, kStableStep, kStableStep,
                                        kStableStep};
  double final_x[kMaxLanes] = {};
  double final_v[kMaxLanes] = {};
};

void run_langevin_batch(Level level, const LangevinBatchParams& params,
                        const LangevinRecording& rec, LangevinBatchResult& out);

/// Fills lane-major buffers with N(0,1) variates: out[lane*count + i].
/// `count` is rounded down to an even number of Box-Muller pairs.
void gaussian_fill(Level level, const uint64_t* lane_seeds, int lanes,
                   double* out, size_t count);

/// out[i] = (x[i] - mean) * w[i]
void apply_window(Level level, const double* x, const double* w, double mean,
                  double* out, size_t n);

/// accum[k] += re_k^2 + im_k^2 over interleaved complex bins.
void accumulate_power(Level level, const double* interleaved, size_t bins,
                      double* accum);

}  // namespace maglev::simd
