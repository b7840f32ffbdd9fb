#pragma once

// Kernel bodies, templated over the lane architecture. Included by exactly
// two translation units: kernels_scalar.cpp and kernels_avx2.cpp.

#include <algorithm>
#include <cmath>
#include <vector>

#include "maglev/simd/kernels.hpp"
#include "maglev/simd/math.hpp"
#include "maglev/simd/rng.hpp"

namespace maglev::simd::impl {

template <class A>
struct KahanSum {
  typename A::f sum = A::fset(0.0);
  typename A::f comp = A::fset(0.0);
  void add(typename A::f x) {
    const auto y = A::sub(x, comp);
    const auto t = A::add(sum, y);
    comp = A::sub(A::sub(t, sum), y);
    sum = t;
  }
};

// Semi-implicit (symplectic) Euler-Maruyama:
//   v += dt * (F_fb/inertia - w0^2 x - Gamma0 v) + sigma_v * xi_f
//   x += dt * v
// with the measurement channel xm = x + sigma_meas * xi_d. The feedback force
// during step t comes from measurements up to sample t-1 (one-sample loop
// latency; the filtered chain adds its configured delay on top).
template <class A, FeedbackKernelMode FB>
void run_langevin_batch_t(const LangevinBatchParams& p,
                          const LangevinRecording& rec,
                          LangevinBatchResult& out) {
  using f = typename A::f;
  constexpr int W = A::width;
  const int lanes = std::min(p.lanes, W);

  auto rng = Xoshiro256pp<A>::seeded(p.seeds);

  const f dt = A::fset(p.dt);
  const f inv_dt = A::fset(1.0 / p.dt);
  const f w02 = A::fset(p.omega0_sq);
  const f g0 = A::fset(p.gamma0);
  const f inv_inertia = A::fset(1.0 / p.inertia);
  const f sigma_v = A::fset(p.sigma_v);
  const f sigma_m = A::fset(p.sigma_meas);
  const f fb_scale = A::fset(FB == FeedbackKernelMode::ideal_velocity
                                 ? -p.inertia * p.gain
                                 : -p.inertia * p.gain * p.omega_c);
  const f b0 = A::fset(p.bq_b0), b1 = A::fset(p.bq_b1), b2 = A::fset(p.bq_b2);
  const f a1 = A::fset(p.bq_a1), a2 = A::fset(p.bq_a2);

  // Initial state: explicit, or drawn from the equilibrium Gaussian. The
  // draw is always consumed so the force/measurement streams do not depend
  // on the initialization mode.
  const GaussPair<A> init = box_muller<A>(rng.next(), rng.next());
  f x, v;
  if (p.use_given_init) {
    x = A::fload(p.x0);
    v = A::fload(p.v0);
  } else {
    x = A::mul(A::fset(p.sigma_x_init), init.g0);
    v = A::mul(A::fset(p.sigma_v_init), init.g1);
  }

  f xm_prev = x;
  f vest = A::fset(0.0);
  f ffb = A::fset(0.0);
  f bq_z1 = A::fset(0.0), bq_z2 = A::fset(0.0);
  // Delay line for the filtered chain; minimum one sample of loop latency.
  std::vector<f> ring;
  uint32_t ring_head = 0;
  if (FB == FeedbackKernelMode::filtered) {
    ring.assign(std::max<uint32_t>(1, p.delay_samples), A::fset(0.0));
  }

  const bool record = rec.true_position || rec.measured_position ||
                      rec.feedback_force;
  double lanebuf[W];
  auto scatter = [&](double* dst, f val, uint64_t idx) {
    if (!dst) return;
    A::fstore(lanebuf, val);
    for (int l = 0; l < lanes; ++l) dst[l * rec.capacity + idx] = lanebuf[l];
  };
  if (record) {
    scatter(rec.true_position, x, 0);
    scatter(rec.measured_position, x, 0);
    scatter(rec.feedback_force, A::fset(0.0), 0);
  }

  KahanSum<A> acc_x2, acc_v2;
  constexpr uint64_t kCheckEvery = 2048;

  for (uint64_t t = 0; t < p.steps; ++t) {
    const GaussPair<A> g = box_muller<A>(rng.next(), rng.next());

    if constexpr (FB == FeedbackKernelMode::ideal_velocity) {
      ffb = A::mul(fb_scale, vest);
    } else if constexpr (FB == FeedbackKernelMode::filtered) {
      ffb = A::mul(fb_scale, ring[ring_head]);  // band-passed xm, delayed
    }

    f acc = A::fnmadd(w02, x, A::mul(ffb, inv_inertia));
    acc = A::fnmadd(g0, v, acc);
    v = A::fmadd(dt, acc, A::fmadd(sigma_v, g.g0, v));
    x = A::fmadd(dt, v, x);
    const f xm = A::fmadd(sigma_m, g.g1, x);

    if constexpr (FB == FeedbackKernelMode::ideal_velocity) {
      vest = A::mul(A::sub(xm, xm_prev), inv_dt);
      xm_prev = xm;
    } else if constexpr (FB == FeedbackKernelMode::filtered) {
      // band-pass biquad, direct form II transposed
      const f y = A::fmadd(b0, xm, bq_z1);
      bq_z1 = A::fmadd(b1, xm, A::fnmadd(a1, y, bq_z2));
      bq_z2 = A::fnmadd(a2, y, A::mul(b2, xm));
      ring[ring_head] = y;
      ring_head = (ring_head + 1 == ring.size()) ? 0 : ring_head + 1;
    }

    if (record) {
      scatter(rec.true_position, x, t + 1);
      scatter(rec.measured_position, xm, t + 1);
      scatter(rec.feedback_force, ffb, t + 1);
    }
    if (t >= p.discard_steps) {
      acc_x2.add(A::mul(x, x));
      acc_v2.add(A::mul(v, v));
    }

    if (p.diverge_threshold > 0.0 && (t % kCheckEvery) == kCheckEvery - 1) {
      A::fstore(lanebuf, x);
      for (int l = 0; l < lanes; ++l) {
        if (out.first_bad_step[l] == kStableStep &&
            (!std::isfinite(lanebuf[l]) ||
             std::abs(lanebuf[l]) > p.diverge_threshold)) {
          out.first_bad_step[l] = t;
        }
      }
    }
  }

  double buf[W];
  A::fstore(buf, acc_x2.sum);
  for (int l = 0; l < lanes; ++l) out.sum_x2[l] = buf[l];
  A::fstore(buf, acc_v2.sum);
  for (int l = 0; l < lanes; ++l) out.sum_v2[l] = buf[l];
  A::fstore(buf, x);
  for (int l = 0; l < lanes; ++l) out.final_x[l] = buf[l];
  A::fstore(buf, v);
  for (int l = 0; l < lanes; ++l) out.final_v[l] = buf[l];
  out.stat_count = p.steps > p.discard_steps ? p.steps - p.discard_steps : 0;

  // final check so divergence near the end of a run is not missed
  if (p.diverge_threshold > 0.0) {
    A::fstore(buf, x);
    for (int l = 0; l < lanes; ++l) {
      if (out.first_bad_step[l] == kStableStep &&
          (!std::isfinite(buf[l]) || std::abs(buf[l]) > p.diverge_threshold)) {
        out.first_bad_step[l] = p.steps;
      }
    }
  }
}

template <class A>
void run_langevin_batch_impl(const LangevinBatchParams& p,
                             const LangevinRecording& rec,
                             LangevinBatchResult& out) {
  switch (p.feedback) {
    case FeedbackKernelMode::off:
      run_langevin_batch_t<A, FeedbackKernelMode::off>(p, rec, out);
      break;
    case FeedbackKernelMode::ideal_velocity:
      run_langevin_batch_t<A, FeedbackKernelMode::ideal_velocity>(p, rec, out);
      break;
    case FeedbackKernelMode::filtered:
      run_langevin_batch_t<A, FeedbackKernelMode::filtered>(p, rec, out);
      break;
  }
}

template <class A>
void gaussian_fill_impl(const uint64_t* lane_seeds, int lanes, double* out,
                        size_t count) {
  auto rng = Xoshiro256pp<A>::seeded(lane_seeds);
  double buf[A::width];
  const int use_lanes = std::min(lanes, A::width);
  const size_t pairs = count / 2;
  for (size_t i = 0; i < pairs; ++i) {
    const GaussPair<A> g = box_muller<A>(rng.next(), rng.next());
    A::fstore(buf, g.g0);
    for (int l = 0; l < use_lanes; ++l) out[l * count + 2 * i] = buf[l];
    A::fstore(buf, g.g1);
    for (int l = 0; l < use_lanes; ++l) out[l * count + 2 * i + 1] = buf[l];
  }
}

template <class A>
void apply_window_impl(const double* x, const double* w, double mean,
                       double* out, size_t n) {
  const auto mu = A::fset(mean);
  size_t i = 0;
  for (; i + A::width <= n; i += A::width) {
    const auto v = A::mul(A::sub(A::fload(x + i), mu), A::fload(w + i));
    A::fstore(out + i, v);
  }
  for (; i < n; ++i) out[i] = (x[i] - mean) * w[i];
}

}  // namespace maglev::simd::impl
