#include "maglev/simd/kernels.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

namespace maglev::simd {

void run_langevin_batch_scalar(const LangevinBatchParams&,
                               const LangevinRecording&, LangevinBatchResult&);
void gaussian_fill_scalar(const uint64_t*, int, double*, size_t);
void apply_window_scalar(const double*, const double*, double, double*, size_t);
void accumulate_power_scalar(const double*, size_t, double*);

#ifdef MAGLEV_HAVE_AVX2_TU
void run_langevin_batch_avx2(const LangevinBatchParams&,
                             const LangevinRecording&, LangevinBatchResult&);
void gaussian_fill_avx2(const uint64_t*, int, double*, size_t);
void apply_window_avx2(const double*, const double*, double, double*, size_t);
void accumulate_power_avx2(const double*, size_t, double*);
#endif

bool cpu_supports_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

Level resolve_level() {
  const bool have_avx2 =
#ifdef MAGLEV_HAVE_AVX2_TU
      cpu_supports_avx2();
#else
      false;
#endif
  const char* env = std::getenv("MAGLEV_SIMD");
  if (env != nullptr) {
    const std::string request(env);
    if (request == "scalar") return Level::scalar;
    if (request == "avx2") {
      if (have_avx2) return Level::avx2;
      std::cerr << "maglev: MAGLEV_SIMD=avx2 requested but unavailable; "
                   "using scalar kernels\n";
      return Level::scalar;
    }
    if (request != "auto" && !request.empty()) {
      std::cerr << "maglev: unknown MAGLEV_SIMD value '" << request
                << "'; using auto\n";
    }
  }
  return have_avx2 ? Level::avx2 : Level::scalar;
}

}  // namespace

Level active_level() {
  static const Level level = resolve_level();
  return level;
}

const char* level_name(Level level) {
  return level == Level::avx2 ? "avx2" : "scalar";
}

int lane_width(Level level) { return level == Level::avx2 ? 4 : 1; }

void run_langevin_batch(Level level, const LangevinBatchParams& params,
                        const LangevinRecording& rec, LangevinBatchResult& out) {
#ifdef MAGLEV_HAVE_AVX2_TU
  if (level == Level::avx2) {
    run_langevin_batch_avx2(params, rec, out);
    return;
  }
#endif
  run_langevin_batch_scalar(params, rec, out);
}

void gaussian_fill(Level level, const uint64_t* lane_seeds, int lanes,
                   double* out, size_t count) {
#ifdef MAGLEV_HAVE_AVX2_TU
  if (level == Level::avx2) {
    gaussian_fill_avx2(lane_seeds, lanes, out, count);
    return;
  }
#endif
  gaussian_fill_scalar(lane_seeds, lanes, out, count);
}

void apply_window(Level level, const double* x, const double* w, double mean,
                  double* out, size_t n) {
#ifdef MAGLEV_HAVE_AVX2_TU
  if (level == Level::avx2) {
    apply_window_avx2(x, w, mean, out, n);
    return;
  }
#endif
  apply_window_scalar(x, w, mean, out, n);
}

void accumulate_power(Level level, const double* interleaved, size_t bins,
                      double* accum) {
#ifdef MAGLEV_HAVE_AVX2_TU
  if (level == Level::avx2) {
    accumulate_power_avx2(interleaved, bins, accum);
    return;
  }
#endif
  accumulate_power_scalar(interleaved, bins, accum);
}

}  // namespace maglev::simd
