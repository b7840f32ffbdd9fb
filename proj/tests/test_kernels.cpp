#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "maglev/simd/arch_scalar.hpp"
#include "maglev/simd/kernels.hpp"
#include "maglev/simd/math.hpp"
#include "maglev/simd/rng.hpp"

using namespace maglev::simd;

namespace {

// straight-line xoshiro256++ reference, written independently of the packed
// template
struct RefXoshiro {
  uint64_t s[4];
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t next() {
    const uint64_t result = rotl(s[0] + s[3], 23) + s[0];
    const uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
  }
};

RefXoshiro ref_seeded(uint64_t seed) {
  RefXoshiro g;
  uint64_t st = seed;
  for (auto& w : g.s) w = splitmix64(st);
  return g;
}

}  // namespace

TEST_CASE("xoshiro template matches the reference stream") {
  const uint64_t seed = 0xDEADBEEFCAFEF00DULL;
  auto ref = ref_seeded(seed);
  uint64_t lane_seeds[1] = {seed};
  auto gen = Xoshiro256pp<ScalarArch>::seeded(lane_seeds);
  for (int i = 0; i < 10000; ++i) {
    CHECK(gen.next().v == ref.next());
  }
}

TEST_CASE("uniform01 stays in (0, 1]") {
  uint64_t lane_seeds[1] = {42};
  auto gen = Xoshiro256pp<ScalarArch>::seeded(lane_seeds);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const double u = uniform01<ScalarArch>(gen.next()).v;
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 1e-4);
  CHECK(hi > 0.9999);
}

TEST_CASE("portable log matches libm") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> expo(-300.0, 300.0);
  double worst = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const double x = std::pow(10.0, expo(rng));
    const double mine = fast_log<ScalarArch>({x}).v;
    const double ref = std::log(x);
    const double err = std::abs(mine - ref) /
                       std::max(std::abs(ref), 1e-300);
    worst = std::max(worst, err);
  }
  CHECK(worst < 1e-14);
  // the Box-Muller range specifically
  for (int i = 0; i < 200000; ++i) {
    const double u = (i + 1.0) / 200001.0;
    const double err = std::abs(fast_log<ScalarArch>({u}).v - std::log(u));
    CHECK(err <= 1e-14 * std::max(1.0, std::abs(std::log(u))));
  }
  CHECK(fast_log<ScalarArch>({1.0}).v == 0.0);
}

TEST_CASE("portable sincos matches libm on [0, 2 pi]") {
  double worst_s = 0.0, worst_c = 0.0;
  for (int i = 0; i <= 1000000; ++i) {
    const double theta = 6.283185307179586 * i / 1000000.0;
    const auto sc = fast_sincos<ScalarArch>({theta});
    worst_s = std::max(worst_s, std::abs(sc.sin.v - std::sin(theta)));
    worst_c = std::max(worst_c, std::abs(sc.cos.v - std::cos(theta)));
  }
  CHECK(worst_s < 5e-16);
  CHECK(worst_c < 5e-16);
}

TEST_CASE("gaussian sampler moments") {
  const size_t n = 4'000'000;
  std::vector<double> g(n);
  uint64_t seeds[1] = {123};
  gaussian_fill(Level::scalar, seeds, 1, g.data(), n);
  double mean = 0.0;
  for (double v : g) mean += v;
  mean /= static_cast<double>(n);
  double m2 = 0.0, m4 = 0.0;
  for (double v : g) {
    const double d = v - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(m2 == doctest::Approx(1.0).epsilon(0.005));
  CHECK(m4 / (m2 * m2) == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("packed kernels reproduce the scalar reference bit for bit") {
  if (!cpu_supports_avx2()) {
    MESSAGE("AVX2 unavailable; skipping equivalence checks");
    return;
  }

  SUBCASE("gaussian_fill") {
    const size_t n = 4096;
    uint64_t seeds[4] = {1, 2, 3, 0xFFFFFFFFFFFFFFFFULL};
    std::vector<double> packed(4 * n);
    gaussian_fill(Level::avx2, seeds, 4, packed.data(), n);
    for (int lane = 0; lane < 4; ++lane) {
      std::vector<double> ref(n);
      uint64_t s1[1] = {seeds[lane]};
      gaussian_fill(Level::scalar, s1, 1, ref.data(), n);
      for (size_t i = 0; i < n; ++i) {
        REQUIRE(packed[lane * n + i] == ref[i]);
      }
    }
  }

  SUBCASE("langevin batch, all feedback modes") {
    for (int fb = 0; fb < 3; ++fb) {
      LangevinBatchParams p;
      p.dt = 1e-4;
      p.steps = 50000;
      p.discard_steps = 1000;
      p.omega0_sq = 266.4 * 266.4;
      p.gamma0 = 0.1;
      p.inertia = 2.3e-8;
      p.sigma_v = 3e-9;
      p.sigma_meas = 2e-11;
      p.feedback = static_cast<FeedbackKernelMode>(fb);
      p.gain = 5.0;
      p.omega_c = 266.4;
      p.bq_b0 = 0.01;
      p.bq_b1 = 0.0;
      p.bq_b2 = -0.01;
      p.bq_a1 = -1.97;
      p.bq_a2 = 0.98;
      p.delay_samples = 113;
      p.lanes = 4;
      for (int l = 0; l < 4; ++l) p.seeds[l] = 1000 + 17 * l;
      p.sigma_x_init = 1e-9;
      p.sigma_v_init = 2.66e-7;
      p.diverge_threshold = 1.0;

      const uint64_t cap = p.steps + 1;
      std::vector<double> xs_p(4 * cap), xm_p(4 * cap), ff_p(4 * cap);
      LangevinRecording rec_p{xs_p.data(), xm_p.data(), ff_p.data(), cap};
      LangevinBatchResult out_p;
      run_langevin_batch(Level::avx2, p, rec_p, out_p);

      for (int lane = 0; lane < 4; ++lane) {
        LangevinBatchParams q = p;
        q.lanes = 1;
        q.seeds[0] = p.seeds[lane];
        std::vector<double> xs(cap), xm(cap), ff(cap);
        LangevinRecording rec{xs.data(), xm.data(), ff.data(), cap};
        LangevinBatchResult out;
        run_langevin_batch(Level::scalar, q, rec, out);

        size_t mismatch = 0;
        for (uint64_t i = 0; i < cap; ++i) {
          if (xs[i] != xs_p[lane * cap + i]) ++mismatch;
          if (xm[i] != xm_p[lane * cap + i]) ++mismatch;
          if (ff[i] != ff_p[lane * cap + i]) ++mismatch;
        }
        REQUIRE(mismatch == 0);
        REQUIRE(out.sum_x2[0] == out_p.sum_x2[lane]);
        REQUIRE(out.sum_v2[0] == out_p.sum_v2[lane]);
        REQUIRE(out.final_x[0] == out_p.final_x[lane]);
        REQUIRE(out.final_v[0] == out_p.final_v[lane]);
      }
    }
  }

  SUBCASE("window and power kernels") {
    const size_t n = 1537;  // deliberately not a multiple of the lane width
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> x(n), w(n), a(n), b(n);
    for (size_t i = 0; i < n; ++i) {
      x[i] = u(rng);
      w[i] = u(rng) + 2.0;
    }
    apply_window(Level::scalar, x.data(), w.data(), 0.125, a.data(), n);
    apply_window(Level::avx2, x.data(), w.data(), 0.125, b.data(), n);
    for (size_t i = 0; i < n; ++i) REQUIRE(a[i] == b[i]);

    const size_t bins = 777;
    std::vector<double> inter(2 * bins);
    for (auto& v : inter) v = u(rng);
    std::vector<double> acc_s(bins, 0.5), acc_v(bins, 0.5);
    accumulate_power(Level::scalar, inter.data(), bins, acc_s.data());
    accumulate_power(Level::avx2, inter.data(), bins, acc_v.data());
    for (size_t i = 0; i < bins; ++i) REQUIRE(acc_s[i] == acc_v[i]);
  }
}

TEST_CASE("derive_stream_seed decorrelates run indices") {
  // same master, adjacent indices: streams must differ immediately
  uint64_t a[1] = {derive_stream_seed(1, 0)};
  uint64_t b[1] = {derive_stream_seed(1, 1)};
  CHECK(a[0] != b[0]);
  auto ga = Xoshiro256pp<ScalarArch>::seeded(a);
  auto gb = Xoshiro256pp<ScalarArch>::seeded(b);
  int same = 0;
  for (int i = 0; i < 1000; ++i) {
    if (ga.next().v == gb.next().v) ++same;
  }
  CHECK(same == 0);
}
