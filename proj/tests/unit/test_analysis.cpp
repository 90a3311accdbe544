/*
 * Copyright 2026 The frictrl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "frictrl/analysis.hpp"
#include "frictrl/butterworth.hpp"
#include "frictrl/error.hpp"
#include "frictrl/plant.hpp"

namespace frictrl::analysis {
namespace {

using Complex = std::complex<double>;
constexpr double kPi = std::numbers::pi;

Signal sine(double hz, double amp, double fs, std::size_t n, double delay_s = 0.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2.0 * kPi * hz * (i / fs - delay_s));
  return Signal(std::move(x), fs, Unit::Newton);
}

// Swiping force: Coulomb level flipping sign at 0.4 Hz plus a scaled,
// delayed copy of the reference, also flipped with the direction.
Signal swiping(const Signal& ref, double gain, double delay_s, double coulomb = 0.3) {
  const double fs = ref.fs();
  const auto d = static_cast<std::size_t>(std::llround(delay_s * fs));
  std::vector<double> x(ref.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double s = std::sin(2.0 * kPi * 0.4 * i / fs) >= 0.0 ? 1.0 : -1.0;
    const double r = i >= d ? ref[i - d] : 0.0;
    x[i] = s * (coulomb + gain * r);
  }
  return Signal(std::move(x), fs, Unit::Newton);
}

TEST(Butterworth, BandpassMatchesReference) {
  const dsp::Sos bp = dsp::butter_bandpass(2, 10.0, 1000.0, 10000.0);
  const std::vector<std::pair<double, Complex>> ref = {
      {5.0, {-0.17504973078699151, 0.16305080107246994}},
      {10.0, {0.0, 0.7071067811881794}},
      {50.0, {0.9760188491222842, 0.21642055153665624}},
      {100.0, {0.9999892478408743, 0.004637249951443673}},
      {300.0, {0.9280373157149919, -0.36631033610735236}},
      {1000.0, {0.0, -0.7071067811865472}},
      {2000.0, {-0.15223484971083887, -0.11896028815464982}},
      {4000.0, {-0.010812651847786433, -0.0016165942712317348}},
  };
  for (const auto& [f, h] : ref) EXPECT_LT(std::abs(bp.eval_hz(f) - h), 1e-9) << f;
}

TEST(Butterworth, LowpassMatchesReference) {
  const dsp::Sos lp = dsp::butter_lowpass(2, 10.0, 60000.0);
  const std::vector<std::pair<double, Complex>> ref = {
      {1.0, {0.9899010117864347, -0.1414072027398755}},
      {5.0, {0.7058823965744897, -0.66551222969517}},
      {10.0, {0.0, -0.7071067811867564}},
      {20.0, {-0.17647053511173938, -0.16637794005387171}},
      {100.0, {-0.009898832829065448, -0.0014140337806295312}},
  };
  for (const auto& [f, h] : ref) EXPECT_LT(std::abs(lp.eval_hz(f) - h), 1e-9) << f;
}

TEST(Butterworth, ImpulseResponse) {
  const dsp::Sos bp = dsp::butter_bandpass(2, 10.0, 1000.0, 10000.0);
  std::vector<double> x(6, 0.0);
  x[0] = 1.0;
  const auto y = dsp::sosfilt(bp, x);
  const std::vector<double> want = {0.06632528338705611, 0.20857168982953947, 0.27729595813534846,
                                    0.22990616315991247, 0.1463768992694517,  0.06994052425403921};
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(y[i], want[i], 1e-12) << i;
}

TEST(ZeroPhase, SineKeepsPhaseAndSquaredGain) {
  const double fs = 10000.0;
  for (double f : {50.0, 300.0, 1500.0}) {
    const Signal x = sine(f, 1.0, fs, 20000);
    const Signal y = bandpass_zero_phase(x, 10.0, 1000.0);
    const double g = std::norm(dsp::butter_bandpass(2, 10.0, 1000.0, fs).eval_hz(f));
    double worst = 0.0;
    for (std::size_t i = 5000; i < 15000; ++i) worst = std::max(worst, std::abs(y[i] - g * x[i]));
    EXPECT_LT(worst, 1e-3) << f;
  }
}

TEST(ZeroPhase, LowpassPassesConstant) {
  const Signal x(std::vector<double>(5000, 0.7), 10000.0);
  const Signal y = lowpass_zero_phase(x, 10.0);
  for (std::size_t i = 0; i < y.size(); ++i) ASSERT_NEAR(y[i], 0.7, 1e-9);
  const Signal z = bandpass_zero_phase(x, 10.0, 1000.0);
  for (std::size_t i = 0; i < z.size(); ++i) ASSERT_NEAR(z[i], 0.0, 1e-9);
}

TEST(ZeroPhase, RejectsBadBand) {
  const Signal x(std::vector<double>(100, 0.0), 1000.0);
  EXPECT_THROW(bandpass_zero_phase(x, 100.0, 50.0), InvalidParameter);
  EXPECT_THROW(bandpass_zero_phase(x, 10.0, 600.0), InvalidParameter);
  EXPECT_THROW(lowpass_zero_phase(x, 0.0), InvalidParameter);
}

TEST(Segmentation, SquareWaveSwipes) {
  const double fs = 1000.0;
  std::vector<double> x(5000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = (i / 1250) % 2 == 0 ? 1.0 : -1.0;
  const auto segs = segment_swipes(Signal(x, fs));
  ASSERT_EQ(segs.size(), 2u);
  EXPECT_EQ(segs[0].start, 1250u);
  EXPECT_EQ(segs[0].end, 2500u);
  EXPECT_EQ(segs[0].direction, Direction::Left);
  EXPECT_EQ(segs[1].direction, Direction::Right);
  EXPECT_EQ(segs[0].mid_start, 1250u + 312u);
  EXPECT_EQ(segs[0].mid_end, 1250u + 312u + 625u);
}

TEST(Segmentation, DebounceMergesChatter) {
  const double fs = 1000.0;
  std::vector<double> x(6000, 1.0);
  for (std::size_t i = 2000; i < 4000; ++i) x[i] = -1.0;
  for (std::size_t i = 2010; i < 2020; ++i) x[i] = 1.0;  // chatter at the crossing
  x[3000] = 1.0;                                           // isolated blip, no net sign change
  const auto segs = segment_swipes(Signal(x, fs));
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_NEAR(static_cast<double>(segs[0].start), 2010.0, 15.0);
  EXPECT_EQ(segs[0].end, 4000u);
}

TEST(Segmentation, FollowsPlantDirection) {
  plant::PlantConfig cfg;
  plant::Plant p(cfg, 3);
  std::vector<double> f;
  std::vector<int> dir;
  for (int k = 0; k < 60000; ++k) {
    const auto r = p.step(2.5);
    f.push_back(r.f_m);
    dir.push_back(r.direction);
  }
  const Signal fm(f, cfg.control_fs, Unit::Newton);
  const auto segs = segment_swipes(lowpass_zero_phase(fm, 10.0));
  ASSERT_GE(segs.size(), 3u);
  std::size_t agree = 0;
  std::size_t total = 0;
  for (const auto& s : segs) {
    for (std::size_t i = s.start; i < s.end; ++i) {
      agree += dir[i] == sign_of(s.direction);
      ++total;
    }
  }
  EXPECT_GE(static_cast<double>(agree) / static_cast<double>(total), 0.99);
}

TEST(Alignment, RecoversKnownLag) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  std::vector<double> a(4000);
  for (double& v : a) v = n(rng);
  std::vector<double> b(a.size(), 0.0);
  for (std::size_t i = 7; i < b.size(); ++i) b[i] = 2.0 * a[i - 7];
  const auto al = align_by_xcorr(Signal(a, 10000.0), Signal(b, 10000.0), 0.002);
  EXPECT_EQ(al.lag_samples, 7);
  EXPECT_NEAR(al.lag_s, 7e-4, 1e-15);
  EXPECT_GT(al.correlation, 0.999);
  EXPECT_EQ(al.shifted[100], b[107]);
  EXPECT_THROW(align_by_xcorr(Signal(a, 10000.0), Signal(b, 5000.0), 0.002), RateMismatch);
}

TEST(RSquared, AffineInvariantAndBounded) {
  std::vector<double> x = {1.0, 2.0, 4.0, 3.0, 7.0};
  std::vector<double> y;
  for (double v : x) y.push_back(-3.0 * v + 5.0);
  EXPECT_NEAR(r_squared(x, y), 1.0, 1e-12);
  std::vector<double> z = {0.3, -1.0, 2.0, 0.1, 0.5};
  const double r = r_squared(x, z);
  std::vector<double> z2;
  for (double v : z) z2.push_back(4.0 * v - 1.0);
  EXPECT_NEAR(r_squared(x, z2), r, 1e-12);
  EXPECT_GE(r, 0.0);
  EXPECT_LE(r, 1.0);
  EXPECT_THROW(r_squared(std::vector<double>(5, 1.0), z), UndefinedMetric);
  EXPECT_THROW(r_squared(std::vector<double>{1.0}, std::vector<double>{1.0}), UndefinedMetric);
}

TEST(Tracking, PerfectTrackingScoresOne) {
  const double fs = 10000.0;
  const Signal ref = sine(120.0, 0.02, fs, 100000);
  const Signal meas = swiping(ref, 1.0, 0.0);
  const TrackingReport rep = tracking_report(ref, meas);
  EXPECT_GT(rep.r2, 0.999);
  EXPECT_EQ(rep.lag_s, 0.0);
  EXPECT_GE(rep.swipes, 6u);
  EXPECT_EQ(rep.per_swipe_r2.size(), rep.swipes);
}

TEST(Tracking, ReportsDelay) {
  const double fs = 10000.0;
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 0.01);
  std::vector<double> r(100000);
  for (double& v : r) v = n(rng);
  const Signal ref(r, fs, Unit::Newton);
  const TrackingReport rep = tracking_report(ref, swiping(ref, 0.8, 3e-4));
  EXPECT_NEAR(rep.lag_s, 3e-4, 1e-12);
  EXPECT_GT(rep.r2, 0.99);
}

TEST(Tracking, NoSwipesIsInsufficient) {
  const Signal ref = sine(120.0, 0.02, 10000.0, 10000);
  std::vector<double> m(ref.samples());
  for (double& v : m) v += 0.3;
  EXPECT_THROW(tracking_report(ref, Signal(m, ref.fs())), InsufficientData);
}

TEST(Sensitivity, RecoversRatioAndDelay) {
  const double fs = 10000.0;
  std::vector<SensitivityRun> runs;
  for (double f : {20.0, 100.0}) {
    const Signal ref = sine(f, 0.025, fs, 100000);
    runs.push_back({f, 0.025, ref, swiping(ref, 0.9, 5e-4)});
  }
  const auto cells = empirical_sensitivity(runs);
  ASSERT_EQ(cells.size(), 2u);
  for (const auto& c : cells) {
    EXPECT_NEAR(c.magnitude_ratio, 0.9, 0.01) << c.f_ref_hz;
    EXPECT_NEAR(c.delay_ms, 0.5, 0.02) << c.f_ref_hz;
    EXPECT_GE(c.swipes, 6u);
    EXPECT_TRUE(c.warning.empty());
  }
}

TEST(Sensitivity, WarnsOnTooFewSwipes) {
  const Signal ref = sine(50.0, 0.025, 10000.0, 30000);
  const std::vector<SensitivityRun> runs = {{50.0, 0.025, ref, swiping(ref, 1.0, 0.0)}};
  const auto cells = empirical_sensitivity(runs);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_FALSE(cells[0].warning.empty());
}

}  // namespace
}  // namespace frictrl::analysis
