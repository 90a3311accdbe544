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
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "frictrl/error.hpp"
#include "frictrl/lti.hpp"
#include "frictrl/signals.hpp"
#include "frictrl/sysid.hpp"

namespace frictrl::sysid {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(LockIn, RecoversSineAmplitudeAndPhase) {
  const auto r = lock_in(signals::gen_sine(100.0, 0.02, 10.0, 10000.0), 100.0);
  EXPECT_NEAR(r.amplitude, 0.02, 1e-12);
  EXPECT_NEAR(r.phase_deg, 0.0, 1e-8);
}

TEST(LockIn, CosineLeadsByNinetyDegreesAndOffsetIsIgnored) {
  std::vector<double> x(20000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.3 + 0.5 * std::cos(2.0 * kPi * 37.0 * i / 10000.0);
  const auto r = lock_in(Signal(x, 10000.0), 37.0);
  EXPECT_NEAR(r.amplitude, 0.5, 1e-10);
  EXPECT_NEAR(r.phase_deg, 90.0, 1e-8);
}

TEST(LockIn, RejectsShortRecordsAndBadFrequency) {
  EXPECT_THROW(lock_in(signals::gen_sine(10.0, 1.0, 0.5, 1000.0), 10.0), InsufficientData);
  EXPECT_THROW(lock_in(signals::gen_sine(10.0, 1.0, 5.0, 1000.0), 600.0), InvalidParameter);
}

TEST(LockIn, RejectsOtherFrequencies) {
  std::vector<double> x(10000);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::sin(2.0 * kPi * 50.0 * i / 10000.0) + std::sin(2.0 * kPi * 120.0 * i / 10000.0);
  }
  EXPECT_NEAR(lock_in(Signal(x, 10000.0), 50.0).amplitude, 1.0, 1e-10);
}

TEST(SecondOrderFit, RecoversKnownParameters) {
  const auto hz = lti::logspace_hz(10.0, 1000.0, 100);
  const auto resp = lti::freq_response(lti::make_second_order(0.7, 420.0, 0.08), hz);
  const auto fit = fit_second_order(resp, {10.0, 1000.0});
  EXPECT_NEAR(fit.gain, 0.7, 1e-8);
  EXPECT_NEAR(fit.fn_hz, 420.0, 1e-6);
  EXPECT_NEAR(fit.zeta, 0.08, 1e-9);
  EXPECT_FALSE(fit.low_confidence);
  EXPECT_EQ(fit.points, 100u);
}

TEST(SecondOrderFit, FlagsResonanceFarAboveBand) {
  const auto hz = lti::logspace_hz(10.0, 100.0, 50);
  const auto resp = lti::freq_response(lti::make_second_order(1.0, 4400.0, 0.6), hz);
  EXPECT_TRUE(fit_second_order(resp, {10.0, 100.0}).low_confidence);
}

TEST(SecondOrderFit, NegativeGainIsRecovered) {
  const auto hz = lti::logspace_hz(10.0, 1000.0, 100);
  const auto resp = lti::freq_response(lti::make_second_order(-2.0, 300.0, 0.3), hz);
  const auto fit = fit_second_order(resp, {10.0, 1000.0});
  EXPECT_NEAR(fit.gain, -2.0, 1e-8);
}

TEST(EstimateGain, ForceOverDriveAtTrialFrequency) {
  std::vector<GainTrial> trials;
  for (double g : {0.05, 0.07}) {
    const Signal drive = signals::gen_sine(40.0, 1.0, 1.0, 10000.0);
    std::vector<double> f(drive.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = 0.25 + g * drive[i];
    trials.push_back({drive, Signal(f, 10000.0), 40.0, Direction::Right});
  }
  const auto est = estimate_gain(trials);
  EXPECT_NEAR(est.mean, 0.06, 1e-12);
  EXPECT_NEAR(est.min, 0.05, 1e-12);
  EXPECT_NEAR(est.max, 0.07, 1e-12);
}

TEST(EstimateGain, ZeroDriveIsInvalid) {
  const Signal zero(std::vector<double>(10000, 0.0), 10000.0);
  const std::vector<GainTrial> trials = {{zero, zero, 40.0, Direction::Left}};
  EXPECT_THROW(estimate_gain(trials), InvalidTrial);
}

std::vector<Signal> impulse_records(const std::vector<double>& amps) {
  std::vector<Signal> out;
  const double fs = 20000.0;
  const double wn = 2.0 * kPi * 250.0;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 1e-5);
  for (std::size_t r = 0; r < amps.size(); ++r) {
    std::vector<double> x(15000);
    const std::size_t delay = 1000 + 97 * r;
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = noise(rng);
      if (i >= delay) {
        const double t = static_cast<double>(i - delay) / fs;
        x[i] += amps[r] * std::exp(-0.2 * wn * t) * std::sin(wn * t);
      }
    }
    out.emplace_back(std::move(x), fs);
  }
  return out;
}

TEST(ImpulseAverage, ShiftsTrackAmplitudeSpread) {
  const auto avg = average_impulse_spectra(impulse_records({1.0, 1.2, 0.85}));
  ASSERT_EQ(avg.shifts_db.size(), 3u);
  EXPECT_NEAR(avg.shifts_db[0], 0.0, 1e-12);
  EXPECT_NEAR(avg.shifts_db[1], 20.0 * std::log10(1.2), 0.02);
  EXPECT_NEAR(avg.shifts_db[2], 20.0 * std::log10(0.85), 0.02);
  EXPECT_TRUE(avg.warnings.empty());
}

TEST(ImpulseAverage, WarnsOnLargeShift) {
  const auto avg = average_impulse_spectra(impulse_records({1.0, 2.0}));
  EXPECT_EQ(avg.warnings.size(), 1u);
}

TEST(ImpulseAverage, ScalingAllRecordsScalesResponseOnly) {
  const std::vector<double> amps = {1.0, 1.1, 0.9};
  std::vector<double> scaled_amps;
  for (double a : amps) scaled_amps.push_back(3.0 * a);
  const auto a = average_impulse_spectra(impulse_records(amps));
  const auto b = average_impulse_spectra(impulse_records(scaled_amps));
  for (std::size_t i = 0; i < a.shifts_db.size(); ++i) EXPECT_NEAR(a.shifts_db[i], b.shifts_db[i], 1e-3);
  const auto& ha = a.response.values();
  const auto& hb = b.response.values();
  for (std::size_t k = 10; k < 500; k += 37) EXPECT_NEAR(std::abs(hb[k] / ha[k]), 3.0, 0.01);
}

TEST(ImpulseAverage, NeedsTwoRecords) {
  EXPECT_THROW(average_impulse_spectra(impulse_records({1.0})), InsufficientData);
}

}  // namespace
}  // namespace frictrl::sysid
