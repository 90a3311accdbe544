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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "frictrl/lti.hpp"
#include "frictrl/signal.hpp"

namespace frictrl::sysid {

struct LockInResult {
  double frequency = 0.0;
  double amplitude = 0.0;
  double phase_deg = 0.0;  // sine-referenced, in (-180, 180]
};

// Amplitude and phase of the f_ref component. The record is truncated to
// an integer number of reference periods and fitted with sin, cos and an
// offset, so a pure tone is recovered exactly.
LockInResult lock_in(const Signal& signal, double f_ref);

struct ImpulseOptions {
  double window_s = 0.5;
  double band_lo_hz = 10.0;
  double band_hi_hz = 1000.0;
  double max_shift_db = 3.0;
  double onset_factor = 10.0;       // onset = first |x| > factor * pre-trigger RMS
  double pretrigger_fraction = 0.05;
};

struct ImpulseAverage {
  lti::FrequencyResponse response;
  std::vector<double> shifts_db;   // per-record band power relative to record 0
  std::vector<std::size_t> onsets;
  std::vector<std::string> warnings;
};

// Mean spectrum of impulse records, each power-normalized over the band to
// the first record. Spectra are scaled by 1/fs so they approximate the
// continuous Fourier transform.
ImpulseAverage average_impulse_spectra(std::span<const Signal> impulses,
                                       const ImpulseOptions& options = {});

struct SecondOrderFit {
  lti::RationalTF model;
  double gain = 0.0;
  double fn_hz = 0.0;
  double zeta = 0.0;
  double residual = 0.0;  // mean |log(model / data)|^2 over in-band points
  bool low_confidence = false;
  std::size_t points = 0;
};

SecondOrderFit fit_second_order(const lti::FrequencyResponse& response,
                                std::pair<double, double> band_hz);

struct GainTrial {
  Signal drive;  // mA
  Signal force;  // N
  double frequency = 0.0;
  Direction direction = Direction::Right;
};

struct TrialGain {
  double frequency = 0.0;
  double gain = 0.0;
  Direction direction = Direction::Right;
};

struct GainEstimate {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<TrialGain> per_trial;
};

// Per-trial gain is the force lock-in amplitude over the drive lock-in
// amplitude at the trial frequency; aggregates are arithmetic.
GainEstimate estimate_gain(std::span<const GainTrial> trials);

}  // namespace frictrl::sysid
