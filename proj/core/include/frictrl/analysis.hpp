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
#include <vector>

#include "frictrl/signal.hpp"

namespace frictrl::analysis {

// Forward-backward Butterworth band-pass (second-order prototype), padded
// by odd reflection over three times the filter's 1% settling length.
Signal bandpass_zero_phase(const Signal& x, double lo_hz, double hi_hz);
Signal lowpass_zero_phase(const Signal& x, double fc_hz);

struct SwipeSegment {
  std::size_t start = 0;  // first sample after the opening zero crossing
  std::size_t end = 0;    // one past the last sample before the closing crossing
  Direction direction = Direction::Right;
  std::size_t mid_start = 0;  // retained middle half, [mid_start, mid_end)
  std::size_t mid_end = 0;

  std::size_t length() const noexcept { return end - start; }
};

struct SegmentOptions {
  double debounce_s = 0.05;
};

// Complete segments between consecutive zero crossings of a low-passed
// friction force. Crossings closer than the debounce are merged; a merged
// cluster that does not change the sign is ignored.
std::vector<SwipeSegment> segment_swipes(const Signal& f, const SegmentOptions& options = {});

struct Alignment {
  Signal shifted;
  double lag_s = 0.0;  // positive when meas lags ref
  long lag_samples = 0;
  double correlation = 0.0;
};

// Lag in [-max_lag_s, max_lag_s] maximizing the Pearson correlation of the
// overlapping parts; meas is shifted back by that lag (edges held).
Alignment align_by_xcorr(const Signal& ref, const Signal& meas, double max_lag_s);

// Coefficient of determination of the best affine fit meas ~ a ref + b.
double r_squared(const Signal& ref, const Signal& meas);
double r_squared(std::span<const double> ref, std::span<const double> meas);

struct TrackingOptions {
  double band_lo_hz = 10.0;
  double band_hi_hz = 1000.0;
  double max_lag_s = 0.002;
  double segmentation_lowpass_hz = 10.0;
  SegmentOptions segments;
};

struct TrackingReport {
  double r2 = 0.0;
  double lag_s = 0.0;
  std::vector<double> per_swipe_r2;
  std::size_t swipes = 0;
};

// Band-pass both signals, segment swipes on the measured force, correct the
// measured sign by swipe direction, align over the retained middle halves
// and score R^2 there.
TrackingReport tracking_report(const Signal& f_r, const Signal& f_m, const TrackingOptions& options = {});

struct SensitivityRun {
  double f_ref_hz = 0.0;
  double amplitude_n = 0.0;
  Signal f_r;
  Signal f_m;
};

struct SensitivityCell {
  double f_ref_hz = 0.0;
  double amplitude_n = 0.0;
  double magnitude_ratio = 0.0;
  double phase_deg = 0.0;
  double delay_ms = 0.0;
  std::size_t swipes = 0;
  std::string warning;
};

struct SensitivityOptions {
  double band_lo_hz = 10.0;
  double band_hi_hz = 2000.0;
  double segmentation_lowpass_hz = 10.0;
  std::size_t min_swipes = 3;
  SegmentOptions segments;
};

// Per swipe, lock-in of reference and measured force over the retained
// middle half; cells aggregate runs sharing (frequency, amplitude).
std::vector<SensitivityCell> empirical_sensitivity(std::span<const SensitivityRun> runs,
                                                   const SensitivityOptions& options = {});

}  // namespace frictrl::analysis
