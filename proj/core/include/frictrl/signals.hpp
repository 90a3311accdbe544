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
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "frictrl/signal.hpp"

namespace frictrl::signals {

// +/-amp square wave with 50% duty, starting high.
Signal gen_square(double f_hz, double amp, double duration_s, double fs);
Signal gen_sine(double f_hz, double amp, double duration_s, double fs);

struct TextureSpec {
  std::vector<Signal> segments;  // used in order
  double overlap_s = 0.1;
  double total_s = 20.0;
};

// Concatenates segments with linear cross-fades of `overlap_s`; the
// incoming weight over an overlap of n samples is (k + 1) / (n + 1).
Signal stitch_feather(const TextureSpec& spec);

// Synthetic stand-in for a recorded texture: band-limited noise whose
// amplitude spectrum is (f / 100 Hz)^-slope with a log-normal bump.
struct TextureProfile {
  std::string label;
  double rms_n = 0.01;
  double slope = 0.5;
  double peak_hz = 100.0;
  double peak_gain = 1.0;
  double peak_width_dec = 0.3;
};

const std::vector<TextureProfile>& texture_profiles();
const TextureProfile& texture_profile(std::string_view label);

double texture_envelope(const TextureProfile& profile, double hz);

// One segment of noise shaped by the profile over [lo, hi], normalized to
// the profile RMS.
Signal synth_segment(const TextureProfile& profile, double duration_s, double fs, std::uint64_t seed,
                     double lo_hz = 10.0, double hi_hz = 1000.0);

// Independent 1 s segments, enough to stitch `total_s` seconds.
TextureSpec synthetic_texture_spec(const TextureProfile& profile, double total_s, double fs,
                                   std::uint64_t seed, double segment_s = 1.0, double overlap_s = 0.1);

Signal make_texture(std::string_view label, double total_s, double fs, std::uint64_t seed);

std::vector<double> sweep_frequencies(std::size_t n = 20, double lo_hz = 20.0, double hi_hz = 1000.0);
std::vector<double> sweep_amplitudes();

}  // namespace frictrl::signals
