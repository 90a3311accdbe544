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

// Digital Butterworth design (bilinear transform with prewarping) in
// second-order sections, plus forward-backward zero-phase filtering.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace frictrl::dsp {

struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

struct Sos {
  std::vector<Biquad> sections;
  double fs = 1.0;

  std::complex<double> eval_hz(double hz) const;
};

// `order` is the analog prototype order; a band-pass has 2 * order poles.
Sos butter_lowpass(int order, double fc_hz, double fs);
Sos butter_bandpass(int order, double lo_hz, double hi_hz, double fs);

std::vector<double> sosfilt(const Sos& sos, std::span<const double> x);

// Last impulse-response index whose magnitude exceeds `fraction` of the peak.
std::size_t settling_samples(const Sos& sos, double fraction = 0.01);

// Zero-phase filtering with odd reflection padding of `padlen` samples at
// each end (capped at x.size() - 1) and step-steady-state initial
// conditions.
std::vector<double> filtfilt(const Sos& sos, std::span<const double> x, std::size_t padlen);

}  // namespace frictrl::dsp
