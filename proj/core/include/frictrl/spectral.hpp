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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "frictrl/signal.hpp"

namespace frictrl::spectral {

using Complex = std::complex<double>;

// Non-negative frequency half of the DFT (n/2 + 1 bins), unscaled.
std::vector<Complex> rfft(std::span<const double> x);

// Inverse of rfft for a real sequence of length n (scaled by 1/n).
std::vector<double> irfft(std::span<const Complex> half, std::size_t n);

struct Spectrum {
  std::vector<double> hz;
  std::vector<double> values;
};

// One-sided amplitude spectral density (units/sqrt(Hz)) by Welch's method:
// Hann windows of `segment_s`, 50% overlap, per-segment mean removed.
Spectrum welch_asd(const Signal& x, double segment_s = 1.0);

// sqrt of the mean power spectral density over bins in [lo_hz, hi_hz].
double band_asd(const Spectrum& asd, double lo_hz, double hi_hz);

}  // namespace frictrl::spectral
