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

#include "frictrl/spectral.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>
#include <unsupported/Eigen/FFT>

#include "frictrl/error.hpp"

namespace frictrl::spectral {

std::vector<Complex> rfft(std::span<const double> x) {
  if (x.empty()) return {};
  Eigen::FFT<double> fft;
  std::vector<double> in(x.begin(), x.end());
  std::vector<Complex> full;
  fft.fwd(full, in);
  full.resize(x.size() / 2 + 1);
  return full;
}

std::vector<double> irfft(std::span<const Complex> half, std::size_t n) {
  if (n == 0) return {};
  if (half.size() != n / 2 + 1) {
    throw InvalidParameter(fmt::format("irfft of length {} needs {} bins, got {}", n, n / 2 + 1, half.size()));
  }
  std::vector<Complex> full(n);
  for (std::size_t k = 0; k < half.size(); ++k) full[k] = half[k];
  for (std::size_t k = half.size(); k < n; ++k) full[k] = std::conj(half[n - k]);
  Eigen::FFT<double> fft;
  std::vector<Complex> out;
  fft.inv(out, full);
  std::vector<double> re(n);
  for (std::size_t i = 0; i < n; ++i) re[i] = out[i].real();
  return re;
}

Spectrum welch_asd(const Signal& x, double segment_s) {
  const auto seg = static_cast<std::size_t>(std::llround(segment_s * x.fs()));
  if (seg < 8 || x.size() < seg) {
    throw InsufficientData(fmt::format("Welch estimate needs at least {} samples, got {}", seg, x.size()));
  }
  const std::size_t hop = seg / 2;
  std::vector<double> window(seg);
  double wss = 0.0;
  for (std::size_t i = 0; i < seg; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(seg));
    wss += window[i] * window[i];
  }
  std::vector<double> psd(seg / 2 + 1, 0.0);
  std::size_t count = 0;
  std::vector<double> buf(seg);
  for (std::size_t start = 0; start + seg <= x.size(); start += hop) {
    double mean = 0.0;
    for (std::size_t i = 0; i < seg; ++i) mean += x[start + i];
    mean /= static_cast<double>(seg);
    for (std::size_t i = 0; i < seg; ++i) buf[i] = (x[start + i] - mean) * window[i];
    const auto bins = rfft(buf);
    for (std::size_t k = 0; k < bins.size(); ++k) psd[k] += std::norm(bins[k]);
    ++count;
  }
  Spectrum out;
  out.hz.resize(psd.size());
  out.values.resize(psd.size());
  const double scale = 1.0 / (x.fs() * wss * static_cast<double>(count));
  for (std::size_t k = 0; k < psd.size(); ++k) {
    double p = psd[k] * scale;
    const bool edge = k == 0 || (seg % 2 == 0 && k == psd.size() - 1);
    if (!edge) p *= 2.0;
    out.hz[k] = static_cast<double>(k) * x.fs() / static_cast<double>(seg);
    out.values[k] = std::sqrt(p);
  }
  return out;
}

double band_asd(const Spectrum& asd, double lo_hz, double hi_hz) {
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < asd.hz.size(); ++k) {
    if (asd.hz[k] >= lo_hz && asd.hz[k] <= hi_hz) {
      acc += asd.values[k] * asd.values[k];
      ++n;
    }
  }
  if (n == 0) throw InsufficientData(fmt::format("no spectral bins in [{}, {}] Hz", lo_hz, hi_hz));
  return std::sqrt(acc / static_cast<double>(n));
}

}  // namespace frictrl::spectral
