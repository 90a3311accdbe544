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

#include "frictrl/butterworth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "frictrl/error.hpp"

namespace frictrl::dsp {

namespace {

using Complex = std::complex<double>;
constexpr double kPi = std::numbers::pi;

std::vector<Complex> prototype_poles(int order) {
  std::vector<Complex> p;
  for (int k = 1; k <= order; ++k) {
    p.push_back(std::polar(1.0, kPi * (2.0 * k + order - 1.0) / (2.0 * order)));
  }
  return p;
}

double prewarp(double f, double fs) { return 2.0 * fs * std::tan(kPi * f / fs); }

// Pairs digital poles into sections; zeros_per_section supplies numerators.
Sos assemble(const std::vector<Complex>& poles, double gain, const std::vector<std::vector<double>>& numerators,
             double fs) {
  std::vector<Complex> upper;
  std::vector<double> reals;
  for (const auto& p : poles) {
    if (std::abs(p.imag()) < 1e-12) {
      reals.push_back(p.real());
    } else if (p.imag() > 0.0) {
      upper.push_back(p);
    }
  }
  Sos sos;
  sos.fs = fs;
  std::size_t z = 0;
  for (const auto& p : upper) {
    const auto& n = numerators[z++];
    sos.sections.push_back({n[0], n[1], n[2], -2.0 * p.real(), std::norm(p)});
  }
  for (std::size_t i = 0; i < reals.size(); i += 2) {
    const auto& n = numerators[z++];
    if (i + 1 < reals.size()) {
      sos.sections.push_back({n[0], n[1], n[2], -(reals[i] + reals[i + 1]), reals[i] * reals[i + 1]});
    } else {
      sos.sections.push_back({n[0], n[1], n[2], -reals[i], 0.0});
    }
  }
  sos.sections.front().b0 *= gain;
  sos.sections.front().b1 *= gain;
  sos.sections.front().b2 *= gain;
  return sos;
}

void check_order(int order) {
  if (order < 1 || order > 8) throw InvalidParameter(fmt::format("Butterworth order {} out of range", order));
}

}  // namespace

Complex Sos::eval_hz(double hz) const {
  const Complex w = std::polar(1.0, -2.0 * kPi * hz / fs);
  Complex h = 1.0;
  for (const auto& s : sections) {
    h *= (s.b0 + w * (s.b1 + w * s.b2)) / (1.0 + w * (s.a1 + w * s.a2));
  }
  return h;
}

Sos butter_lowpass(int order, double fc_hz, double fs) {
  check_order(order);
  if (!(fc_hz > 0.0 && fc_hz < fs / 2.0)) {
    throw InvalidParameter(fmt::format("cutoff {} Hz must lie in (0, {})", fc_hz, fs / 2.0));
  }
  const double wc = prewarp(fc_hz, fs);
  const double fs2 = 2.0 * fs;
  std::vector<Complex> poles;
  Complex gain = std::pow(wc, order);
  for (const auto& p : prototype_poles(order)) {
    const Complex s = wc * p;
    poles.push_back((fs2 + s) / (fs2 - s));
    gain /= (fs2 - s);
  }
  const std::size_t pairs = static_cast<std::size_t>(order + 1) / 2;
  std::vector<std::vector<double>> nums(pairs, {1.0, 2.0, 1.0});
  if (order % 2 == 1) nums.back() = {1.0, 1.0, 0.0};
  return assemble(poles, gain.real(), nums, fs);
}

Sos butter_bandpass(int order, double lo_hz, double hi_hz, double fs) {
  check_order(order);
  if (!(lo_hz > 0.0 && hi_hz > lo_hz && hi_hz < fs / 2.0)) {
    throw InvalidParameter(fmt::format("band [{}, {}] Hz must satisfy 0 < lo < hi < {}", lo_hz, hi_hz, fs / 2.0));
  }
  const double w1 = prewarp(lo_hz, fs);
  const double w2 = prewarp(hi_hz, fs);
  const double bw = w2 - w1;
  const double w0sq = w1 * w2;
  const double fs2 = 2.0 * fs;
  std::vector<Complex> poles;
  Complex gain = std::pow(bw * fs2, order);
  for (const auto& p : prototype_poles(order)) {
    const Complex half = p * bw / 2.0;
    const Complex root = std::sqrt(half * half - w0sq);
    for (const Complex s : {half + root, half - root}) {
      poles.push_back((fs2 + s) / (fs2 - s));
      gain /= (fs2 - s);
    }
  }
  std::vector<std::vector<double>> nums(static_cast<std::size_t>(order), {1.0, 0.0, -1.0});
  return assemble(poles, gain.real(), nums, fs);
}

std::vector<double> sosfilt(const Sos& sos, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  for (const auto& s : sos.sections) {
    double z0 = 0.0;
    double z1 = 0.0;
    for (double& v : y) {
      const double in = v;
      const double out = s.b0 * in + z0;
      z0 = s.b1 * in - s.a1 * out + z1;
      z1 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
  return y;
}

namespace {

struct State {
  double z0 = 0.0;
  double z1 = 0.0;
};

// Section states that hold the cascade in steady state for a unit step.
std::vector<State> steady_state(const Sos& sos) {
  std::vector<State> zi;
  double scale = 1.0;
  for (const auto& s : sos.sections) {
    const double g = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    State st;
    st.z1 = s.b2 - s.a2 * g;
    st.z0 = s.b1 - s.a1 * g + st.z1;
    zi.push_back({st.z0 * scale, st.z1 * scale});
    scale *= g;
  }
  return zi;
}

void run(const Sos& sos, std::vector<double>& y, const std::vector<State>& zi, double x0) {
  for (std::size_t k = 0; k < sos.sections.size(); ++k) {
    const auto& s = sos.sections[k];
    double z0 = zi[k].z0 * x0;
    double z1 = zi[k].z1 * x0;
    for (double& v : y) {
      const double in = v;
      const double out = s.b0 * in + z0;
      z0 = s.b1 * in - s.a1 * out + z1;
      z1 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
}

}  // namespace

std::size_t settling_samples(const Sos& sos, double fraction) {
  double rmax = 0.0;
  for (const auto& s : sos.sections) {
    const double disc = s.a1 * s.a1 - 4.0 * s.a2;
    if (disc < 0.0) {
      rmax = std::max(rmax, std::sqrt(s.a2));
    } else {
      rmax = std::max({rmax, std::abs((-s.a1 + std::sqrt(disc)) / 2.0), std::abs((-s.a1 - std::sqrt(disc)) / 2.0)});
    }
  }
  if (rmax <= 0.0) return 1;
  const double horizon = 10.0 * std::log(1.0 / fraction) / -std::log(rmax);
  const auto n = static_cast<std::size_t>(std::clamp(horizon, 16.0, 2.0e7));
  std::vector<double> h(n, 0.0);
  h[0] = 1.0;
  h = sosfilt(sos, h);
  double peak = 0.0;
  for (double v : h) peak = std::max(peak, std::abs(v));
  std::size_t last = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(h[i]) > fraction * peak) last = i;
  }
  return last + 1;
}

std::vector<double> filtfilt(const Sos& sos, std::span<const double> x, std::size_t padlen) {
  const std::size_t n = x.size();
  if (n < 2) throw InsufficientData("zero-phase filtering needs at least two samples");
  padlen = std::min(padlen, n - 1);
  std::vector<double> ext;
  ext.reserve(n + 2 * padlen);
  for (std::size_t i = padlen; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= padlen; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  const auto zi = steady_state(sos);
  run(sos, ext, zi, ext.front());
  std::reverse(ext.begin(), ext.end());
  run(sos, ext, zi, ext.front());
  std::reverse(ext.begin(), ext.end());
  return std::vector<double>(ext.begin() + static_cast<std::ptrdiff_t>(padlen),
                             ext.begin() + static_cast<std::ptrdiff_t>(padlen + n));
}

}  // namespace frictrl::dsp
