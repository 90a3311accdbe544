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

#include "frictrl/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "frictrl/error.hpp"
#include "frictrl/lti.hpp"
#include "frictrl/spectral.hpp"

namespace frictrl::signals {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t sample_count(double duration_s, double fs) {
  if (!(duration_s > 0.0) || !(fs > 0.0)) {
    throw InvalidParameter(fmt::format("duration {} s and rate {} Hz must be positive", duration_s, fs));
  }
  return static_cast<std::size_t>(std::llround(duration_s * fs));
}

void check_freq(double f_hz, double fs) {
  if (!(f_hz > 0.0 && f_hz < fs / 2.0)) {
    throw InvalidParameter(fmt::format("frequency {} Hz must lie in (0, {})", f_hz, fs / 2.0));
  }
}

}  // namespace

Signal gen_square(double f_hz, double amp, double duration_s, double fs) {
  check_freq(f_hz, fs);
  const std::size_t n = sample_count(duration_s, fs);
  std::vector<double> x(n, 0.0);
  if (amp != 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      // Half-period index; the guard keeps exact multiples on the new side.
      const auto half = static_cast<long long>(std::floor(2.0 * static_cast<double>(i) * f_hz / fs + 1e-9));
      x[i] = half % 2 == 0 ? amp : -amp;
    }
  }
  return Signal(std::move(x), fs, Unit::Newton);
}

Signal gen_sine(double f_hz, double amp, double duration_s, double fs) {
  check_freq(f_hz, fs);
  const std::size_t n = sample_count(duration_s, fs);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2.0 * kPi * f_hz * static_cast<double>(i) / fs);
  return Signal(std::move(x), fs, Unit::Newton);
}

Signal stitch_feather(const TextureSpec& spec) {
  if (spec.segments.empty()) throw SpecError("texture has no segments");
  const double fs = spec.segments.front().fs();
  const auto ov = static_cast<std::size_t>(std::llround(spec.overlap_s * fs));
  const std::size_t total = sample_count(spec.total_s, fs);
  for (const auto& s : spec.segments) {
    if (std::abs(s.fs() - fs) > 1e-9 * fs) throw SpecError("texture segments have different rates");
    if (s.size() <= ov) throw SpecError("feather overlap must be shorter than every segment");
  }
  std::vector<double> out(spec.segments.front().samples());
  for (std::size_t k = 1; k < spec.segments.size() && out.size() < total; ++k) {
    const auto& seg = spec.segments[k].samples();
    const std::size_t base = out.size() - ov;
    for (std::size_t i = 0; i < ov; ++i) {
      const double w = static_cast<double>(i + 1) / static_cast<double>(ov + 1);
      out[base + i] = (1.0 - w) * out[base + i] + w * seg[i];
    }
    out.insert(out.end(), seg.begin() + static_cast<std::ptrdiff_t>(ov), seg.end());
  }
  if (out.size() < total) {
    throw SpecError(fmt::format("segments give {:.3f} s, {:.3f} s requested", static_cast<double>(out.size()) / fs,
                                spec.total_s));
  }
  out.resize(total);
  return Signal(std::move(out), fs, spec.segments.front().unit());
}

const std::vector<TextureProfile>& texture_profiles() {
  // Fine, broadband textures sit at low amplitude; coarse ones carry strong
  // low-frequency content.
  static const std::vector<TextureProfile> profiles = {
      {"EV", 0.012, 0.5, 80.0, 2.0, 0.3},
      {"MS", 0.006, 0.0, 200.0, 0.5, 0.5},
      {"SW", 0.010, 0.7, 150.0, 1.5, 0.25},
      {"DM", 0.014, 1.0, 40.0, 2.0, 0.3},
      {"HT", 0.020, 1.5, 25.0, 3.0, 0.3},
      {"FL", 0.008, 0.3, 300.0, 1.0, 0.3},
  };
  return profiles;
}

const TextureProfile& texture_profile(std::string_view label) {
  for (const auto& p : texture_profiles()) {
    if (p.label == label) return p;
  }
  throw SpecError(fmt::format("unknown texture '{}'", label));
}

double texture_envelope(const TextureProfile& p, double hz) {
  const double bump = std::log10(hz / p.peak_hz) / p.peak_width_dec;
  return std::pow(hz / 100.0, -p.slope) * (1.0 + p.peak_gain * std::exp(-0.5 * bump * bump));
}

Signal synth_segment(const TextureProfile& profile, double duration_s, double fs, std::uint64_t seed,
                     double lo_hz, double hi_hz) {
  const std::size_t n = sample_count(duration_s, fs);
  if (!(lo_hz > 0.0 && hi_hz > lo_hz && hi_hz < fs / 2.0)) throw SpecError("texture band invalid");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  std::vector<spectral::Complex> half(n / 2 + 1, 0.0);
  for (std::size_t k = 1; k < half.size(); ++k) {
    const double f = static_cast<double>(k) * fs / static_cast<double>(n);
    const double ph = phase(rng);
    if (f < lo_hz || f > hi_hz) continue;
    half[k] = std::polar(texture_envelope(profile, f), ph);
  }
  std::vector<double> x = spectral::irfft(half, n);
  double rms = 0.0;
  for (double v : x) rms += v * v;
  rms = std::sqrt(rms / static_cast<double>(n));
  if (!(rms > 0.0)) throw SpecError("texture band holds no spectral bins");
  for (double& v : x) v *= profile.rms_n / rms;
  return Signal(std::move(x), fs, Unit::Newton);
}

TextureSpec synthetic_texture_spec(const TextureProfile& profile, double total_s, double fs, std::uint64_t seed,
                                   double segment_s, double overlap_s) {
  if (!(segment_s > overlap_s)) throw SpecError("segment must be longer than the overlap");
  TextureSpec spec;
  spec.overlap_s = overlap_s;
  spec.total_s = total_s;
  const auto count = static_cast<std::size_t>(std::ceil((total_s - overlap_s) / (segment_s - overlap_s) + 1e-9));
  std::uint64_t tag = 1469598103934665603ULL;  // FNV-1a of the label
  for (char c : profile.label) tag = (tag ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32)};
  std::vector<std::uint64_t> seeds(std::max<std::size_t>(count, 1));
  seq.generate(seeds.begin(), seeds.end());
  for (std::size_t i = 0; i < seeds.size(); ++i) spec.segments.push_back(synth_segment(profile, segment_s, fs, seeds[i]));
  return spec;
}

Signal make_texture(std::string_view label, double total_s, double fs, std::uint64_t seed) {
  return stitch_feather(synthetic_texture_spec(texture_profile(label), total_s, fs, seed));
}

std::vector<double> sweep_frequencies(std::size_t n, double lo_hz, double hi_hz) {
  return lti::logspace_hz(lo_hz, hi_hz, n);
}

std::vector<double> sweep_amplitudes() { return {0.010, 0.020, 0.030, 0.040}; }

}  // namespace frictrl::signals
