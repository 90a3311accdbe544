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

#include "frictrl/sysid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "frictrl/error.hpp"
#include "frictrl/spectral.hpp"
#include "lm.hpp"

namespace frictrl::sysid {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_deg(double deg) {
  double w = std::remainder(deg, 360.0);
  if (w <= -180.0) w += 360.0;
  return w;
}

}  // namespace

LockInResult lock_in(const Signal& signal, double f_ref) {
  if (!(f_ref > 0.0) || !(f_ref < signal.fs() / 2.0)) {
    throw InvalidParameter(fmt::format("lock-in reference {} Hz must lie in (0, fs/2)", f_ref));
  }
  const double periods = std::floor(static_cast<double>(signal.size()) * f_ref / signal.fs() + 1e-9);
  if (periods < 10.0) {
    throw InsufficientData(fmt::format("lock-in at {} Hz needs 10 periods, record holds {:.2f}", f_ref,
                                       static_cast<double>(signal.size()) * f_ref / signal.fs()));
  }
  const auto n = std::min<std::size_t>(
      signal.size(), static_cast<std::size_t>(std::llround(periods * signal.fs() / f_ref)));
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d atb = Eigen::Vector3d::Zero();
  const double w = 2.0 * kPi * f_ref / signal.fs();
  for (std::size_t i = 0; i < n; ++i) {
    const double ph = w * static_cast<double>(i);
    const Eigen::Vector3d row(std::sin(ph), std::cos(ph), 1.0);
    ata += row * row.transpose();
    atb += row * signal[i];
  }
  const Eigen::Vector3d x = ata.ldlt().solve(atb);
  LockInResult out;
  out.frequency = f_ref;
  out.amplitude = std::hypot(x[0], x[1]);
  out.phase_deg = wrap_deg(std::atan2(x[1], x[0]) * 180.0 / kPi);
  return out;
}

ImpulseAverage average_impulse_spectra(std::span<const Signal> impulses,
                                       const ImpulseOptions& options) {
  if (impulses.size() < 2) throw InsufficientData("impulse averaging needs at least two records");
  const double fs = impulses[0].fs();
  const auto window = static_cast<std::size_t>(std::llround(options.window_s * fs));
  if (window < 4) throw InvalidParameter("impulse window is too short");

  ImpulseAverage out;
  std::vector<std::vector<spectral::Complex>> spectra;
  std::vector<double> powers;
  for (std::size_t r = 0; r < impulses.size(); ++r) {
    const Signal& x = impulses[r];
    if (std::abs(x.fs() - fs) > 1e-9 * fs) throw RateMismatch("impulse records have different rates");
    std::size_t peak = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (std::abs(x[i]) > std::abs(x[peak])) peak = i;
    }
    const std::size_t pre = std::min(
        peak, static_cast<std::size_t>(options.pretrigger_fraction * static_cast<double>(x.size())));
    double rms = 0.0;
    for (std::size_t i = 0; i < pre; ++i) rms += x[i] * x[i];
    rms = pre > 0 ? std::sqrt(rms / static_cast<double>(pre)) : 0.0;
    const double threshold = options.onset_factor * rms;
    std::size_t onset = peak;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (std::abs(x[i]) > threshold) {
        onset = i;
        break;
      }
    }
    if (onset + window > x.size()) {
      throw InsufficientData(fmt::format("record {} is shorter than the window after its onset", r));
    }
    out.onsets.push_back(onset);
    const auto bins = spectral::rfft(x.view().subspan(onset, window));
    double p = 0.0;
    for (std::size_t k = 1; k < bins.size(); ++k) {
      const double f = static_cast<double>(k) * fs / static_cast<double>(window);
      if (f >= options.band_lo_hz && f <= options.band_hi_hz) p += std::norm(bins[k]);
    }
    if (!(p > 0.0)) throw InsufficientData(fmt::format("record {} has no energy in band", r));
    spectra.push_back(bins);
    powers.push_back(p);
  }

  const std::size_t nb = window / 2 + 1;
  std::vector<double> hz;
  std::vector<spectral::Complex> mean;
  for (std::size_t k = 1; k < nb; ++k) {
    hz.push_back(static_cast<double>(k) * fs / static_cast<double>(window));
    mean.emplace_back(0.0, 0.0);
  }
  for (std::size_t r = 0; r < spectra.size(); ++r) {
    const double shift = 10.0 * std::log10(powers[r] / powers[0]);
    out.shifts_db.push_back(shift);
    if (std::abs(shift) > options.max_shift_db) {
      out.warnings.push_back(
          fmt::format("record {} band power differs from record 0 by {:.2f} dB", r, shift));
    }
    const double scale = std::sqrt(powers[0] / powers[r]) / fs / static_cast<double>(spectra.size());
    for (std::size_t k = 1; k < nb; ++k) mean[k - 1] += spectra[r][k] * scale;
  }
  out.response = lti::FrequencyResponse(std::move(hz), std::move(mean));
  return out;
}

SecondOrderFit fit_second_order(const lti::FrequencyResponse& response,
                                std::pair<double, double> band_hz) {
  std::vector<double> hz;
  std::vector<lti::Complex> data;
  for (std::size_t i = 0; i < response.size(); ++i) {
    const double f = response.hz()[i];
    if (f >= band_hz.first && f <= band_hz.second) {
      hz.push_back(f);
      data.push_back(response.values()[i]);
    }
  }
  if (hz.size() < 10) {
    throw InsufficientData(fmt::format("second-order fit needs 10 in-band points, got {}", hz.size()));
  }
  const double sign = data.front().real() < 0.0 ? -1.0 : 1.0;

  const auto residual = [&](const Eigen::VectorXd& p) {
    const double k = sign * std::exp(p[0]);
    const double wn = 2.0 * kPi * std::exp(p[1]);
    const double z = std::exp(p[2]);
    const auto m = static_cast<Eigen::Index>(hz.size());
    Eigen::VectorXd r(2 * m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto u = static_cast<std::size_t>(i);
      const lti::Complex s(0.0, 2.0 * kPi * hz[u]);
      const lti::Complex h = k * wn * wn / (s * s + 2.0 * z * wn * s + wn * wn);
      const lti::Complex e = std::log(h / data[u]);
      r[i] = e.real();
      r[m + i] = e.imag();
    }
    return r;
  };

  // Coarse grid for the starting point, then Levenberg-Marquardt.
  Eigen::VectorXd best(3);
  double best_cost = std::numeric_limits<double>::infinity();
  const double k0 = std::log(std::abs(data.front()));
  for (double fn : lti::logspace_hz(std::max(hz.front() / 2.0, 1e-3), hz.back() * 100.0, 60)) {
    for (double z : {0.01, 0.03, 0.1, 0.3, 0.7, 1.0, 2.0}) {
      Eigen::VectorXd p(3);
      p << k0, std::log(fn), std::log(z);
      const double c = residual(p).squaredNorm();
      if (c < best_cost) {
        best_cost = c;
        best = p;
      }
    }
  }
  detail::LmOptions lm;
  lm.max_iterations = 500;
  const auto res = detail::levenberg_marquardt(residual, best, lm);
  if (!std::isfinite(res.cost)) {
    throw FitFailure("second-order fit diverged", best_cost / static_cast<double>(hz.size()));
  }

  SecondOrderFit out{lti::make_second_order(sign * std::exp(res.x[0]), std::exp(res.x[1]),
                                            std::exp(res.x[2])),
                     sign * std::exp(res.x[0]),
                     std::exp(res.x[1]),
                     std::exp(res.x[2]),
                     2.0 * res.cost / static_cast<double>(hz.size()),
                     false,
                     hz.size()};
  // Without visible curvature the resonance is unidentifiable.
  out.low_confidence = out.fn_hz > 10.0 * hz.back() || out.zeta > 50.0 || out.zeta < 1e-4;
  return out;
}

GainEstimate estimate_gain(std::span<const GainTrial> trials) {
  if (trials.empty()) throw InsufficientData("gain estimate needs at least one trial");
  GainEstimate out;
  double sum = 0.0;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const GainTrial& t = trials[i];
    if (std::abs(t.drive.fs() - t.force.fs()) > 1e-9 * t.drive.fs()) {
      throw RateMismatch(fmt::format("trial {} drive and force rates differ", i));
    }
    const double drive = lock_in(t.drive, t.frequency).amplitude;
    if (!(drive > 1e-12)) throw InvalidTrial(fmt::format("trial {} has zero drive amplitude", i));
    const double force = lock_in(t.force, t.frequency).amplitude;
    const double gain = force / drive;
    if (!(gain > 0.0)) throw InvalidTrial(fmt::format("trial {} produced a non-positive gain", i));
    out.per_trial.push_back({t.frequency, gain, t.direction});
    sum += gain;
  }
  out.mean = sum / static_cast<double>(trials.size());
  out.min = out.per_trial.front().gain;
  out.max = out.min;
  for (const auto& g : out.per_trial) {
    out.min = std::min(out.min, g.gain);
    out.max = std::max(out.max, g.gain);
  }
  return out;
}

}  // namespace frictrl::sysid
