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

#include "frictrl/plant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "frictrl/error.hpp"

namespace frictrl::plant {

namespace {

constexpr double kPi = std::numbers::pi;

bool divides(double big, double small) {
  const double r = big / small;
  return r >= 1.0 - 1e-9 && std::abs(r - std::round(r)) < 1e-9 * r;
}

double quantize(double x, int bits, double lo, double hi, bool mid_tread_symmetric) {
  if (mid_tread_symmetric) {
    const double q = (hi - lo) / std::ldexp(1.0, bits);
    const double top = std::ldexp(1.0, bits - 1);
    const double code = std::clamp(std::round(x / q), -top, top - 1.0);
    return code * q;
  }
  const double q = (hi - lo) / std::ldexp(1.0, bits);
  const double code = std::clamp(std::round((x - lo) / q), 0.0, std::ldexp(1.0, bits) - 1.0);
  return lo + code * q;
}

// Integral of |sin| from 0 to theta.
double abs_sin_integral(double theta) {
  const double k = std::floor(theta / kPi);
  return 2.0 * k + 1.0 - std::cos(theta - k * kPi);
}

}  // namespace

double NormalLoadProfile::at(double t) const {
  double w = mean_n + amplitude_n * std::sin(2.0 * kPi * freq_hz * t);
  for (const auto& s : steps) {
    if (t >= s.time_s) w += s.delta_n;
  }
  return w;
}

double PlantConfig::effective_internal_fs() const {
  if (internal_fs > 0.0) return internal_fs;
  return fidelity == Fidelity::Carrier ? 240000.0 : 60000.0;
}

std::size_t PlantConfig::substeps_per_control() const {
  return static_cast<std::size_t>(std::llround(effective_internal_fs() / control_fs));
}

std::size_t PlantConfig::substeps_per_trace() const {
  return static_cast<std::size_t>(std::llround(effective_internal_fs() / trace_fs));
}

double PlantConfig::noise_level() const {
  return std::sqrt(noise_anchor_10hz * 10.0 * noise_anchor_1khz * 1000.0);
}

void PlantConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!(mu > 0.0)) fail("mu must be positive");
  if (!(normal_load.mean_n > 0.0)) fail("mean normal load must be positive");
  if (!(normal_load.amplitude_n >= 0.0) || normal_load.amplitude_n >= normal_load.mean_n) {
    fail("normal load amplitude must lie in [0, mean)");
  }
  if (!(p_min > 0.0 && p_min <= p_nominal && p_nominal <= p_max)) {
    fail(fmt::format("need 0 < P_min <= P_nominal <= P_max, got {}, {}, {}", p_min, p_nominal, p_max));
  }
  if (!(direction_asymmetry >= 0.0 && direction_asymmetry < 1.0)) fail("direction asymmetry must lie in [0, 1)");
  if (!(gain_drift_sigma >= 0.0) || !(gain_drift_tau_s > 0.0)) fail("gain drift parameters invalid");
  if (!(control_fs > 0.0) || !(trace_fs > 0.0)) fail("rates must be positive");
  const double ifs = effective_internal_fs();
  if (!divides(ifs, control_fs)) fail(fmt::format("control rate {} must divide internal rate {}", control_fs, ifs));
  if (!divides(ifs, trace_fs)) fail(fmt::format("trace rate {} must divide internal rate {}", trace_fs, ifs));
  if (fidelity == Fidelity::Carrier && ifs < 4.0 * carrier_freq_hz) {
    fail(fmt::format("carrier mode needs internal rate >= {} Hz", 4.0 * carrier_freq_hz));
  }
  if (!(noise_anchor_10hz >= 0.0 && noise_anchor_1khz >= 0.0) || !(noise_corner_hz > 0.0)) {
    fail("noise parameters invalid");
  }
  if (!G.is_proper() || !L.is_proper()) fail("G and L must be proper");
  if (adc_bits < 2 || adc_bits > 32 || dac_bits < 2 || dac_bits > 32 || daq_bits < 2 || daq_bits > 32) {
    fail("converter bit depths must lie in [2, 32]");
  }
  if (!(adc_range_n > 0.0 && daq_range_n > 0.0 && dac_max_ma > 0.0)) fail("converter ranges must be positive");
  if (!(stick_dwell_s > 0.0) || !(partial_slip_s > 0.0) || !(breakaway_ratio > 0.0)) {
    fail("contact timing must be positive");
  }
  if (kinematics == Kinematics::Sinusoidal) {
    if (!(swipe_freq_hz > 0.0) || !(swipe_amplitude_m > 0.0)) fail("swipe parameters must be positive");
    if (stick_dwell_s + partial_slip_s >= 0.5 / swipe_freq_hz) {
      fail("stick dwell plus partial slip must be shorter than half a swipe period");
    }
  } else if (velocity_m_s == 0.0) {
    fail("constant-velocity kinematics need nonzero velocity");
  }
}

Plant::Plant(PlantConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)) {
  cfg_.validate();
  internal_fs_ = cfg_.effective_internal_fs();
  dt_ = 1.0 / internal_fs_;

  const lti::StateSpace g = lti::realize(cfg_.G);
  const lti::StateSpace l = lti::realize(cfg_.L);
  chain_ = lti::zoh_discretize(lti::cascade(g, l), dt_);
  pre_l_c_ = Eigen::RowVectorXd::Zero(chain_.A.rows());
  pre_l_c_.head(g.A.rows()) = g.C;
  pre_l_d_ = g.D;

  const double wc = 2.0 * kPi * cfg_.noise_corner_hz;
  const double k = 2.0 * kPi * cfg_.noise_level();
  noise_a_ = std::exp(-wc * dt_);
  noise_sd_ = std::sqrt(k * k * (1.0 - noise_a_ * noise_a_) / (4.0 * wc));
  drift_a_ = std::exp(-dt_ / cfg_.gain_drift_tau_s);
  drift_sd_ = cfg_.gain_drift_sigma * std::sqrt(1.0 - drift_a_ * drift_a_);

  state_.rng.seed(seed);
  state_.measurement = Eigen::VectorXd::Zero(chain_.A.rows());
  state_.p_t = cfg_.p_nominal;
  const int dir = cfg_.kinematics == Kinematics::Sinusoidal ? 1 : (cfg_.velocity_m_s > 0 ? 1 : -1);
  advance_kinematics(0.0);
  begin_stroke(0.0, dir);
  state_.contact = ContactState::Stuck;
  state_.p_t = cfg_.p_nominal;
  substeps_.reserve(cfg_.substeps_per_control());
}

void Plant::advance_kinematics(double t) {
  if (cfg_.kinematics == Kinematics::Sinusoidal) {
    const double w = 2.0 * kPi * cfg_.swipe_freq_hz;
    state_.position_m = -cfg_.swipe_amplitude_m * std::cos(w * t);
    state_.velocity_m_s = cfg_.swipe_amplitude_m * w * std::sin(w * t);
  } else {
    state_.position_m = cfg_.velocity_m_s * t;
    state_.velocity_m_s = cfg_.velocity_m_s;
  }
}

void Plant::begin_stroke(double t, int direction) {
  state_.direction = direction;
  state_.stroke_start_s = t;
  double x0 = 0.0;
  double x1 = 0.0;
  if (cfg_.kinematics == Kinematics::Sinusoidal) {
    const double w = 2.0 * kPi * cfg_.swipe_freq_hz;
    x0 = -cfg_.swipe_amplitude_m * std::cos(w * t);
    x1 = -cfg_.swipe_amplitude_m * std::cos(w * (t + cfg_.stick_dwell_s));
  } else {
    x0 = cfg_.velocity_m_s * t;
    x1 = cfg_.velocity_m_s * (t + cfg_.stick_dwell_s);
  }
  state_.stick_position_m = x0;
  state_.breakaway_n = cfg_.breakaway_ratio * cfg_.mu * cfg_.normal_load.at(t);
  state_.stick_stiffness = state_.breakaway_n / std::abs(x1 - x0);
}

double Plant::contact_fraction(double t) const {
  const double e = t - state_.stroke_start_s;
  if (e < cfg_.stick_dwell_s) return 0.0;
  if (e < cfg_.stick_dwell_s + cfg_.partial_slip_s) return (e - cfg_.stick_dwell_s) / cfg_.partial_slip_s;
  return 1.0;
}

double Plant::friction(double t, double w) const {
  const double s = state_.direction;
  const double coulomb = s * cfg_.mu * w;
  switch (state_.contact) {
    case ContactState::Stuck:
      return state_.stick_stiffness * (state_.position_m - state_.stick_position_m);
    case ContactState::PartialSlip: {
      const double a = contact_fraction(t);
      return (1.0 - a) * s * state_.breakaway_n + a * coulomb;
    }
    case ContactState::FullSlip:
      return coulomb;
  }
  return coulomb;
}

double Plant::rectified_mean(double t0_cycles) const {
  const double cycles_per_step = cfg_.carrier_freq_hz * dt_;
  const double th0 = 2.0 * kPi * t0_cycles;
  const double th1 = th0 + 2.0 * kPi * cycles_per_step;
  return 0.5 * kPi * (abs_sin_integral(th1) - abs_sin_integral(th0)) / (th1 - th0);
}

double Plant::quantize_adc(double f) const {
  return quantize(f, cfg_.adc_bits, -cfg_.adc_range_n, cfg_.adc_range_n, true);
}

double Plant::quantize_daq(double f) const {
  return quantize(f, cfg_.daq_bits, -cfg_.daq_range_n, cfg_.daq_range_n, true);
}

double Plant::quantize_dac(double u) const {
  return quantize(std::clamp(u, 0.0, cfg_.dac_max_ma), cfg_.dac_bits, 0.0, cfg_.dac_max_ma, false);
}

StepResult Plant::step(double u_ma) {
  if (!std::isfinite(u_ma)) throw ActuationError("drive current is not finite");
  const double u = quantize_dac(u_ma);
  const std::size_t k = cfg_.substeps_per_control();
  substeps_.clear();
  const double half_period = cfg_.kinematics == Kinematics::Sinusoidal ? 0.5 / cfg_.swipe_freq_hz : 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const std::uint64_t n = state_.substep;
    const double t_end = static_cast<double>(n + 1) * dt_;

    if (cfg_.kinematics == Kinematics::Sinusoidal) {
      const auto stroke_now = static_cast<std::int64_t>(std::floor(static_cast<double>(n) * dt_ / half_period));
      const auto stroke_next = static_cast<std::int64_t>(std::floor(t_end / half_period));
      if (stroke_next != stroke_now) {
        begin_stroke(static_cast<double>(stroke_next) * half_period, stroke_next % 2 == 0 ? 1 : -1);
      }
    }
    advance_kinematics(t_end);
    const double frac = contact_fraction(t_end);
    state_.contact = frac <= 0.0   ? ContactState::Stuck
                     : frac < 1.0 ? ContactState::PartialSlip
                                  : ContactState::FullSlip;

    state_.gain_drift = drift_a_ * state_.gain_drift + drift_sd_ * normal_(state_.rng);
    state_.noise_n = noise_a_ * state_.noise_n + noise_sd_ * normal_(state_.rng);
    const double asym = 1.0 + state_.direction * cfg_.direction_asymmetry;
    state_.p_t = std::clamp(cfg_.p_nominal * asym * (1.0 + state_.gain_drift), cfg_.p_min, cfg_.p_max);

    double drive = u;
    if (cfg_.fidelity == Fidelity::Carrier) {
      const double cycles = static_cast<double>(n) * cfg_.carrier_freq_hz * dt_;
      drive = u * rectified_mean(cycles - std::floor(cycles));
    }
    const double w = cfg_.normal_load.at(t_end);
    const double f_a = state_.direction * frac * state_.p_t * drive;
    const double f_f = friction(t_end, w) + f_a + state_.noise_n;

    state_.measurement = chain_.A * state_.measurement + chain_.B * f_f;
    const double pre = (pre_l_c_ * state_.measurement)(0) + pre_l_d_ * f_f;
    const double post = (chain_.C * state_.measurement)(0) + chain_.D * f_f;
    if (!std::isfinite(post)) throw ActuationError("measurement chain produced a non-finite force");
    state_.substep = n + 1;
    substeps_.push_back({t_end, f_f, pre, post, w, state_.p_t, u, state_.contact, state_.direction});
  }
  const Substep& last = substeps_.back();
  return {quantize_adc(last.post_l), last.w_n, last.contact, last.direction, last.p_t};
}

PlantState init_plant(const PlantConfig& cfg, std::uint64_t seed) {
  return Plant(cfg, seed).state();
}

}  // namespace frictrl::plant
