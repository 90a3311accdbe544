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

// Virtual finger and tribometer.
//
// Each control step holds the drive current for internal_fs / control_fs
// substeps. Per substep the swipe kinematics and contact machine advance,
// the friction force f_f is formed, and f_f drives the measurement chain
// G then L, discretized exactly under a zero-order hold. The controller
// sees the L output through the ADC at the end of the control step.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "frictrl/lti.hpp"
#include "frictrl/signal.hpp"

namespace frictrl::plant {

enum class ContactState : int { Stuck = 0, PartialSlip = 1, FullSlip = 2 };
enum class Fidelity { Envelope, Carrier };
enum class Kinematics { Sinusoidal, ConstantVelocity };

struct LoadStep {
  double time_s = 0.0;
  double delta_n = 0.0;
};

struct NormalLoadProfile {
  double mean_n = 0.5;
  double amplitude_n = 0.02;
  double freq_hz = 0.7;
  std::vector<LoadStep> steps;

  double at(double t) const;
};

struct PlantConfig {
  double mu = 0.5;
  NormalLoadProfile normal_load;

  double p_nominal = 0.06;  // N/mA
  double p_min = 0.01;
  double p_max = 0.14;
  double direction_asymmetry = 0.3;  // rightward gain x (1 + a), leftward x (1 - a)
  double gain_drift_sigma = 0.1;     // stationary std of the relative drift
  double gain_drift_tau_s = 1.0;

  double carrier_freq_hz = 20000.0;
  double internal_fs = 0.0;  // 0 selects 60 kHz (envelope) or 240 kHz (carrier)
  double control_fs = 10000.0;
  double trace_fs = 60000.0;

  // Friction noise amplitude spectral density follows c / f through both
  // anchors (N/sqrt(Hz)), flattening below noise_corner_hz.
  double noise_anchor_10hz = 1e-3;
  double noise_anchor_1khz = 1e-5;
  double noise_corner_hz = 1.0;

  lti::RationalTF G = lti::make_second_order(1.0, 4400.0, 0.6);
  lti::RationalTF L = lti::make_second_order(1.0, 5300.0, 0.707);

  int adc_bits = 14;
  double adc_range_n = 2.0;  // symmetric, +/- range
  int dac_bits = 16;
  double dac_max_ma = 5.0;
  int daq_bits = 16;
  double daq_range_n = 2.0;

  double stick_dwell_s = 0.02;
  double partial_slip_s = 0.03;
  double breakaway_ratio = 1.2;  // stuck breakaway force / (mu W)

  Kinematics kinematics = Kinematics::Sinusoidal;
  double swipe_freq_hz = 0.4;
  double swipe_amplitude_m = 0.03;
  double velocity_m_s = 0.05;  // constant-velocity mode; sign sets the direction

  Fidelity fidelity = Fidelity::Envelope;

  // Throws ConfigError when an invariant fails.
  void validate() const;
  double effective_internal_fs() const;
  std::size_t substeps_per_control() const;
  std::size_t substeps_per_trace() const;
  double noise_level() const;  // c in c / f
};

struct PlantState {
  ContactState contact = ContactState::Stuck;
  int direction = 1;
  double position_m = 0.0;
  double velocity_m_s = 0.0;
  double p_t = 0.0;
  double gain_drift = 0.0;
  double noise_n = 0.0;
  Eigen::VectorXd measurement;  // stacked G then L states
  std::uint64_t substep = 0;

  // Current stroke, i.e. the motion since the last velocity reversal.
  double stroke_start_s = 0.0;
  double stick_position_m = 0.0;
  double stick_stiffness = 0.0;
  double breakaway_n = 0.0;

  std::mt19937_64 rng;

  double elapsed_s(double internal_fs) const { return static_cast<double>(substep) / internal_fs; }
};

// One internal-rate sample, kept for tracing and probing.
struct Substep {
  double t_s = 0.0;
  double f_f = 0.0;       // friction at the finger
  double pre_l = 0.0;     // G output
  double post_l = 0.0;    // L output
  double w_n = 0.0;
  double p_t = 0.0;
  double u_ma = 0.0;      // DAC output
  ContactState contact = ContactState::Stuck;
  int direction = 1;
};

struct StepResult {
  double f_m = 0.0;  // ADC reading at the end of the step
  double w_n = 0.0;
  ContactState contact = ContactState::Stuck;
  int direction = 1;
  double p_t = 0.0;
};

class Plant {
 public:
  Plant(PlantConfig cfg, std::uint64_t seed);

  // Advances one control period with drive current u (mA). Throws
  // ActuationError for non-finite u; finite u is clipped to the DAC range.
  StepResult step(double u_ma);

  const PlantConfig& config() const noexcept { return cfg_; }
  const PlantState& state() const noexcept { return state_; }
  double internal_fs() const noexcept { return internal_fs_; }
  const std::vector<Substep>& last_substeps() const noexcept { return substeps_; }

  double quantize_adc(double f) const;
  double quantize_daq(double f) const;
  double quantize_dac(double u) const;

 private:
  void advance_kinematics(double t_end);
  void begin_stroke(double t, int direction);
  double friction(double t, double w) const;
  double contact_fraction(double t) const;
  double rectified_mean(double t0) const;

  PlantConfig cfg_;
  double internal_fs_;
  double dt_;
  PlantState state_;
  lti::StateSpace chain_;  // discretized G then L
  Eigen::RowVectorXd pre_l_c_;
  double pre_l_d_ = 0.0;
  double noise_a_ = 0.0;
  double noise_sd_ = 0.0;
  double drift_a_ = 0.0;
  double drift_sd_ = 0.0;
  std::vector<Substep> substeps_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

PlantState init_plant(const PlantConfig& cfg, std::uint64_t seed);

}  // namespace frictrl::plant
