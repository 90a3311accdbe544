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
#include <vector>

#include "frictrl/fit.hpp"
#include "frictrl/lti.hpp"
#include "frictrl/plant.hpp"

namespace frictrl::control {

inline constexpr double kNeutralCurrentMa = 2.5;
inline constexpr double kMinCurrentMa = 0.0;
inline constexpr double kMaxCurrentMa = 5.0;

// T = C P / (1 + C P L G), with exactly cancelling roots removed.
lti::RationalTF closed_loop_T(const lti::RationalTF& c, const lti::RationalTF& p,
                              const lti::RationalTF& l, const lti::RationalTF& g);

// C = T / (P (1 - T L G)), the controller that makes the loop equal T.
lti::RationalTF synthesize_ideal(const lti::RationalTF& t, const lti::RationalTF& p,
                                 const lti::RationalTF& l, const lti::RationalTF& g);

struct DesignTarget {
  double band_lo_hz = 10.0;
  double band_hi_hz = 1000.0;
  double epsilon = 0.0;    // target log|T| in the band
  double gamma_deg = 0.0;  // target arg T in the band
  std::size_t order = 3;
  double fs = 10000.0;
  double backoff = 2.5;
  double p_design = 0.06;
  double p_min = 0.01;
  double p_max = 0.14;
  std::size_t p_grid_points = 20;
  double fit_upper_hz = 2000.0;  // fit weight is zero above this
  double out_of_band_weight = 0.05;
  std::size_t fit_points = 200;
  std::size_t restarts = 8;
  std::uint64_t seed = 1;
  std::size_t latency_samples = 0;

  void validate() const;
};

struct BandwidthPrediction {
  double p = 0.0;
  double emulated_hz = 0.0;  // C(z) on the unit circle, continuous plant
  double sampled_hz = 0.0;   // full sampled loop with hold and latency
};

struct StabilityPoint {
  double p = 0.0;
  double max_pole_radius = 0.0;
  bool stable = false;
};

struct DesignReport {
  double fit_residual = 0.0;
  double fit_rms_mag_db = 0.0;
  double fit_rms_phase_deg = 0.0;
  double equivalent_p = 0.0;  // p_design * backoff
  std::vector<BandwidthPrediction> bandwidth;  // p_min, p_design, p_max
  std::vector<StabilityPoint> stability;
  bool controller_stable = false;
  bool loop_stable = false;
};

struct Design {
  lti::DiscreteFilter controller;
  DesignReport report;
};

// Emulation design: ideal C for T_target over the band, fitted by an
// order-`order` filter at fs, then divided by the backoff factor. Throws
// DesignRejected when any P on the grid yields an unstable loop.
Design design_discrete(const DesignTarget& target, const lti::RationalTF& p,
                       const lti::RationalTF& l, const lti::RationalTF& g);

std::vector<double> p_grid(const DesignTarget& target);

enum class MitigatorMode { Neutral, Sampling, Controlling };
enum class Action { ForceNeutral, Track };

struct MitigatorState {
  MitigatorMode mode = MitigatorMode::Neutral;
  std::size_t n = 0;
  double f_star = 0.0;
  std::size_t window = 100;
};

struct MitigatorStep {
  MitigatorState state;
  Action action = Action::ForceNeutral;
};

// DC friction mitigator. Outside full slip the output is neutral and the
// estimate is cleared. The first `window` full-slip samples are averaged
// into f_star while the output stays neutral; tracking starts after.
MitigatorStep mitigator_step(const MitigatorState& ms, plant::ContactState contact, double f_m);

struct ControlOutput {
  double u_ma = kNeutralCurrentMa;
  Action action = Action::ForceNeutral;
  double error = 0.0;  // corrected error fed to C(z); 0 when neutral
  bool fault = false;
};

class Controller {
 public:
  explicit Controller(const lti::DiscreteFilter& c, std::size_t window = 100);

  // One sample at the controller rate. The corrected error is
  // f_r - direction * (f_m - f_star): friction opposes the motion, so the
  // measured sign flips with the swipe direction.
  ControlOutput step(double f_r, double f_m, plant::ContactState contact, int direction);

  const MitigatorState& mitigator() const noexcept { return ms_; }
  const lti::FilterRunner& filter() const noexcept { return runner_; }
  double fs() const noexcept { return fs_; }

 private:
  lti::FilterRunner runner_;
  MitigatorState ms_;
  double fs_;
};

}  // namespace frictrl::control
