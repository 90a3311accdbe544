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

// Discrete-time view of the loop: controller C(z) at fs driving the plant
// P * L * G through a zero-order hold, optionally with whole-sample latency.

#include <cstddef>
#include <functional>
#include <vector>

#include "frictrl/lti.hpp"

namespace frictrl::control {

// Zero-order-hold equivalent of a continuous TF, as equal-length b/a in
// the z^-1 convention.
lti::DiscreteFilter zoh_equivalent(const lti::RationalTF& tf, double fs);

// Closed-loop characteristic roots for actuation gain p: the loop is
// u = C e, measured = p * LG_zoh * z^-latency * u.
std::vector<lti::Complex> closed_loop_poles(const lti::DiscreteFilter& c, double p,
                                            const lti::DiscreteFilter& lg_zoh,
                                            std::size_t latency);

double max_pole_radius(const std::vector<lti::Complex>& poles);

// Reference to measured force of the sampled loop at hz.
lti::Complex sampled_response(const lti::DiscreteFilter& c, double p,
                              const lti::DiscreteFilter& lg_zoh, std::size_t latency, double hz);

// Reference to friction force with C(z) evaluated on the unit circle and
// the plant left continuous (the emulation view).
lti::Complex emulated_response(const lti::DiscreteFilter& c, const lti::RationalTF& p,
                               const lti::RationalTF& l, const lti::RationalTF& g, double hz);

// First frequency in [lo, hi] where |h| falls below -3 dB (1/sqrt(2)),
// located on a log grid and refined by bisection. Returns hi if never.
double bandwidth_3db(const std::function<lti::Complex(double)>& h, double lo_hz, double hi_hz);

}  // namespace frictrl::control
