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
#include <functional>
#include <utility>

#include "frictrl/lti.hpp"

namespace frictrl::lti {

// Where the fitted denominator is allowed to place its poles. Every
// candidate the optimizer visits is stable by construction.
enum class PoleRegion {
  Disk,             // anywhere inside |z| < max_pole_radius
  NonNegativeReal,  // real poles in [0, max_pole_radius)
};

struct FitOptions {
  std::size_t grid_points = 200;
  std::size_t restarts = 8;
  std::uint64_t seed = 1;
  PoleRegion region = PoleRegion::Disk;
  double max_pole_radius = 0.9999;
  std::size_t max_iterations = 400;
  // Relative weight per grid frequency; empty means uniform.
  std::function<double(double hz)> weight;
  // Largest acceptable RMS log error (natural-log units) before the fit is
  // declared a failure.
  double accept_rms = 1.0;
};

struct FitResult {
  DiscreteFilter filter;
  // Weighted mean of |log(H / target)|^2 over the grid.
  double residual = 0.0;
  double rms_mag_db = 0.0;
  double rms_phase_deg = 0.0;
  std::vector<double> grid_hz;
};

// Fits an order-`order` discrete filter at `fs` to `target` on a log grid
// spanning `band`, minimizing log-magnitude and phase error equally.
FitResult discretize_fit(const FrequencyResponse& target, std::size_t order, double fs,
                         std::pair<double, double> band, const FitOptions& options = {});

}  // namespace frictrl::lti
