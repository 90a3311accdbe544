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

// Small dense Levenberg-Marquardt solver with a central-difference Jacobian.

#include <cstddef>
#include <functional>

#include <Eigen/Dense>

namespace frictrl::detail {

struct LmOptions {
  std::size_t max_iterations = 400;
  double initial_lambda = 1e-3;
  double rel_tol = 1e-14;
  double grad_tol = 1e-14;
};

struct LmResult {
  Eigen::VectorXd x;
  double cost = 0.0;  // 0.5 * |r|^2
  std::size_t iterations = 0;
  bool converged = false;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

LmResult levenberg_marquardt(const ResidualFn& residual, Eigen::VectorXd x0,
                             const LmOptions& options = {});

}  // namespace frictrl::detail
