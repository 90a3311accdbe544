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

#include "lm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace frictrl::detail {

namespace {

double half_sq(const Eigen::VectorXd& r) {
  if (!r.allFinite()) return std::numeric_limits<double>::infinity();
  return 0.5 * r.squaredNorm();
}

Eigen::MatrixXd jacobian(const ResidualFn& f, const Eigen::VectorXd& x, Eigen::Index m) {
  Eigen::MatrixXd j(m, x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
    xp[i] = x[i] + h;
    const Eigen::VectorXd rp = f(xp);
    xp[i] = x[i] - h;
    const Eigen::VectorXd rm = f(xp);
    xp[i] = x[i];
    j.col(i) = (rp - rm) / (2.0 * h);
  }
  return j;
}

}  // namespace

LmResult levenberg_marquardt(const ResidualFn& residual, Eigen::VectorXd x0,
                             const LmOptions& options) {
  LmResult out;
  out.x = std::move(x0);
  Eigen::VectorXd r = residual(out.x);
  out.cost = half_sq(r);
  if (!std::isfinite(out.cost)) return out;
  double lambda = options.initial_lambda;
  for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
    const Eigen::MatrixXd j = jacobian(residual, out.x, r.size());
    if (!j.allFinite()) break;
    const Eigen::MatrixXd jtj = j.transpose() * j;
    const Eigen::VectorXd g = j.transpose() * r;
    if (g.lpNorm<Eigen::Infinity>() <= options.grad_tol * std::max(1.0, out.cost)) {
      out.converged = true;
      break;
    }
    bool improved = false;
    for (int attempt = 0; attempt < 30; ++attempt) {
      Eigen::MatrixXd lhs = jtj;
      for (Eigen::Index i = 0; i < lhs.rows(); ++i) {
        lhs(i, i) += lambda * std::max(jtj(i, i), 1e-12);
      }
      const Eigen::VectorXd step = lhs.ldlt().solve(-g);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const Eigen::VectorXd trial = out.x + step;
      const Eigen::VectorXd rt = residual(trial);
      const double ct = half_sq(rt);
      if (ct < out.cost) {
        const double drop = (out.cost - ct) / std::max(out.cost, 1e-300);
        out.x = trial;
        r = rt;
        out.cost = ct;
        lambda = std::max(lambda / 3.0, 1e-12);
        improved = true;
        if (drop < options.rel_tol) out.converged = true;
        break;
      }
      lambda *= 4.0;
    }
    if (!improved) {
      out.converged = true;
      break;
    }
    if (out.converged) break;
  }
  return out;
}

}  // namespace frictrl::detail
