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

#include "frictrl/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "frictrl/error.hpp"
#include "lm.hpp"

namespace frictrl::lti {

namespace {

constexpr double kPi = std::numbers::pi;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::size_t denominator_params(std::size_t order) { return order; }

// Maps unconstrained parameters to a monic denominator (z^-1 convention).
std::vector<double> denominator(std::span<const double> p, std::size_t order, PoleRegion region,
                                double rho) {
  std::vector<double> a{1.0};
  if (region == PoleRegion::NonNegativeReal) {
    for (std::size_t i = 0; i < order; ++i) {
      const std::vector<double> f{1.0, -rho * sigmoid(p[i])};
      a = poly::mul(a, f);
    }
    return a;
  }
  std::size_t k = 0;
  for (; k + 1 < order; k += 2) {
    const double a2 = std::tanh(p[k]);
    const double a1 = (1.0 + a2) * std::tanh(p[k + 1]);
    const std::vector<double> f{1.0, rho * a1, rho * rho * a2};
    a = poly::mul(a, f);
  }
  if (k < order) {
    const std::vector<double> f{1.0, -rho * std::tanh(p[k])};
    a = poly::mul(a, f);
  }
  return a;
}

Complex eval_inv(std::span<const double> c, Complex w) {
  Complex acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * w + *it;
  return acc;
}

struct Problem {
  std::size_t order;
  PoleRegion region;
  double rho;
  std::vector<Complex> w;       // z^-1 on the grid
  std::vector<Complex> target;  // target values on the grid
  std::vector<double> weight;

  Eigen::VectorXd residual(const Eigen::VectorXd& x) const {
    const std::size_t nd = denominator_params(order);
    const std::vector<double> a = denominator(std::span<const double>(x.data(), nd), order, region, rho);
    std::span<const double> b(x.data() + nd, order + 1);
    const auto m = static_cast<Eigen::Index>(w.size());
    Eigen::VectorXd r(2 * m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const Complex h = eval_inv(b, w[k]) / eval_inv(a, w[k]);
      const Complex e = std::log(h / target[k]) * weight[k];
      r[i] = e.real();
      r[m + i] = e.imag();
    }
    return r;
  }

  // Best numerator for a fixed denominator (linear in b for relative error).
  std::vector<double> numerator_for(const std::vector<double>& a) const {
    const auto m = static_cast<Eigen::Index>(w.size());
    const auto nb = static_cast<Eigen::Index>(order + 1);
    Eigen::MatrixXd lhs(2 * m, nb);
    Eigen::VectorXd rhs(2 * m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const Complex scale = weight[k] / (eval_inv(a, w[k]) * target[k]);
      Complex wp = 1.0;
      for (Eigen::Index j = 0; j < nb; ++j) {
        const Complex c = scale * wp;
        lhs(i, j) = c.real();
        lhs(m + i, j) = c.imag();
        wp *= w[k];
      }
      rhs[i] = weight[k];
      rhs[m + i] = 0.0;
    }
    const Eigen::VectorXd b = lhs.colPivHouseholderQr().solve(rhs);
    return std::vector<double>(b.data(), b.data() + nb);
  }
};

}  // namespace

FitResult discretize_fit(const FrequencyResponse& target, std::size_t order, double fs,
                         std::pair<double, double> band, const FitOptions& options) {
  const auto [lo, hi] = band;
  if (order < 1) throw InvalidParameter("fit order must be at least 1");
  if (!(fs > 0.0)) throw InvalidParameter("fit sample rate must be positive");
  if (!(lo > 0.0 && hi > lo && hi < fs / 2.0)) {
    throw InvalidParameter(fmt::format("fit band [{}, {}] Hz must lie within (0, {})", lo, hi, fs / 2.0));
  }
  if (target.empty() || target.hz().front() > lo * (1 + 1e-12) || target.hz().back() < hi * (1 - 1e-12)) {
    throw InvalidParameter("target response does not cover the fit band");
  }
  if (options.restarts < 1 || options.grid_points < 2) {
    throw InvalidParameter("fit needs at least one restart and two grid points");
  }
  if (!(options.max_pole_radius > 0.0 && options.max_pole_radius < 1.0)) {
    throw InvalidParameter("max pole radius must lie in (0, 1)");
  }

  Problem pb;
  pb.order = order;
  pb.region = options.region;
  pb.rho = options.max_pole_radius;
  const std::vector<double> grid = logspace_hz(lo, hi, options.grid_points);
  for (double f : grid) {
    const double hz = std::clamp(f, target.hz().front(), target.hz().back());
    const Complex t = target.interpolate(hz);
    if (!(std::abs(t) > 0.0) || !std::isfinite(std::abs(t))) {
      throw InvalidParameter(fmt::format("target response is zero or non-finite at {} Hz", f));
    }
    pb.target.push_back(t);
    pb.w.push_back(std::polar(1.0, -2.0 * kPi * f / fs));
    pb.weight.push_back(options.weight ? options.weight(f) : 1.0);
  }
  double wsum = 0.0;
  for (double x : pb.weight) wsum += x * x;
  if (!(wsum > 0.0)) throw InvalidParameter("fit weights are all zero");

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t nd = denominator_params(order);
  detail::LmOptions lm;
  lm.max_iterations = options.max_iterations;

  double best_cost = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best;
  for (std::size_t attempt = 0; attempt < options.restarts; ++attempt) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(nd + order + 1));
    const double spread = options.region == PoleRegion::NonNegativeReal ? 2.5 : 1.5;
    for (std::size_t i = 0; i < nd; ++i) x[static_cast<Eigen::Index>(i)] = spread * normal(rng);
    const std::vector<double> a =
        denominator(std::span<const double>(x.data(), nd), order, pb.region, pb.rho);
    const std::vector<double> b = pb.numerator_for(a);
    for (std::size_t i = 0; i <= order; ++i) x[static_cast<Eigen::Index>(nd + i)] = b[i];
    const auto res = detail::levenberg_marquardt(
        [&pb](const Eigen::VectorXd& p) { return pb.residual(p); }, x, lm);
    if (res.cost < best_cost) {
      best_cost = res.cost;
      best = res.x;
    }
  }
  const double residual = 2.0 * best_cost / wsum;
  if (!std::isfinite(residual) || std::sqrt(residual) > options.accept_rms) {
    throw FitFailure(fmt::format("discrete fit did not converge (best residual {:.3g})", residual),
                     residual);
  }

  std::vector<double> a = denominator(std::span<const double>(best.data(), nd), order, pb.region, pb.rho);
  std::vector<double> b(best.data() + nd, best.data() + nd + order + 1);
  FitResult out{DiscreteFilter(std::move(b), std::move(a), fs), residual, 0.0, 0.0, grid};
  double mag = 0.0;
  double ph = 0.0;
  std::size_t counted = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(pb.weight[k] > 0.0)) continue;
    const Complex e = std::log(out.filter.eval_hz(grid[k]) / pb.target[k]);
    mag += std::pow(20.0 / std::log(10.0) * e.real(), 2);
    ph += std::pow(e.imag() * 180.0 / kPi, 2);
    ++counted;
  }
  out.rms_mag_db = std::sqrt(mag / static_cast<double>(counted));
  out.rms_phase_deg = std::sqrt(ph / static_cast<double>(counted));
  return out;
}

}  // namespace frictrl::lti
