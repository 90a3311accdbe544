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

#include "frictrl/sampled_loop.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "frictrl/error.hpp"

namespace frictrl::control {

namespace {

std::vector<double> char_poly(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return {1.0};
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  std::vector<lti::Complex> ev(es.eigenvalues().data(), es.eigenvalues().data() + m.rows());
  return lti::poly::from_roots(ev);
}

std::vector<double> pad_front(std::vector<double> p, std::size_t n) {
  if (p.size() < n) p.insert(p.begin(), n - p.size(), 0.0);
  return p;
}

std::vector<double> pad_back(std::vector<double> p, std::size_t n) {
  p.resize(std::max(p.size(), n), 0.0);
  return p;
}

}  // namespace

lti::DiscreteFilter zoh_equivalent(const lti::RationalTF& tf, double fs) {
  const lti::StateSpace d = lti::zoh_discretize(lti::realize(tf), 1.0 / fs);
  const std::vector<double> den = char_poly(d.A);
  const Eigen::MatrixXd closed = d.A - d.B * d.C;
  std::vector<double> num = char_poly(closed);
  for (std::size_t i = 0; i < num.size(); ++i) num[i] += (d.D - 1.0) * den[i];
  return lti::DiscreteFilter(std::move(num), den, fs);
}

std::vector<lti::Complex> closed_loop_poles(const lti::DiscreteFilter& c, double p,
                                            const lti::DiscreteFilter& lg, std::size_t latency) {
  // Padding z^-1 lists to equal length turns them into descending
  // polynomials in z of the same degree.
  const std::size_t nc = std::max(c.a().size(), c.b().size());
  const std::size_t np = std::max(lg.a().size(), lg.b().size());
  std::vector<double> lhs = lti::poly::mul(pad_back(c.a(), nc), pad_back(lg.a(), np));
  lhs.insert(lhs.end(), latency, 0.0);
  const std::vector<double> rhs =
      lti::poly::scale(lti::poly::mul(pad_back(c.b(), nc), pad_back(lg.b(), np)), p);
  const std::size_t n = std::max(lhs.size(), rhs.size());
  std::vector<double> ch = pad_front(lhs, n);
  const std::vector<double> r = pad_front(rhs, n);
  for (std::size_t i = 0; i < n; ++i) ch[i] += r[i];
  return lti::poly::roots(ch);
}

double max_pole_radius(const std::vector<lti::Complex>& poles) {
  double r = 0.0;
  for (const auto& z : poles) r = std::max(r, std::abs(z));
  return r;
}

lti::Complex sampled_response(const lti::DiscreteFilter& c, double p, const lti::DiscreteFilter& lg,
                              std::size_t latency, double hz) {
  const lti::Complex z = std::polar(1.0, 2.0 * std::numbers::pi * hz / c.fs());
  const lti::Complex open = c.eval_z(z) * p * lg.eval_z(z) * std::pow(z, -static_cast<double>(latency));
  return open / (1.0 + open);
}

lti::Complex emulated_response(const lti::DiscreteFilter& c, const lti::RationalTF& p,
                               const lti::RationalTF& l, const lti::RationalTF& g, double hz) {
  const lti::Complex cp = c.eval_hz(hz) * p.eval_hz(hz);
  return cp / (1.0 + cp * l.eval_hz(hz) * g.eval_hz(hz));
}

double bandwidth_3db(const std::function<lti::Complex(double)>& h, double lo_hz, double hi_hz) {
  const double level = 1.0 / std::sqrt(2.0);
  const auto grid = lti::logspace_hz(lo_hz, hi_hz, 2000);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(h(grid[i])) >= level) continue;
    if (i == 0) return grid[0];
    double a = grid[i - 1];
    double b = grid[i];
    for (int it = 0; it < 60; ++it) {
      const double m = std::sqrt(a * b);
      (std::abs(h(m)) >= level ? a : b) = m;
    }
    return std::sqrt(a * b);
  }
  return hi_hz;
}

}  // namespace frictrl::control
