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

// Continuous and discrete single-input single-output LTI models.
//
// Coefficient convention everywhere: descending powers. For continuous
// models that is powers of s; for discrete filters it is powers of z^-1,
// so b = {b0, b1, ...} multiplies x[n], x[n-1], ... and a[0] == 1.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "frictrl/signal.hpp"

namespace frictrl::lti {

using Complex = std::complex<double>;

namespace poly {

// Removes leading coefficients that are exactly zero; keeps at least one.
std::vector<double> trim(std::vector<double> p);
std::vector<double> mul(std::span<const double> a, std::span<const double> b);
std::vector<double> add(std::span<const double> a, std::span<const double> b);
std::vector<double> sub(std::span<const double> a, std::span<const double> b);
std::vector<double> scale(std::span<const double> a, double k);
Complex eval(std::span<const double> p, Complex x);
// Sum of |p_k| |x|^k, the natural scale for judging eval() against zero.
double eval_scale(std::span<const double> p, double abs_x);
std::vector<Complex> roots(std::span<const double> p);
std::vector<double> from_roots(std::span<const Complex> roots);
struct DivMod {
  std::vector<double> quotient;
  std::vector<double> remainder;
};
DivMod divmod(std::span<const double> num, std::span<const double> den);
bool is_zero(std::span<const double> p);

}  // namespace poly

class RationalTF {
 public:
  RationalTF(std::vector<double> num, std::vector<double> den);

  static RationalTF gain(double k) { return RationalTF({k}, {1.0}); }

  const std::vector<double>& num() const noexcept { return num_; }
  const std::vector<double>& den() const noexcept { return den_; }
  std::size_t order() const noexcept { return den_.size() - 1; }
  bool is_proper() const noexcept { return num_.size() <= den_.size(); }
  bool is_zero() const { return poly::is_zero(num_); }

  Complex eval(Complex s) const;
  Complex eval_hz(double hz) const;  // throws PoleOnAxis
  double dc_gain() const;

  RationalTF operator*(const RationalTF& other) const;
  RationalTF operator/(const RationalTF& other) const;
  RationalTF operator+(const RationalTF& other) const;
  RationalTF operator-(const RationalTF& other) const;
  RationalTF operator-() const;

  // Scales so den has a unit leading coefficient.
  RationalTF normalized() const;

 private:
  std::vector<double> num_;
  std::vector<double> den_;
};

// k * wn^2 / (s^2 + 2 zeta wn s + wn^2), wn = 2 pi fn.
RationalTF make_second_order(double gain, double fn_hz, double zeta);

// Cancels coinciding numerator/denominator roots. A cancellation is kept
// only when deflation leaves a remainder below `tol` relative to the
// polynomial scale and the reduced function matches the original within
// `tol` along the imaginary axis.
RationalTF minreal(const RationalTF& tf, double tol = 1e-9);

class FrequencyResponse {
 public:
  FrequencyResponse() = default;
  FrequencyResponse(std::vector<double> hz, std::vector<Complex> values);

  const std::vector<double>& hz() const noexcept { return hz_; }
  const std::vector<Complex>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return hz_.size(); }
  bool empty() const noexcept { return hz_.empty(); }

  // Log-frequency interpolation of log-magnitude and unwrapped phase.
  Complex interpolate(double hz) const;

 private:
  std::vector<double> hz_;
  std::vector<Complex> values_;
};

std::vector<double> logspace_hz(double lo_hz, double hi_hz, std::size_t n);

FrequencyResponse freq_response(const RationalTF& tf, std::span<const double> hz);

class DiscreteFilter {
 public:
  DiscreteFilter(std::vector<double> b, std::vector<double> a, double fs);

  static DiscreteFilter identity(double fs) { return DiscreteFilter({1.0}, {1.0}, fs); }

  const std::vector<double>& b() const noexcept { return b_; }
  const std::vector<double>& a() const noexcept { return a_; }
  double fs() const noexcept { return fs_; }
  std::size_t order() const noexcept { return std::max(a_.size(), b_.size()) - 1; }

  Complex eval_z(Complex z) const;
  Complex eval_hz(double hz) const;
  std::vector<Complex> poles() const;
  std::vector<Complex> zeros() const;
  DiscreteFilter scaled(double k) const;

 private:
  std::vector<double> b_;
  std::vector<double> a_;
  double fs_;
};

FrequencyResponse freq_response(const DiscreteFilter& filter, std::span<const double> hz);

// True iff every pole lies strictly inside the unit circle (Schur-Cohn).
bool is_stable(const DiscreteFilter& filter);

// Streaming transposed direct-form II realization with zero initial state.
class FilterRunner {
 public:
  explicit FilterRunner(const DiscreteFilter& filter);
  double step(double x);
  void reset();
  std::span<const double> state() const noexcept { return state_; }

 private:
  std::vector<double> b_;
  std::vector<double> a_;
  std::vector<double> state_;
};

inline constexpr double kDefaultDivergenceGuard = 1e12;

// Direct-form difference equation, zero initial state. Throws Divergence
// when |y| exceeds guard * max(1, max|x|).
Signal simulate_discrete(const DiscreteFilter& filter, const Signal& input,
                         double guard = kDefaultDivergenceGuard);

struct StateSpace {
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  Eigen::RowVectorXd C;
  double D = 0.0;
};

// Frequency-scaled controllable canonical realization of a proper TF.
StateSpace realize(const RationalTF& tf);

// Series connection: the output of `first` drives `second`.
StateSpace cascade(const StateSpace& first, const StateSpace& second);

// Exact zero-order-hold discretization with sample period dt. A and B are
// replaced by their discrete counterparts; C and D are unchanged.
StateSpace zoh_discretize(const StateSpace& sys, double dt);

}  // namespace frictrl::lti
