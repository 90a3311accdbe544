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

#include "frictrl/lti.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "frictrl/error.hpp"

namespace frictrl::lti {

namespace {

constexpr double kPi = std::numbers::pi;
// A sum coefficient smaller than this fraction of its summands' magnitudes
// is cancellation residue.
constexpr double kCancelTol = 1e-13;
constexpr double kPoleOnAxisTol = 1e-12;

void require_finite(std::span<const double> p, const char* what) {
  if (p.empty()) throw InvalidParameter(fmt::format("{} coefficient list is empty", what));
  for (double c : p) {
    if (!std::isfinite(c)) throw InvalidParameter(fmt::format("{} has a non-finite coefficient", what));
  }
}

void validate_grid(std::span<const double> hz) {
  for (std::size_t i = 0; i < hz.size(); ++i) {
    if (!(hz[i] > 0.0) || !std::isfinite(hz[i])) {
      throw InvalidParameter(fmt::format("frequency {} Hz must be positive and finite", hz[i]));
    }
    if (i > 0 && !(hz[i] > hz[i - 1])) {
      throw InvalidParameter("frequencies must be strictly increasing");
    }
  }
}

}  // namespace

namespace poly {

std::vector<double> trim(std::vector<double> p) {
  if (p.empty()) return {0.0};
  std::size_t lead = 0;
  while (lead + 1 < p.size() && p[lead] == 0.0) ++lead;
  p.erase(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(lead));
  return p;
}

std::vector<double> mul(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {0.0};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

std::vector<double> add(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::max(a.size(), b.size());
  std::vector<double> out(n, 0.0);
  std::vector<double> mag(n, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[n - a.size() + i] += a[i];
    mag[n - a.size() + i] += std::abs(a[i]);
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    out[n - b.size() + i] += b[i];
    mag[n - b.size() + i] += std::abs(b[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(out[i]) <= kCancelTol * mag[i]) out[i] = 0.0;
  }
  return trim(std::move(out));
}

std::vector<double> sub(std::span<const double> a, std::span<const double> b) {
  return add(a, scale(b, -1.0));
}

std::vector<double> scale(std::span<const double> a, double k) {
  std::vector<double> out(a.begin(), a.end());
  for (double& c : out) c *= k;
  return out;
}

Complex eval(std::span<const double> p, Complex x) {
  Complex acc = 0.0;
  for (double c : p) acc = acc * x + c;
  return acc;
}

double eval_scale(std::span<const double> p, double abs_x) {
  double acc = 0.0;
  for (double c : p) acc = acc * abs_x + std::abs(c);
  return acc;
}

std::vector<Complex> roots(std::span<const double> p_in) {
  const std::vector<double> p0 = trim(std::vector<double>(p_in.begin(), p_in.end()));
  std::vector<double> p = p0;
  std::vector<Complex> out;
  while (p.size() > 1 && p.back() == 0.0) {
    p.pop_back();
    out.emplace_back(0.0, 0.0);
  }
  const std::size_t n = p.size() - 1;
  if (n == 0) return out;
  // Substitute x = w0 y with w0 the geometric mean root magnitude so the
  // companion matrix is well scaled.
  const double w0 = std::pow(std::abs(p[n] / p[0]), 1.0 / static_cast<double>(n));
  std::vector<double> q(p.size());
  double wk = 1.0;
  for (std::size_t k = 0; k <= n; ++k) {
    q[n - k] = p[n - k] / p[n] * wk;
    wk *= w0;
  }
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                    static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) companion(0, static_cast<Eigen::Index>(j)) = -q[j + 1] / q[0];
  for (std::size_t i = 1; i < n; ++i) {
    companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  const auto& ev = solver.eigenvalues();
  std::vector<double> dq(n);
  for (std::size_t k = 0; k < n; ++k) dq[k] = q[k] * static_cast<double>(n - k);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    Complex y = ev[i];
    for (int it = 0; it < 3; ++it) {
      const Complex f = eval(q, y);
      const Complex d = eval(dq, y);
      if (std::abs(d) == 0.0) break;
      const Complex next = y - f / d;
      if (!(std::abs(eval(q, next)) < std::abs(f))) break;
      y = next;
    }
    if (std::abs(y.imag()) <= 1e-14 * std::abs(y)) y.imag(0.0);
    out.push_back(y * w0);
  }
  return out;
}

std::vector<double> from_roots(std::span<const Complex> rts) {
  std::vector<Complex> acc{1.0};
  for (const Complex& r : rts) {
    std::vector<Complex> next(acc.size() + 1, 0.0);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      next[i] += acc[i];
      next[i + 1] -= acc[i] * r;
    }
    acc = std::move(next);
  }
  std::vector<double> out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = acc[i].real();
  return out;
}

DivMod divmod(std::span<const double> num_in, std::span<const double> den_in) {
  std::vector<double> den = trim(std::vector<double>(den_in.begin(), den_in.end()));
  if (den[0] == 0.0) throw InvalidParameter("polynomial division by zero");
  std::vector<double> rem = trim(std::vector<double>(num_in.begin(), num_in.end()));
  if (rem.size() < den.size()) return {{0.0}, rem};
  const std::size_t qn = rem.size() - den.size() + 1;
  std::vector<double> q(qn, 0.0);
  for (std::size_t i = 0; i < qn; ++i) {
    const double c = rem[i] / den[0];
    q[i] = c;
    for (std::size_t j = 0; j < den.size(); ++j) rem[i + j] -= c * den[j];
  }
  std::vector<double> r(rem.end() - static_cast<std::ptrdiff_t>(den.size() - 1), rem.end());
  if (r.empty()) r.push_back(0.0);
  return {q, trim(std::move(r))};
}

bool is_zero(std::span<const double> p) {
  return std::all_of(p.begin(), p.end(), [](double c) { return c == 0.0; });
}

}  // namespace poly

RationalTF::RationalTF(std::vector<double> num, std::vector<double> den) {
  require_finite(num, "numerator");
  require_finite(den, "denominator");
  num_ = poly::trim(std::move(num));
  den_ = poly::trim(std::move(den));
  if (den_[0] == 0.0) throw InvalidParameter("denominator is identically zero");
  if (poly::is_zero(num_)) num_ = {0.0};
}

Complex RationalTF::eval(Complex s) const {
  return poly::eval(num_, s) / poly::eval(den_, s);
}

Complex RationalTF::eval_hz(double hz) const {
  const Complex s(0.0, 2.0 * kPi * hz);
  const Complex d = poly::eval(den_, s);
  if (std::abs(d) <= kPoleOnAxisTol * std::max(1.0, poly::eval_scale(den_, std::abs(s)))) {
    throw PoleOnAxis(fmt::format("transfer function has a pole on the imaginary axis at {} Hz", hz));
  }
  return poly::eval(num_, s) / d;
}

double RationalTF::dc_gain() const {
  if (den_.back() == 0.0) return std::numeric_limits<double>::infinity();
  return num_.back() / den_.back();
}

RationalTF RationalTF::operator*(const RationalTF& o) const {
  return RationalTF(poly::mul(num_, o.num_), poly::mul(den_, o.den_));
}

RationalTF RationalTF::operator/(const RationalTF& o) const {
  if (o.is_zero()) throw InvalidParameter("division by a zero transfer function");
  return RationalTF(poly::mul(num_, o.den_), poly::mul(den_, o.num_));
}

RationalTF RationalTF::operator+(const RationalTF& o) const {
  if (den_ == o.den_) return RationalTF(poly::add(num_, o.num_), den_);
  return RationalTF(poly::add(poly::mul(num_, o.den_), poly::mul(o.num_, den_)),
                    poly::mul(den_, o.den_));
}

RationalTF RationalTF::operator-(const RationalTF& o) const { return *this + (-o); }

RationalTF RationalTF::operator-() const { return RationalTF(poly::scale(num_, -1.0), den_); }

RationalTF RationalTF::normalized() const {
  return RationalTF(poly::scale(num_, 1.0 / den_[0]), poly::scale(den_, 1.0 / den_[0]));
}

RationalTF make_second_order(double gain, double fn_hz, double zeta) {
  if (!(fn_hz > 0.0) || !std::isfinite(fn_hz)) {
    throw InvalidParameter(fmt::format("natural frequency must be positive, got {}", fn_hz));
  }
  if (!(zeta > 0.0) || !std::isfinite(zeta)) {
    throw InvalidParameter(fmt::format("damping ratio must be positive, got {}", zeta));
  }
  if (!std::isfinite(gain)) throw InvalidParameter("gain must be finite");
  const double wn = 2.0 * kPi * fn_hz;
  return RationalTF({gain * wn * wn}, {1.0, 2.0 * zeta * wn, wn * wn});
}

namespace {

// Attempts to remove the factor with root r (and its conjugate when r is
// complex). Succeeds only if r is a root of p to within tol.
bool deflate(std::vector<double>& p, Complex r, double tol) {
  if (std::abs(poly::eval(p, r)) > tol * std::max(poly::eval_scale(p, std::abs(r)), 1e-300)) {
    return false;
  }
  std::vector<double> factor;
  if (std::abs(r.imag()) > 1e-12 * std::max(1.0, std::abs(r))) {
    factor = {1.0, -2.0 * r.real(), std::norm(r)};
  } else {
    factor = {1.0, -r.real()};
  }
  p = poly::divmod(p, factor).quotient;
  return true;
}

}  // namespace

RationalTF minreal(const RationalTF& tf, double tol) {
  if (tf.is_zero()) return RationalTF({0.0}, {1.0});
  std::vector<double> num = tf.num();
  std::vector<double> den = tf.den();

  // A cancellation is kept only if the reduced function still matches the
  // original along the imaginary axis across the span of root magnitudes.
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& set : {poly::roots(num), poly::roots(den)}) {
    for (const Complex& r : set) {
      if (std::abs(r) == 0.0) continue;
      lo = std::min(lo, std::abs(r));
      hi = std::max(hi, std::abs(r));
    }
  }
  if (hi == 0.0) lo = hi = 1.0;
  std::vector<Complex> probes;
  constexpr int kProbes = 64;
  for (int i = 0; i < kProbes; ++i) {
    const double t = static_cast<double>(i) / (kProbes - 1);
    probes.emplace_back(0.0, std::exp(std::log(lo / 10.0) + t * std::log(100.0 * hi / lo)));
  }
  std::vector<Complex> reference;
  for (const Complex& s : probes) reference.push_back(poly::eval(num, s) / poly::eval(den, s));
  auto faithful = [&](const std::vector<double>& n2, const std::vector<double>& d2) {
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const Complex want = reference[i];
      if (!std::isfinite(std::abs(want))) continue;
      const Complex got = poly::eval(n2, probes[i]) / poly::eval(d2, probes[i]);
      if (!(std::abs(got - want) <= tol * std::max(std::abs(want), 1e-300))) return false;
    }
    return true;
  };

  bool changed = true;
  while (changed && num.size() > 1 && den.size() > 1) {
    changed = false;
    const auto zr = poly::roots(num);
    const auto pr = poly::roots(den);
    for (const Complex& z : zr) {
      if (z.imag() < 0.0) continue;
      for (const Complex& p : pr) {
        if (p.imag() < 0.0) continue;
        if (std::abs(z - p) > 1e-6 * std::max(1.0, std::abs(p))) continue;
        const Complex r = 0.5 * (z + p);
        std::vector<double> n2 = num;
        std::vector<double> d2 = den;
        if (deflate(n2, r, tol) && deflate(d2, r, tol) && faithful(n2, d2)) {
          num = std::move(n2);
          den = std::move(d2);
          changed = true;
          break;
        }
      }
      if (changed) break;
    }
  }
  return RationalTF(num, den);
}

FrequencyResponse::FrequencyResponse(std::vector<double> hz, std::vector<Complex> values)
    : hz_(std::move(hz)), values_(std::move(values)) {
  if (hz_.size() != values_.size()) {
    throw InvalidParameter("frequency response needs one value per frequency");
  }
  validate_grid(hz_);
}

Complex FrequencyResponse::interpolate(double hz) const {
  if (hz_.empty()) throw InsufficientData("empty frequency response");
  if (hz < hz_.front() || hz > hz_.back()) {
    throw InvalidParameter(fmt::format("{} Hz is outside the response range [{}, {}]", hz,
                                       hz_.front(), hz_.back()));
  }
  auto it = std::lower_bound(hz_.begin(), hz_.end(), hz);
  std::size_t i = static_cast<std::size_t>(it - hz_.begin());
  if (i == 0) return values_[0];
  if (hz_[i] == hz) return values_[i];
  const std::size_t j = i - 1;
  const double t = std::log(hz / hz_[j]) / std::log(hz_[i] / hz_[j]);
  const double lm = std::log(std::abs(values_[j])) * (1 - t) + std::log(std::abs(values_[i])) * t;
  double dphi = std::arg(values_[i]) - std::arg(values_[j]);
  dphi = std::remainder(dphi, 2.0 * kPi);
  const double phi = std::arg(values_[j]) + t * dphi;
  return std::polar(std::exp(lm), phi);
}

std::vector<double> logspace_hz(double lo_hz, double hi_hz, std::size_t n) {
  if (!(lo_hz > 0.0) || !(hi_hz >= lo_hz) || n == 0) {
    throw InvalidParameter(fmt::format("bad log grid [{}, {}] x {}", lo_hz, hi_hz, n));
  }
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo_hz;
    return out;
  }
  const double ratio = std::log(hi_hz / lo_hz);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo_hz * std::exp(ratio * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  out.back() = hi_hz;
  return out;
}

FrequencyResponse freq_response(const RationalTF& tf, std::span<const double> hz) {
  validate_grid(hz);
  std::vector<Complex> values;
  values.reserve(hz.size());
  for (double f : hz) values.push_back(tf.eval_hz(f));
  return FrequencyResponse(std::vector<double>(hz.begin(), hz.end()), std::move(values));
}

DiscreteFilter::DiscreteFilter(std::vector<double> b, std::vector<double> a, double fs)
    : b_(std::move(b)), a_(std::move(a)), fs_(fs) {
  require_finite(b_, "feedforward");
  require_finite(a_, "feedback");
  if (!(fs_ > 0.0) || !std::isfinite(fs_)) {
    throw InvalidParameter(fmt::format("filter sample rate must be positive, got {}", fs_));
  }
  if (a_[0] == 0.0) throw InvalidParameter("leading feedback coefficient must be nonzero");
  const double a0 = a_[0];
  for (double& c : b_) c /= a0;
  for (double& c : a_) c /= a0;
}

Complex DiscreteFilter::eval_z(Complex z) const {
  const Complex w = 1.0 / z;
  Complex nb = 0.0;
  for (auto it = b_.rbegin(); it != b_.rend(); ++it) nb = nb * w + *it;
  Complex na = 0.0;
  for (auto it = a_.rbegin(); it != a_.rend(); ++it) na = na * w + *it;
  return nb / na;
}

Complex DiscreteFilter::eval_hz(double hz) const {
  return eval_z(std::polar(1.0, 2.0 * kPi * hz / fs_));
}

std::vector<Complex> DiscreteFilter::poles() const { return poly::roots(a_); }

std::vector<Complex> DiscreteFilter::zeros() const { return poly::roots(b_); }

DiscreteFilter DiscreteFilter::scaled(double k) const {
  return DiscreteFilter(poly::scale(b_, k), a_, fs_);
}

FrequencyResponse freq_response(const DiscreteFilter& filter, std::span<const double> hz) {
  validate_grid(hz);
  std::vector<Complex> values;
  values.reserve(hz.size());
  for (double f : hz) values.push_back(filter.eval_hz(f));
  return FrequencyResponse(std::vector<double>(hz.begin(), hz.end()), std::move(values));
}

bool is_stable(const DiscreteFilter& filter) {
  // Schur-Cohn step-down recursion on the reflection coefficients.
  std::vector<double> a = filter.a();
  while (a.size() > 1 && a.back() == 0.0) a.pop_back();
  for (std::size_t m = a.size() - 1; m >= 1; --m) {
    const double k = a[m] / a[0];
    if (!(std::abs(k) < 1.0)) return false;
    std::vector<double> next(m);
    const double denom = 1.0 - k * k;
    for (std::size_t i = 0; i < m; ++i) next[i] = (a[i] / a[0] - k * a[m - i] / a[0]) / denom;
    a = std::move(next);
  }
  return true;
}

FilterRunner::FilterRunner(const DiscreteFilter& filter) {
  const std::size_t n = std::max(filter.a().size(), filter.b().size());
  b_.assign(n, 0.0);
  a_.assign(n, 0.0);
  std::copy(filter.b().begin(), filter.b().end(), b_.begin());
  std::copy(filter.a().begin(), filter.a().end(), a_.begin());
  state_.assign(n - 1, 0.0);
}

double FilterRunner::step(double x) {
  const double y = b_[0] * x + (state_.empty() ? 0.0 : state_[0]);
  const std::size_t n = state_.size();
  for (std::size_t i = 0; i + 1 < n; ++i) state_[i] = b_[i + 1] * x - a_[i + 1] * y + state_[i + 1];
  if (n > 0) state_[n - 1] = b_[n] * x - a_[n] * y;
  return y;
}

void FilterRunner::reset() { std::fill(state_.begin(), state_.end(), 0.0); }

Signal simulate_discrete(const DiscreteFilter& filter, const Signal& input, double guard) {
  if (std::abs(input.fs() - filter.fs()) > 1e-9 * filter.fs()) {
    throw RateMismatch(fmt::format("input rate {} Hz differs from filter rate {} Hz", input.fs(),
                                   filter.fs()));
  }
  double peak_in = 1.0;
  for (double x : input.samples()) peak_in = std::max(peak_in, std::abs(x));
  const double limit = guard * peak_in;
  FilterRunner runner(filter);
  std::vector<double> out(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    out[i] = runner.step(input[i]);
    if (!(std::abs(out[i]) <= limit)) {
      throw Divergence(fmt::format("filter output diverged at sample {}", i), i);
    }
  }
  return Signal(std::move(out), input.fs(), input.unit());
}

StateSpace realize(const RationalTF& tf_in) {
  if (!tf_in.is_proper()) throw InvalidParameter("cannot realize an improper transfer function");
  const RationalTF tf = tf_in.normalized();
  const std::size_t n = tf.order();
  StateSpace ss;
  std::vector<double> num(n + 1, 0.0);
  std::copy(tf.num().begin(), tf.num().end(), num.begin() + static_cast<std::ptrdiff_t>(n + 1 - tf.num().size()));
  const auto& den = tf.den();
  ss.D = num[0];
  const auto ni = static_cast<Eigen::Index>(n);
  ss.A = Eigen::MatrixXd::Zero(ni, ni);
  ss.B = Eigen::VectorXd::Zero(ni);
  ss.C = Eigen::RowVectorXd::Zero(ni);
  if (n == 0) return ss;
  // s = w * sigma keeps the canonical coefficients near unity.
  double w = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    if (den[k] != 0.0) w = std::max(w, std::pow(std::abs(den[k]), 1.0 / static_cast<double>(k)));
  }
  if (!(w > 0.0)) w = 1.0;
  double wk = 1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    wk *= w;
    const auto j = static_cast<Eigen::Index>(k - 1);
    ss.A(0, j) = -den[k] / wk * w;
    ss.C(j) = (num[k] - ss.D * den[k]) / wk;
  }
  for (Eigen::Index i = 1; i < ni; ++i) ss.A(i, i - 1) = w;
  ss.B(0) = w;
  return ss;
}

StateSpace cascade(const StateSpace& first, const StateSpace& second) {
  const Eigen::Index n1 = first.A.rows();
  const Eigen::Index n2 = second.A.rows();
  StateSpace out;
  out.A = Eigen::MatrixXd::Zero(n1 + n2, n1 + n2);
  out.A.topLeftCorner(n1, n1) = first.A;
  out.A.bottomLeftCorner(n2, n1) = second.B * first.C;
  out.A.bottomRightCorner(n2, n2) = second.A;
  out.B = Eigen::VectorXd(n1 + n2);
  out.B.head(n1) = first.B;
  out.B.tail(n2) = second.B * first.D;
  out.C = Eigen::RowVectorXd(n1 + n2);
  out.C.head(n1) = second.D * first.C;
  out.C.tail(n2) = second.C;
  out.D = second.D * first.D;
  return out;
}

StateSpace zoh_discretize(const StateSpace& sys, double dt) {
  if (!(dt > 0.0)) throw InvalidParameter("sample period must be positive");
  const Eigen::Index n = sys.A.rows();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 1, n + 1);
  m.topLeftCorner(n, n) = sys.A * dt;
  m.topRightCorner(n, 1) = sys.B * dt;
  const Eigen::MatrixXd e = m.exp();
  StateSpace out = sys;
  out.A = e.topLeftCorner(n, n);
  out.B = e.topRightCorner(n, 1);
  return out;
}

}  // namespace frictrl::lti
