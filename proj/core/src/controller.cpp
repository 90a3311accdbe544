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

#include "frictrl/controller.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "frictrl/error.hpp"
#include "frictrl/json_io.hpp"
#include "frictrl/sampled_loop.hpp"

namespace frictrl::control {

namespace {

using lti::poly::mul;

constexpr double kCancelTol = 1e-12;

}  // namespace

lti::RationalTF closed_loop_T(const lti::RationalTF& c, const lti::RationalTF& p,
                              const lti::RationalTF& l, const lti::RationalTF& g) {
  if (c.is_zero() || p.is_zero()) return lti::RationalTF({0.0}, {1.0});
  const auto num = mul(mul(c.num(), p.num()), mul(l.den(), g.den()));
  const auto den = lti::poly::add(mul(mul(c.den(), p.den()), mul(l.den(), g.den())),
                                  mul(mul(c.num(), p.num()), mul(l.num(), g.num())));
  if (lti::poly::is_zero(den)) throw Degeneracy("1 + CPLG vanishes identically");
  lti::RationalTF t = lti::minreal(lti::RationalTF(num, den), kCancelTol);
  if (!t.is_proper()) throw Degeneracy("closed-loop transfer function is improper");
  return t;
}

lti::RationalTF synthesize_ideal(const lti::RationalTF& t, const lti::RationalTF& p,
                                 const lti::RationalTF& l, const lti::RationalTF& g) {
  if (p.is_zero()) throw SingularDesign("plant gain P is identically zero");
  const auto tlg_den = mul(t.den(), mul(l.den(), g.den()));
  const auto tlg_num = mul(t.num(), mul(l.num(), g.num()));
  const auto one_minus = lti::poly::sub(tlg_den, tlg_num);
  if (lti::poly::is_zero(one_minus)) throw SingularDesign("1 - TLG vanishes identically");
  // T / (P (1 - TLG)) with the common T denominator cancelled.
  return lti::RationalTF(mul(mul(t.num(), p.den()), mul(l.den(), g.den())), mul(p.num(), one_minus));
}

void DesignTarget::validate() const {
  auto fail = [](const std::string& m) { throw InvalidParameter(m); };
  if (!(fs > 0.0)) fail("design rate must be positive");
  if (!(band_lo_hz > 0.0 && band_hi_hz > band_lo_hz && band_hi_hz < fs / 2.0)) {
    fail(fmt::format("design band [{}, {}] must lie in (0, {})", band_lo_hz, band_hi_hz, fs / 2.0));
  }
  if (!(fit_upper_hz >= band_hi_hz && fit_upper_hz < fs / 2.0)) fail("fit upper edge must lie in [band_hi, fs/2)");
  if (order < 1) fail("controller order must be at least 1");
  if (!(backoff >= 1.0)) fail("backoff must be at least 1");
  if (!(p_min > 0.0 && p_min <= p_design && p_design <= p_max)) fail("need 0 < P_min <= P_design <= P_max");
  if (p_grid_points < 2) fail("stability grid needs at least two points");
  if (latency_samples > 4) fail("latency must lie in 0..4 samples");
  if (!(out_of_band_weight >= 0.0)) fail("out-of-band weight must be non-negative");
}

std::vector<double> p_grid(const DesignTarget& target) {
  return lti::logspace_hz(target.p_min, target.p_max, target.p_grid_points);
}

Design design_discrete(const DesignTarget& target, const lti::RationalTF& p,
                       const lti::RationalTF& l, const lti::RationalTF& g) {
  target.validate();
  const lti::Complex t = std::polar(std::exp(target.epsilon), target.gamma_deg * std::numbers::pi / 180.0);
  const std::vector<double> grid = lti::logspace_hz(target.band_lo_hz, target.fit_upper_hz, target.fit_points);
  std::vector<lti::Complex> ideal;
  ideal.reserve(grid.size());
  for (double f : grid) {
    const lti::Complex lg = l.eval_hz(f) * g.eval_hz(f);
    const lti::Complex denom = p.eval_hz(f) * (1.0 - t * lg);
    if (std::abs(denom) == 0.0) throw SingularDesign(fmt::format("ideal controller is singular at {} Hz", f));
    ideal.push_back(t / denom);
  }

  lti::FitOptions opt;
  opt.grid_points = target.fit_points;
  opt.restarts = target.restarts;
  opt.seed = target.seed;
  opt.region = lti::PoleRegion::NonNegativeReal;
  const double hi = target.band_hi_hz;
  const double w_out = target.out_of_band_weight;
  opt.weight = [hi, w_out](double f) { return f <= hi * (1.0 + 1e-12) ? 1.0 : w_out; };
  const lti::FitResult fit = lti::discretize_fit(lti::FrequencyResponse(grid, ideal), target.order, target.fs,
                                                 {target.band_lo_hz, target.fit_upper_hz}, opt);

  Design out{fit.filter.scaled(1.0 / target.backoff), {}};
  DesignReport& rep = out.report;
  rep.fit_residual = fit.residual;
  rep.fit_rms_mag_db = fit.rms_mag_db;
  rep.fit_rms_phase_deg = fit.rms_phase_deg;
  rep.equivalent_p = target.p_design * target.backoff;
  rep.controller_stable = lti::is_stable(out.controller);

  const lti::RationalTF shape = p * lti::RationalTF::gain(1.0 / target.p_design);
  const lti::DiscreteFilter lg_zoh = zoh_equivalent(shape * l * g, target.fs);
  const double nyquist = target.fs / 2.0 * (1.0 - 1e-9);
  for (double pv : {target.p_min, target.p_design, target.p_max}) {
    const lti::RationalTF pp = shape * lti::RationalTF::gain(pv);
    BandwidthPrediction bp;
    bp.p = pv;
    bp.emulated_hz = bandwidth_3db(
        [&](double f) { return emulated_response(out.controller, pp, l, g, f); }, target.band_lo_hz, nyquist);
    bp.sampled_hz = bandwidth_3db(
        [&](double f) { return sampled_response(out.controller, pv, lg_zoh, target.latency_samples, f); },
        target.band_lo_hz, nyquist);
    rep.bandwidth.push_back(bp);
  }
  rep.loop_stable = true;
  for (double pv : p_grid(target)) {
    const double r = max_pole_radius(closed_loop_poles(out.controller, pv, lg_zoh, target.latency_samples));
    rep.stability.push_back({pv, r, r < 1.0});
    rep.loop_stable = rep.loop_stable && r < 1.0;
  }
  if (!rep.controller_stable || !rep.loop_stable) {
    throw DesignRejected("designed controller is unstable over the declared P range",
                         to_json(rep).dump(2));
  }
  return out;
}

MitigatorStep mitigator_step(const MitigatorState& ms, plant::ContactState contact, double f_m) {
  MitigatorStep out{ms, Action::ForceNeutral};
  MitigatorState& s = out.state;
  if (contact != plant::ContactState::FullSlip) {
    s.mode = MitigatorMode::Neutral;
    s.n = 0;
    s.f_star = 0.0;
    return out;
  }
  if (s.mode == MitigatorMode::Neutral) {
    s.mode = MitigatorMode::Sampling;
    s.n = 0;
    s.f_star = 0.0;
  }
  if (s.mode == MitigatorMode::Sampling) {
    if (s.n < s.window) {
      s.f_star += f_m / static_cast<double>(s.window);
      ++s.n;
      return out;
    }
    s.mode = MitigatorMode::Controlling;
  }
  out.action = Action::Track;
  return out;
}

Controller::Controller(const lti::DiscreteFilter& c, std::size_t window) : runner_(c), fs_(c.fs()) {
  if (window == 0) throw InvalidParameter("mitigator window must be positive");
  ms_.window = window;
}

ControlOutput Controller::step(double f_r, double f_m, plant::ContactState contact, int direction) {
  ControlOutput out;
  if (!std::isfinite(f_r) || !std::isfinite(f_m)) {
    out.fault = true;
    return out;
  }
  const MitigatorStep m = mitigator_step(ms_, contact, f_m);
  ms_ = m.state;
  out.action = m.action;
  if (m.action == Action::ForceNeutral) return out;
  out.error = f_r - static_cast<double>(direction) * (f_m - ms_.f_star);
  const double c = runner_.step(out.error);
  out.u_ma = std::clamp(kNeutralCurrentMa + c, kMinCurrentMa, kMaxCurrentMa);
  return out;
}

}  // namespace frictrl::control
