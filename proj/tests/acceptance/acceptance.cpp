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

// Acceptance checks against the simulated plant. Prints one PASS/FAIL line
// per criterion and exits nonzero if any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstring>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "frictrl/analysis.hpp"
#include "frictrl/controller.hpp"
#include "frictrl/error.hpp"
#include "frictrl/experiment.hpp"
#include "frictrl/lti.hpp"
#include "frictrl/plant.hpp"
#include "frictrl/signals.hpp"
#include "frictrl/spectral.hpp"
#include "frictrl/sysid.hpp"

using namespace frictrl;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

const lti::DiscreteFilter& default_controller() {
  static const lti::DiscreteFilter c = experiment::resolve_controller(experiment::ExperimentConfig{}).filter;
  return c;
}

// Stable random T with unit DC gain and optional left-half-plane zero.
lti::RationalTF random_target(std::mt19937_64& rng) {
  lti::RationalTF t = lti::make_second_order(1.0, log_uniform(rng, 100.0, 3000.0), uniform(rng, 0.3, 1.5));
  if (uniform(rng, 0.0, 1.0) < 0.5) {
    const double wz = 2.0 * kPi * log_uniform(rng, 500.0, 10000.0);
    t = t * lti::RationalTF({1.0 / wz, 1.0}, {1.0});
    t = t * lti::make_second_order(1.0, log_uniform(rng, 3000.0, 20000.0), uniform(rng, 0.4, 1.0));
  }
  return t;
}

Outcome algebraic_identity() {
  std::mt19937_64 rng(20260101);
  const auto hz = lti::logspace_hz(1.0, 20000.0, 200);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const lti::RationalTF t = random_target(rng);
    const lti::RationalTF l = lti::make_second_order(1.0, log_uniform(rng, 2000.0, 20000.0), uniform(rng, 0.4, 1.0));
    const lti::RationalTF g = lti::make_second_order(1.0, log_uniform(rng, 1000.0, 10000.0), uniform(rng, 0.1, 1.0));
    const lti::RationalTF p = lti::RationalTF::gain(log_uniform(rng, 0.01, 0.14));
    const lti::RationalTF c = control::synthesize_ideal(t, p, l, g);
    const lti::RationalTF back = control::closed_loop_T(c, p, l, g);
    for (double f : hz) {
      const auto want = t.eval_hz(f);
      worst = std::max(worst, std::abs(back.eval_hz(f) - want) / std::abs(want));
    }
  }
  return {worst <= 1e-9, fmt::format("max relative error {:.2e} over 100 x 200 points", worst)};
}

Outcome design_bandwidth() {
  const experiment::ExperimentConfig cfg;
  const auto rc = experiment::resolve_controller(cfg);
  double bw = 0.0;
  double sampled = 0.0;
  for (const auto& b : rc.report->bandwidth) {
    if (std::abs(b.p - cfg.design.p_design) < 1e-12) {
      bw = b.emulated_hz;
      sampled = b.sampled_hz;
    }
  }
  return {bw >= 800.0 && bw <= 1200.0,
          fmt::format("-3 dB at {:.0f} Hz for P = 0.06 N/mA (sampled-loop estimate {:.0f} Hz)", bw, sampled)};
}

Outcome robust_stability() {
  const experiment::ExperimentConfig base;
  const auto rc = experiment::resolve_controller(base);
  double worst_radius = 0.0;
  bool poles_ok = rc.report->stability.size() == 20;
  for (const auto& s : rc.report->stability) {
    worst_radius = std::max(worst_radius, s.max_pole_radius);
    poles_ok = poles_ok && s.stable;
  }
  bool sims_ok = true;
  double worst_tail = 0.0;
  double worst_mean = 0.0;
  std::uint64_t seed = 11;
  for (double p : control::p_grid(base.design)) {
    for (bool noisy : {false, true}) {
      plant::PlantConfig pc;
      pc.kinematics = plant::Kinematics::ConstantVelocity;
      pc.p_min = pc.p_nominal = pc.p_max = p;
      pc.direction_asymmetry = 0.0;
      pc.gain_drift_sigma = 0.0;
      pc.normal_load.amplitude_n = 0.0;
      pc.normal_load.steps = {{3.0, 0.01}, {6.0, -0.02}, {8.0, 0.01}};
      if (!noisy) pc.noise_anchor_10hz = pc.noise_anchor_1khz = 0.0;
      const Signal ref(std::vector<double>(100000, 0.0), pc.control_fs);
      const auto sim = experiment::simulate(pc, rc.filter, ref, experiment::LoopMode::ClosedLoop, seed++);
      const auto& log = sim.log;
      bool bounded = sim.plant_fault.empty() && log.faults == 0;
      double tail = 0.0;
      double mean = 0.0;
      for (std::size_t k = 0; k < log.f_m.size(); ++k) {
        bounded = bounded && std::abs(log.f_m[k]) < 1.0;
        if (k >= 90000) {
          tail = std::max(tail, std::abs(log.error[k]));
          mean += log.error[k] / 10000.0;
        }
      }
      worst_mean = std::max(worst_mean, std::abs(mean));
      bounded = bounded && std::abs(mean) < 1e-3;
      if (!noisy) {
        worst_tail = std::max(worst_tail, tail);
        bounded = bounded && tail < 1e-3;
      }
      sims_ok = sims_ok && bounded;
    }
  }
  return {poles_ok && sims_ok,
          fmt::format("max pole radius {:.5f} over 20 P values; {} step-disturbed runs bounded; final second: "
                      "noise-free |e| <= {:.2e} N, |mean e| <= {:.2e} N",
                      worst_radius, sims_ok ? "all 40" : "NOT all", worst_tail, worst_mean)};
}

Outcome sensitivity_sweep() {
  experiment::ExperimentConfig cfg;
  cfg.seed = 404;
  const auto cells = experiment::sweep_cells(cfg, default_controller());
  bool ok = cells.size() == 80;
  double worst_ratio = 0.0;
  double worst_delay = 0.0;
  for (const auto& c : cells) {
    ok = ok && c.swipes >= 3;
    if (c.f_ref_hz <= 250.0) {
      worst_ratio = std::max(worst_ratio, std::abs(c.magnitude_ratio - 1.0));
    }
    if (c.f_ref_hz <= 100.0) worst_delay = std::max(worst_delay, c.delay_ms);
  }
  ok = ok && worst_ratio <= 0.2 && worst_delay < 1.0;
  return {ok, fmt::format("{} cells; max |ratio - 1| {:.3f} up to 250 Hz; max delay {:.3f} ms up to 100 Hz",
                          cells.size(), worst_ratio, worst_delay)};
}

Outcome texture_tracking() {
  experiment::ExperimentConfig cfg;
  bool ok = true;
  std::string detail;
  for (const auto& prof : signals::texture_profiles()) {
    cfg.reference.texture = prof.label;
    const std::uint64_t seed = 1000 + detail.size();
    const Signal ref = experiment::make_reference(cfg.reference, 20.0, cfg.plant.control_fs, seed);
    double r2[2];
    double lag = 0.0;
    for (int m = 0; m < 2; ++m) {
      const auto mode = m == 0 ? experiment::LoopMode::ClosedLoop : experiment::LoopMode::OpenLoop;
      const auto sim = experiment::simulate(cfg.plant, default_controller(), ref, mode, seed);
      const auto rep = experiment::analyze_trace(sim.trace, cfg.tracking);
      r2[m] = rep.r2;
      if (m == 0) lag = rep.lag_s;
    }
    ok = ok && r2[0] >= 0.9 && r2[0] > r2[1] && std::abs(lag) <= 1e-3;
    detail += fmt::format("{} {:.3f}/{:.3f} {:.2f}ms; ", prof.label, r2[0], r2[1], lag * 1e3);
  }
  return {ok, "closed/open R^2, lag: " + detail.substr(0, detail.size() - 2)};
}

Outcome dc_mitigation() {
  experiment::ExperimentConfig cfg;
  const double baseline = cfg.plant.mu * cfg.plant.normal_load.mean_n;
  const Signal ref(std::vector<double>(100000, 0.0), cfg.plant.control_fs);
  const auto sim =
      experiment::simulate(cfg.plant, default_controller(), ref, experiment::LoopMode::ClosedLoop, 606);
  const auto& log = sim.log;
  const std::size_t per = cfg.plant.substeps_per_control() / cfg.plant.substeps_per_trace();
  const auto full = static_cast<int>(plant::ContactState::FullSlip);
  bool neutral_ok = true;
  std::size_t neutral_steps = 0;
  std::size_t slip_run = 0;
  double worst_window = 0.0;
  double worst_rest = 0.0;
  std::size_t onsets = 0;
  for (std::size_t k = 0; k < log.u_ma.size(); ++k) {
    slip_run = log.contact[k] == full ? slip_run + 1 : 0;
    if (slip_run <= cfg.mitigator_window) {
      ++neutral_steps;
      neutral_ok = neutral_ok && log.u_ma[k] == control::kNeutralCurrentMa;
      for (std::size_t j = k * per; j < (k + 1) * per && j < sim.trace.size(); ++j) {
        neutral_ok = neutral_ok && sim.trace.u_ma[j] == control::kNeutralCurrentMa;
      }
    }
    if (slip_run == 1) {
      std::size_t end = k;
      while (end < log.contact.size() && log.contact[end] == full) ++end;
      if (end == log.contact.size()) continue;
      ++onsets;
      auto mean = [&](std::size_t a, std::size_t b) {
        double s = 0.0;
        for (std::size_t i = a; i < b; ++i) s += log.error[i];
        return s / static_cast<double>(b - a);
      };
      worst_window = std::max(worst_window, std::abs(mean(k + 100, k + 200)));
      worst_rest = std::max(worst_rest, std::abs(mean(k + 200, end)));
    }
  }
  const double limit = 0.05 * baseline;
  const bool ok = neutral_ok && onsets >= 5 && worst_window < limit && worst_rest < limit;
  return {ok, fmt::format("{} swipes; |DC| {:.2e} N in 10-20 ms and {:.2e} N after (limit {:.4f} N); u = 2.5 mA "
                          "exactly on {} neutral steps: {}",
                          onsets, worst_window, worst_rest, limit, neutral_steps, neutral_ok ? "yes" : "no")};
}

Outcome identification() {
  std::mt19937_64 rng(77);
  // Second-order fit from clean in-band data.
  double worst_fit = 0.0;
  const auto hz = lti::logspace_hz(10.0, 1000.0, 120);
  std::vector<std::array<double, 3>> truths = {{1.0, 4400.0, 0.6}, {1.0, 5300.0, 0.707}};
  for (int i = 0; i < 20; ++i) {
    truths.push_back({log_uniform(rng, 0.1, 10.0), log_uniform(rng, 50.0, 2000.0), uniform(rng, 0.05, 1.2)});
  }
  for (const auto& [k, fn, z] : truths) {
    const auto resp = lti::freq_response(lti::make_second_order(k, fn, z), hz);
    const auto fit = sysid::fit_second_order(resp, {10.0, 1000.0});
    worst_fit = std::max({worst_fit, std::abs(fit.gain / k - 1.0), std::abs(fit.fn_hz / fn - 1.0),
                          std::abs(fit.zeta / z - 1.0)});
  }

  // Actuation gain from 20 sine-drive trials, balanced over directions.
  std::vector<sysid::GainTrial> trials;
  const auto freqs = signals::sweep_frequencies(10, 20.0, 200.0);
  for (int i = 0; i < 20; ++i) {
    plant::PlantConfig pc;
    pc.kinematics = plant::Kinematics::ConstantVelocity;
    pc.velocity_m_s = i % 2 == 0 ? 0.05 : -0.05;
    pc.gain_drift_sigma = 0.0;
    const double f = freqs[static_cast<std::size_t>(i / 2)];
    plant::Plant pl(pc, 900 + static_cast<std::uint64_t>(i));
    const std::size_t skip = 1000;
    const std::size_t n = 10000;
    std::vector<double> drive;
    std::vector<double> force;
    for (std::size_t k = 0; k < skip + n; ++k) {
      const double u = control::kNeutralCurrentMa + std::sin(2.0 * kPi * f * static_cast<double>(k) / pc.control_fs);
      const auto r = pl.step(u);
      if (k >= skip) {
        drive.push_back(pl.quantize_dac(u));
        force.push_back(r.f_m);
      }
    }
    trials.push_back({Signal(drive, pc.control_fs, Unit::MilliAmp), Signal(force, pc.control_fs, Unit::Newton), f,
                      i % 2 == 0 ? Direction::Right : Direction::Left});
  }
  const auto est = sysid::estimate_gain(trials);
  const double gain_err = std::abs(est.mean / 0.06 - 1.0);

  // Impulse averaging with amplitude spread across records.
  const double fs = 20000.0;
  const double wn = 2.0 * kPi * 300.0;
  const double zeta = 0.15;
  const double wd = wn * std::sqrt(1.0 - zeta * zeta);
  std::vector<Signal> records;
  std::vector<double> amps;
  std::normal_distribution<double> noise(0.0, 1e-4);
  for (int r = 0; r < 10; ++r) {
    const double a = r == 0 ? 1.0 : uniform(rng, 0.8, 1.25);
    const auto delay = static_cast<std::size_t>(uniform(rng, 1000.0, 1500.0));
    std::vector<double> x(16000);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = noise(rng);
      if (i >= delay) {
        const double t = static_cast<double>(i - delay) / fs;
        x[i] += a * wn / std::sqrt(1.0 - zeta * zeta) * std::exp(-zeta * wn * t) * std::sin(wd * t);
      }
    }
    amps.push_back(a);
    records.emplace_back(std::move(x), fs);
  }
  const auto avg = sysid::average_impulse_spectra(records);
  double worst_shift = 0.0;
  double shift_err = 0.0;
  for (std::size_t r = 0; r < avg.shifts_db.size(); ++r) {
    worst_shift = std::max(worst_shift, std::abs(avg.shifts_db[r]));
    shift_err = std::max(shift_err, std::abs(avg.shifts_db[r] - 20.0 * std::log10(amps[r] / amps[0])));
  }
  const bool ok = worst_fit <= 0.01 && gain_err <= 0.02 && worst_shift <= 3.0 && avg.warnings.empty() &&
                  shift_err < 0.1;
  return {ok, fmt::format("fit max rel err {:.2e}; P = {:.5f} N/mA ({:.2f}% off); impulse shifts <= {:.2f} dB, "
                          "{} warnings",
                          worst_fit, est.mean, gain_err * 100.0, worst_shift, avg.warnings.size())};
}

Outcome noise_fidelity() {
  plant::PlantConfig pc;
  pc.kinematics = plant::Kinematics::ConstantVelocity;
  pc.gain_drift_sigma = 0.0;
  pc.normal_load.amplitude_n = 0.0;
  const Signal ref(std::vector<double>(600000, 0.0), pc.control_fs);
  const auto sim =
      experiment::simulate(pc, default_controller(), ref, experiment::LoopMode::OpenLoop, 808);
  const Signal f = sim.trace.column("f_m");
  const auto asd = spectral::welch_asd(f.slice(static_cast<std::size_t>(f.fs()), f.size()));
  const double a10 = spectral::band_asd(asd, 9.0, 11.0);
  const double a1k = spectral::band_asd(asd, 950.0, 1050.0);
  const bool ok = std::abs(a10 / pc.noise_anchor_10hz - 1.0) <= 0.5 && std::abs(a1k / pc.noise_anchor_1khz - 1.0) <= 0.5;
  return {ok, fmt::format("ASD {:.3e} N/sqrt(Hz) at 10 Hz, {:.3e} N/sqrt(Hz) at 1 kHz over 60 s", a10, a1k)};
}

Outcome property_suites() {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double fs = 10000.0;
  int lock_fail = 0;
  int zero_phase_fail = 0;
  int align_fail = 0;
  int determinism_fail = 0;

  for (int c = 0; c < 100; ++c) {
    // Lock-in is linear in the signal and covariant with time shifts.
    const double f = log_uniform(rng, 20.0, 1000.0);
    const double a1 = uniform(rng, 0.001, 0.1);
    const double a2 = uniform(rng, 0.001, 0.1);
    const double ph1 = uniform(rng, -kPi, kPi);
    const double ph2 = uniform(rng, -kPi, kPi);
    const double alpha = uniform(rng, -3.0, 3.0);
    const double beta = uniform(rng, -3.0, 3.0);
    const double tau = uniform(rng, 0.0, 0.5 / f);
    const std::size_t n = 10000;
    std::vector<double> x(n), y(n), z(n), xd(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / fs;
      x[i] = a1 * std::sin(2.0 * kPi * f * t + ph1);
      y[i] = a2 * std::sin(2.0 * kPi * f * t + ph2);
      z[i] = alpha * x[i] + beta * y[i];
      xd[i] = a1 * std::sin(2.0 * kPi * f * (t - tau) + ph1);
    }
    auto phasor = [&](const std::vector<double>& v) {
      const auto r = sysid::lock_in(Signal(v, fs), f);
      return std::polar(r.amplitude, r.phase_deg * kPi / 180.0);
    };
    const auto px = phasor(x);
    const auto lin_err = std::abs(phasor(z) - (alpha * px + beta * phasor(y)));
    const auto cov_err = std::abs(phasor(xd) - px * std::polar(1.0, -2.0 * kPi * f * tau));
    if (lin_err > 1e-9 * (1.0 + std::abs(px)) || cov_err > 1e-9) ++lock_fail;

    // Zero-phase band-pass: in-band components keep their phase and the
    // output correlates best with the input at lag zero.
    std::vector<double> ms(n, 0.0);
    std::vector<double> comps;
    for (int k = 0; k < 3; ++k) {
      const double fk = log_uniform(rng, 40.0, 400.0);
      const double pk = uniform(rng, -kPi, kPi);
      comps.push_back(fk);
      for (std::size_t i = 0; i < n; ++i) ms[i] += std::sin(2.0 * kPi * fk * static_cast<double>(i) / fs + pk);
    }
    const Signal msig(ms, fs);
    const Signal bp = analysis::bandpass_zero_phase(msig, 10.0, 1000.0);
    const auto al = analysis::align_by_xcorr(msig, bp, 0.002);
    const auto mid_in = sysid::lock_in(msig.slice(2000, 8000), comps[0]);
    const auto mid_out = sysid::lock_in(bp.slice(2000, 8000), comps[0]);
    double dphi = std::abs(mid_out.phase_deg - mid_in.phase_deg);
    dphi = std::min(dphi, 360.0 - dphi);
    if (al.lag_samples != 0 || dphi > 0.5) ++zero_phase_fail;

    // Cross-correlation alignment recovers integer shifts exactly.
    std::vector<double> w(4000);
    for (double& v : w) v = normal(rng);
    const Signal ws(w, fs);
    const Signal wb = analysis::bandpass_zero_phase(ws, 10.0, 1000.0);
    const long k = std::uniform_int_distribution<long>(-20, 20)(rng);
    std::vector<double> shifted(wb.size());
    for (std::size_t i = 0; i < wb.size(); ++i) {
      const long j = std::clamp<long>(static_cast<long>(i) - k, 0, static_cast<long>(wb.size()) - 1);
      shifted[i] = wb[static_cast<std::size_t>(j)];
    }
    if (analysis::align_by_xcorr(wb, Signal(shifted, fs), 0.002).lag_samples != k) ++align_fail;

    // Same seed, same bytes.
    const auto seed = rng();
    experiment::ExperimentConfig cfg;
    cfg.reference.texture = signals::texture_profiles()[static_cast<std::size_t>(c) % 6].label;
    auto run = [&]() {
      const Signal ref = experiment::make_reference(cfg.reference, 0.3, cfg.plant.control_fs, seed);
      return experiment::simulate(cfg.plant, default_controller(), ref, experiment::LoopMode::ClosedLoop, seed);
    };
    const auto r1 = run();
    const auto r2 = run();
    auto same = [](const std::vector<double>& a, const std::vector<double>& b) {
      return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](double p, double q) {
               return std::memcmp(&p, &q, sizeof p) == 0;
             });
    };
    if (!same(r1.trace.f_m, r2.trace.f_m) || !same(r1.trace.f_f, r2.trace.f_f) || !same(r1.trace.u_ma, r2.trace.u_ma) ||
        !same(r1.trace.f_r, r2.trace.f_r) || r1.trace.contact != r2.trace.contact) {
      ++determinism_fail;
    }
  }

  // File-level reruns.
  const auto root = std::filesystem::temp_directory_path() / "frictrl_acceptance";
  std::filesystem::remove_all(root);
  int file_fail = 0;
  for (int c = 0; c < 3; ++c) {
    experiment::ExperimentConfig cfg;
    cfg.seed = 5000 + static_cast<std::uint64_t>(c);
    cfg.duration_s = 3.0;
    cfg.reference.texture = "SW";
    cfg.outputs.format = c == 2 ? io::TraceFormat::Binary : io::TraceFormat::Csv;
    std::vector<std::string> contents[2];
    for (int rep = 0; rep < 2; ++rep) {
      cfg.outputs.dir = root / fmt::format("case{}_{}", c, rep);
      experiment::run_experiment(cfg);
      for (const char* name : {"trace.csv", "trace.bin", "tracking_report.json", "controller.json",
                               "design_report.json"}) {
        std::ifstream in(cfg.outputs.dir / name, std::ios::binary);
        contents[rep].emplace_back(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
      }
    }
    if (contents[0] != contents[1]) ++file_fail;
  }
  std::filesystem::remove_all(root);

  const bool ok = lock_fail == 0 && zero_phase_fail == 0 && align_fail == 0 && determinism_fail == 0 && file_fail == 0;
  return {ok, fmt::format("failures out of 100: lock-in {}, zero-phase {}, xcorr lag {}, determinism {}; "
                          "file reruns {}/3 differ",
                          lock_fail, zero_phase_fail, align_fail, determinism_fail, file_fail)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"algebraic identity", algebraic_identity},
      {"controller design bandwidth", design_bandwidth},
      {"robust stability", robust_stability},
      {"sensitivity sweep", sensitivity_sweep},
      {"texture tracking", texture_tracking},
      {"DC mitigation", dc_mitigation},
      {"identification roundtrips", identification},
      {"noise model fidelity", noise_fidelity},
      {"property suites", property_suites},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, fmt::format("threw: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!out.pass) ++failed;
    fmt::print("{} {} {}: {} ({:.1f} s)\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, out.detail, secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
