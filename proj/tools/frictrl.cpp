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

#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "frictrl/analysis.hpp"
#include "frictrl/error.hpp"
#include "frictrl/experiment.hpp"
#include "frictrl/json_io.hpp"
#include "frictrl/sysid.hpp"
#include "frictrl/trace.hpp"

namespace fs = std::filesystem;
using namespace frictrl;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string mode;
  std::string out;
  std::string fidelity;
  std::optional<double> duration;
  std::string reference;
  std::string texture;
  std::optional<double> freq;
  std::optional<double> amplitude;
  std::string format;
};

void add_common(CLI::App* app, Common& c, bool seed_required) {
  app->add_option("--config", c.config, "experiment config JSON")->check(CLI::ExistingFile);
  auto* seed = app->add_option("--seed", c.seed, "random seed");
  if (seed_required) seed->required();
  app->add_option("--mode", c.mode, "loop mode")->check(CLI::IsMember({"closed", "open"}));
  app->add_option("--out", c.out, "output directory");
  app->add_option("--fidelity", c.fidelity, "plant fidelity")->check(CLI::IsMember({"envelope", "carrier"}));
  app->add_option("--duration", c.duration, "run length in seconds");
  app->add_option("--reference", c.reference, "reference kind")
      ->check(CLI::IsMember({"zero", "square", "sine", "texture", "file"}));
  app->add_option("--texture", c.texture, "texture label or reference file path");
  app->add_option("--freq", c.freq, "square or sine frequency in Hz");
  app->add_option("--amplitude", c.amplitude, "square or sine amplitude in N");
  app->add_option("--format", c.format, "trace format")->check(CLI::IsMember({"csv", "binary"}));
}

experiment::ExperimentConfig load_config(const Common& c) {
  experiment::ExperimentConfig cfg;
  if (!c.config.empty()) cfg = experiment::experiment_config_from_json(read_json_file(c.config));
  Json over = Json::object();
  if (c.seed) over["seed"] = *c.seed;
  if (!c.mode.empty()) over["mode"] = c.mode;
  if (!c.out.empty()) over["outputs"]["dir"] = c.out;
  if (!c.format.empty()) over["outputs"]["format"] = c.format;
  if (!c.fidelity.empty()) over["plant"]["fidelity"] = c.fidelity;
  if (c.duration) over["duration_s"] = *c.duration;
  if (!c.reference.empty()) over["reference"]["kind"] = c.reference;
  if (!c.texture.empty()) {
    if (c.reference == "file") {
      over["reference"]["path"] = c.texture;
    } else {
      over["reference"]["texture"] = c.texture;
    }
  }
  if (c.freq) over["reference"]["freq_hz"] = *c.freq;
  if (c.amplitude) over["reference"]["amplitude_n"] = *c.amplitude;
  return experiment::experiment_config_from_json(over, cfg);
}

int cmd_design(const Common& c) {
  experiment::ExperimentConfig cfg = load_config(c);
  cfg.controller.reset();
  const fs::path dir = c.out.empty() ? fs::path("design") : fs::path(c.out);
  fs::create_directories(dir);
  try {
    const auto rc = experiment::resolve_controller(cfg);
    write_json_file(dir / "controller.json", Json{{"schema_version", kSchemaVersion}, {"filter", to_json(rc.filter)}});
    write_json_file(dir / "design_report.json", to_json(*rc.report));
    fmt::print("controller: b = [{}], a = [{}], fs = {} Hz\n", fmt::join(rc.filter.b(), ", "),
               fmt::join(rc.filter.a(), ", "), rc.filter.fs());
    for (const auto& b : rc.report->bandwidth) {
      fmt::print("P = {:.3f} N/mA: -3 dB at {:.0f} Hz (emulated), {:.0f} Hz (sampled)\n", b.p, b.emulated_hz,
                 b.sampled_hz);
    }
    fmt::print("loop stable over P grid: {}\n", rc.report->loop_stable ? "yes" : "no");
  } catch (const DesignRejected& e) {
    std::ofstream(dir / "design_report.json") << e.report() << '\n';
    throw;
  }
  return 0;
}

int cmd_run(const Common& c) {
  const auto cfg = load_config(c);
  const auto rec = experiment::run_experiment(cfg);
  fmt::print("wrote {}\n", rec.dir.string());
  if (rec.tracking) {
    fmt::print("R^2 = {:.4f}, lag = {:.3f} ms, swipes = {}\n", rec.tracking->r2, rec.tracking->lag_s * 1e3,
               rec.tracking->swipes);
  }
  return 0;
}

int cmd_sweep(const Common& c) {
  const auto cfg = load_config(c);
  const auto rec = experiment::run_sweep(cfg);
  for (const auto& cell : rec.cells) {
    fmt::print("{:8.1f} Hz {:5.3f} N  ratio {:.3f}  phase {:7.2f} deg  delay {:.3f} ms  swipes {}{}\n", cell.f_ref_hz,
               cell.amplitude_n, cell.magnitude_ratio, cell.phase_deg, cell.delay_ms, cell.swipes,
               cell.warning.empty() ? "" : "  " + cell.warning);
  }
  fmt::print("wrote {}\n", rec.dir.string());
  return 0;
}

struct AnalyzeArgs {
  std::string trace;
  std::string config;
  std::string out;
  std::optional<double> sine_hz;
  std::optional<double> amplitude;
};

int cmd_analyze(const AnalyzeArgs& a) {
  experiment::ExperimentConfig cfg;
  if (!a.config.empty()) cfg = experiment::experiment_config_from_json(read_json_file(a.config));
  const io::Trace tr = io::read_trace(a.trace);
  const fs::path out = a.out.empty() ? fs::path(a.trace).parent_path() : fs::path(a.out);
  if (!out.empty()) fs::create_directories(out);
  if (a.sine_hz) {
    const analysis::SensitivityRun run{*a.sine_hz, a.amplitude.value_or(0.0), tr.column("f_r"), tr.column("f_m")};
    const auto cells = analysis::empirical_sensitivity(std::span(&run, 1), cfg.sweep.options);
    write_json_file(out / "sensitivity.json", to_json(cells));
    experiment::write_sensitivity_csv(out / "sensitivity.csv", cells);
    for (const auto& cell : cells) {
      fmt::print("ratio {:.4f}, phase {:.2f} deg, delay {:.3f} ms, swipes {}\n", cell.magnitude_ratio, cell.phase_deg,
                 cell.delay_ms, cell.swipes);
    }
    return 0;
  }
  const auto rep = experiment::analyze_trace(tr, cfg.tracking);
  write_json_file(out / "tracking_report.json", to_json(rep));
  fmt::print("R^2 = {:.4f}, lag = {:.3f} ms, swipes = {}\n", rep.r2, rep.lag_s * 1e3, rep.swipes);
  return 0;
}

struct CharacterizeArgs {
  std::vector<std::string> inputs;
  std::string out = "characterize";
  double band_lo = 10.0;
  double band_hi = 1000.0;
  double freq = 0.0;
};

int cmd_impulse(const CharacterizeArgs& a) {
  std::vector<Signal> records;
  for (const auto& p : a.inputs) records.push_back(io::read_signal(p));
  sysid::ImpulseOptions opt;
  opt.band_lo_hz = a.band_lo;
  opt.band_hi_hz = a.band_hi;
  const auto avg = sysid::average_impulse_spectra(records, opt);
  const auto fit = sysid::fit_second_order(avg.response, {a.band_lo, a.band_hi});
  fs::create_directories(a.out);
  write_json_file(fs::path(a.out) / "impulse_average.json", to_json(avg));
  write_json_file(fs::path(a.out) / "second_order_fit.json", to_json(fit));
  for (const auto& w : avg.warnings) fmt::print(stderr, "warning: {}\n", w);
  fmt::print("gain {:.6g}, fn {:.1f} Hz, zeta {:.4f}{}\n", fit.gain, fit.fn_hz, fit.zeta,
             fit.low_confidence ? " (low confidence)" : "");
  return 0;
}

int cmd_gain(const CharacterizeArgs& a) {
  if (!(a.freq > 0.0)) throw InvalidParameter("--freq is required for gain characterization");
  std::vector<sysid::GainTrial> trials;
  for (const auto& p : a.inputs) {
    const io::Trace tr = io::read_trace(p);
    const Signal f = tr.column("f_m");
    double mean = 0.0;
    for (double v : f.samples()) mean += v;
    trials.push_back({tr.column("u"), f, a.freq, mean >= 0.0 ? Direction::Right : Direction::Left});
  }
  const auto est = sysid::estimate_gain(trials);
  fs::create_directories(a.out);
  write_json_file(fs::path(a.out) / "gain_estimate.json", to_json(est));
  fmt::print("P = {:.5f} N/mA (min {:.5f}, max {:.5f}) over {} trials\n", est.mean, est.min, est.max,
             est.per_trial.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop friction control simulator"};
  app.require_subcommand(1);

  Common design_opts;
  Common run_opts;
  Common sweep_opts;
  auto* design = app.add_subcommand("design", "synthesize the controller and report predicted performance");
  add_common(design, design_opts, false);
  auto* run = app.add_subcommand("run", "simulate one experiment");
  add_common(run, run_opts, true);
  auto* sweep = app.add_subcommand("sweep", "simulate the sine sensitivity grid");
  add_common(sweep, sweep_opts, true);

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "tracking or sensitivity analysis of a stored trace");
  analyze->add_option("trace", analyze_args.trace, "trace file")->required()->check(CLI::ExistingFile);
  analyze->add_option("--config", analyze_args.config, "config snapshot for analysis options")
      ->check(CLI::ExistingFile);
  analyze->add_option("--out", analyze_args.out, "output directory");
  analyze->add_option("--sine-hz", analyze_args.sine_hz, "analyze as a sine sensitivity run at this frequency");
  analyze->add_option("--amplitude", analyze_args.amplitude, "sine amplitude in N, for labeling");

  CharacterizeArgs impulse_args;
  CharacterizeArgs gain_args;
  auto* characterize = app.add_subcommand("characterize", "system identification on recorded signals");
  characterize->require_subcommand(1);
  auto* impulse = characterize->add_subcommand("impulse", "average impulse spectra and fit a second-order model");
  impulse->add_option("inputs", impulse_args.inputs, "impulse records (CSV or signal JSON)")->required();
  impulse->add_option("--out", impulse_args.out, "output directory");
  impulse->add_option("--band", [&](const CLI::results_t& r) {
    impulse_args.band_lo = std::stod(r.at(0));
    impulse_args.band_hi = std::stod(r.at(1));
    return true;
  }, "fit band in Hz")->expected(2);
  auto* gain = characterize->add_subcommand("gain", "estimate actuation gain from sine-drive traces");
  gain->add_option("inputs", gain_args.inputs, "trace files")->required();
  gain->add_option("--freq", gain_args.freq, "drive frequency in Hz")->required();
  gain->add_option("--out", gain_args.out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*design) return cmd_design(design_opts);
    if (*run) return cmd_run(run_opts);
    if (*sweep) return cmd_sweep(sweep_opts);
    if (*analyze) return cmd_analyze(analyze_args);
    if (*impulse) return cmd_impulse(impulse_args);
    if (*gain) return cmd_gain(gain_args);
  } catch (const DesignRejected& e) {
    fmt::print(stderr, "error: {}\n{}\n", e.what(), e.report());
    return 3;
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
