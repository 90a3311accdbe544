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

#include "frictrl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <fstream>
#include <thread>

#include <fmt/format.h>

#include "frictrl/error.hpp"
#include "frictrl/signals.hpp"

namespace frictrl::experiment {

using frictrl::to_json;

namespace {

template <typename T>
void take(const Json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

const char* kind_name(ReferenceKind k) {
  switch (k) {
    case ReferenceKind::Zero:
      return "zero";
    case ReferenceKind::Square:
      return "square";
    case ReferenceKind::Sine:
      return "sine";
    case ReferenceKind::Texture:
      return "texture";
    case ReferenceKind::File:
      return "file";
  }
  return "zero";
}

ReferenceKind kind_from(const std::string& s) {
  if (s == "zero") return ReferenceKind::Zero;
  if (s == "square") return ReferenceKind::Square;
  if (s == "sine") return ReferenceKind::Sine;
  if (s == "texture") return ReferenceKind::Texture;
  if (s == "file") return ReferenceKind::File;
  throw ConfigError(fmt::format("unknown reference kind '{}'", s));
}

LoopMode mode_from(const std::string& s) {
  if (s == "closed") return LoopMode::ClosedLoop;
  if (s == "open") return LoopMode::OpenLoop;
  throw ConfigError(fmt::format("unknown loop mode '{}'", s));
}

io::TraceFormat format_from(const std::string& s) {
  if (s == "csv") return io::TraceFormat::Csv;
  if (s == "binary") return io::TraceFormat::Binary;
  throw ConfigError(fmt::format("unknown trace format '{}'", s));
}

Json tracking_options_json(const analysis::TrackingOptions& o) {
  return Json{{"band_lo_hz", o.band_lo_hz},
              {"band_hi_hz", o.band_hi_hz},
              {"max_lag_s", o.max_lag_s},
              {"segmentation_lowpass_hz", o.segmentation_lowpass_hz},
              {"debounce_s", o.segments.debounce_s}};
}

void tracking_options_from(const Json& j, analysis::TrackingOptions& o) {
  take(j, "band_lo_hz", o.band_lo_hz);
  take(j, "band_hi_hz", o.band_hi_hz);
  take(j, "max_lag_s", o.max_lag_s);
  take(j, "segmentation_lowpass_hz", o.segmentation_lowpass_hz);
  take(j, "debounce_s", o.segments.debounce_s);
}

std::filesystem::path trace_name(io::TraceFormat f) {
  return f == io::TraceFormat::Binary ? "trace.bin" : "trace.csv";
}

lti::RationalTF constant_tf(double p) { return lti::RationalTF({p}, {1.0}); }

ResolvedController resolve_or_report(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  try {
    return resolve_controller(cfg);
  } catch (const DesignRejected& e) {
    std::ofstream(dir / "design_report.json") << e.report() << '\n';
    throw;
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  plant.validate();
  design.validate();
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) throw ConfigError("duration must be positive");
  if (mitigator_window == 0) throw ConfigError("mitigator window must be positive");
  const double nyquist = 0.5 * plant.control_fs;
  if (std::abs(design.fs - plant.control_fs) > 1e-9 * plant.control_fs) {
    throw ConfigError(fmt::format("design rate {} differs from the control rate {}", design.fs, plant.control_fs));
  }
  if (controller && std::abs(controller->fs() - plant.control_fs) > 1e-9 * plant.control_fs) {
    throw ConfigError("explicit controller rate differs from the control rate");
  }
  if (reference.kind == ReferenceKind::Square || reference.kind == ReferenceKind::Sine) {
    if (!(reference.freq_hz > 0.0 && reference.freq_hz < nyquist)) {
      throw ConfigError(fmt::format("reference frequency must lie in (0, {}) Hz", nyquist));
    }
    if (!(reference.amplitude_n >= 0.0)) throw ConfigError("reference amplitude must be non-negative");
  }
  if (!(tracking.band_lo_hz > 0.0 && tracking.band_lo_hz < tracking.band_hi_hz && tracking.band_hi_hz < nyquist)) {
    throw ConfigError(fmt::format("tracking band must lie in (0, {}) Hz", nyquist));
  }
  if (!(sweep.duration_s > 0.0)) throw ConfigError("sweep duration must be positive");
  for (double f : sweep.frequencies_hz) {
    if (!(f > 0.0 && f < nyquist)) throw ConfigError(fmt::format("sweep frequency {} out of range", f));
  }
}

Json to_json(const ExperimentConfig& cfg) {
  Json j{{"schema_version", kSchemaVersion},
         {"plant", to_json(cfg.plant)},
         {"design", to_json(cfg.design)},
         {"reference",
          {{"kind", kind_name(cfg.reference.kind)},
           {"freq_hz", cfg.reference.freq_hz},
           {"amplitude_n", cfg.reference.amplitude_n},
           {"texture", cfg.reference.texture},
           {"path", cfg.reference.path.string()}}},
         {"duration_s", cfg.duration_s},
         {"seed", cfg.seed},
         {"mode", cfg.mode == LoopMode::ClosedLoop ? "closed" : "open"},
         {"mitigator_window", cfg.mitigator_window},
         {"tracking", tracking_options_json(cfg.tracking)},
         {"sweep",
          {{"frequencies_hz", cfg.sweep.frequencies_hz},
           {"amplitudes_n", cfg.sweep.amplitudes_n},
           {"duration_s", cfg.sweep.duration_s},
           {"band_lo_hz", cfg.sweep.options.band_lo_hz},
           {"band_hi_hz", cfg.sweep.options.band_hi_hz},
           {"min_swipes", cfg.sweep.options.min_swipes}}},
         {"outputs",
          {{"dir", cfg.outputs.dir.string()},
           {"format", cfg.outputs.format == io::TraceFormat::Binary ? "binary" : "csv"},
           {"write_trace", cfg.outputs.write_trace}}}};
  if (cfg.controller) j["controller"] = to_json(*cfg.controller);
  return j;
}

ExperimentConfig experiment_config_from_json(const Json& j, ExperimentConfig c) {
  try {
    if (j.contains("schema_version") && j.at("schema_version").get<int>() != kSchemaVersion) {
      throw ConfigError(fmt::format("unsupported schema version {}", j.at("schema_version").dump()));
    }
    if (j.contains("plant")) c.plant = plant_config_from_json(j.at("plant"), c.plant);
    if (j.contains("design")) c.design = design_target_from_json(j.at("design"), c.design);
    if (j.contains("controller")) c.controller = filter_from_json(j.at("controller"));
    if (j.contains("reference")) {
      const Json& r = j.at("reference");
      if (r.contains("kind")) c.reference.kind = kind_from(r.at("kind").get<std::string>());
      take(r, "freq_hz", c.reference.freq_hz);
      take(r, "amplitude_n", c.reference.amplitude_n);
      take(r, "texture", c.reference.texture);
      if (r.contains("path")) c.reference.path = r.at("path").get<std::string>();
    }
    take(j, "duration_s", c.duration_s);
    take(j, "seed", c.seed);
    if (j.contains("mode")) c.mode = mode_from(j.at("mode").get<std::string>());
    take(j, "mitigator_window", c.mitigator_window);
    if (j.contains("tracking")) tracking_options_from(j.at("tracking"), c.tracking);
    if (j.contains("sweep")) {
      const Json& s = j.at("sweep");
      take(s, "frequencies_hz", c.sweep.frequencies_hz);
      take(s, "amplitudes_n", c.sweep.amplitudes_n);
      take(s, "duration_s", c.sweep.duration_s);
      take(s, "threads", c.sweep.threads);
      take(s, "band_lo_hz", c.sweep.options.band_lo_hz);
      take(s, "band_hi_hz", c.sweep.options.band_hi_hz);
      take(s, "min_swipes", c.sweep.options.min_swipes);
    }
    if (j.contains("outputs")) {
      const Json& o = j.at("outputs");
      if (o.contains("dir")) c.outputs.dir = o.at("dir").get<std::string>();
      if (o.contains("format")) c.outputs.format = format_from(o.at("format").get<std::string>());
      take(o, "write_trace", c.outputs.write_trace);
    }
  } catch (const Json::exception& e) {
    throw ConfigError(fmt::format("malformed experiment config: {}", e.what()));
  }
  return c;
}

Signal make_reference(const ReferenceSpec& spec, double duration_s, double fs, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(std::llround(duration_s * fs));
  switch (spec.kind) {
    case ReferenceKind::Zero:
      return Signal(std::vector<double>(n, 0.0), fs, Unit::Newton);
    case ReferenceKind::Square:
      return signals::gen_square(spec.freq_hz, spec.amplitude_n, duration_s, fs);
    case ReferenceKind::Sine:
      return signals::gen_sine(spec.freq_hz, spec.amplitude_n, duration_s, fs);
    case ReferenceKind::Texture:
      return signals::make_texture(spec.texture, duration_s, fs, seed);
    case ReferenceKind::File: {
      Signal s = io::read_signal(spec.path, Unit::Newton);
      if (std::abs(s.fs() - fs) > 1e-6 * fs) {
        throw RateMismatch(fmt::format("reference file is sampled at {} Hz, the loop runs at {} Hz", s.fs(), fs));
      }
      if (s.size() < n) throw InsufficientData("reference file is shorter than the requested duration");
      return s.slice(0, n);
    }
  }
  throw ConfigError("unknown reference kind");
}

ResolvedController resolve_controller(const ExperimentConfig& cfg) {
  if (cfg.controller) return {*cfg.controller, std::nullopt};
  control::Design d =
      control::design_discrete(cfg.design, constant_tf(cfg.design.p_design), cfg.plant.L, cfg.plant.G);
  return {d.controller, d.report};
}

SimulationResult simulate(const plant::PlantConfig& plant_cfg, const lti::DiscreteFilter& controller,
                          const Signal& f_r, LoopMode mode, std::uint64_t seed, std::size_t mitigator_window,
                          std::size_t latency_samples) {
  if (std::abs(f_r.fs() - plant_cfg.control_fs) > 1e-9 * plant_cfg.control_fs) {
    throw RateMismatch("reference rate differs from the control rate");
  }
  if (std::abs(controller.fs() - plant_cfg.control_fs) > 1e-9 * plant_cfg.control_fs) {
    throw RateMismatch("controller rate differs from the control rate");
  }
  plant::Plant pl(plant_cfg, seed);
  control::Controller ctl(controller, mitigator_window);
  control::MitigatorState gate;
  gate.window = mitigator_window;
  std::deque<double> pending(latency_samples, control::kNeutralCurrentMa);

  const std::size_t n = f_r.size();
  const std::size_t per_trace = plant_cfg.substeps_per_trace();
  SimulationResult res;
  res.trace.fs = plant_cfg.trace_fs;
  res.trace.reserve(n * plant_cfg.substeps_per_control() / per_trace);
  ControlLog& log = res.log;
  log.fs = plant_cfg.control_fs;

  plant::StepResult prev{0.0, plant_cfg.normal_load.at(0.0), pl.state().contact, pl.state().direction,
                         pl.state().p_t};
  std::uint64_t substep = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double r = f_r[k];
    control::ControlOutput out;
    if (mode == LoopMode::ClosedLoop) {
      out = ctl.step(r, prev.f_m, prev.contact, prev.direction);
    } else {
      const control::MitigatorStep m = control::mitigator_step(gate, prev.contact, prev.f_m);
      gate = m.state;
      out.action = m.action;
      if (m.action == control::Action::Track) {
        out.u_ma = std::clamp(control::kNeutralCurrentMa + r / plant_cfg.p_nominal, control::kMinCurrentMa,
                              control::kMaxCurrentMa);
      }
    }
    if (out.fault) ++log.faults;
    pending.push_back(out.u_ma);
    const double u = pending.front();
    pending.pop_front();

    log.f_r.push_back(r);
    log.f_m.push_back(prev.f_m);
    log.u_ma.push_back(out.u_ma);
    log.error.push_back(out.error);
    log.action.push_back(out.action == control::Action::Track ? 1 : 0);
    log.contact.push_back(static_cast<int>(prev.contact));
    log.direction.push_back(prev.direction);

    try {
      prev = pl.step(u);
    } catch (const ActuationError& e) {
      res.plant_fault = fmt::format("control step {}: {}", k, e.what());
      break;
    }
    for (const plant::Substep& s : pl.last_substeps()) {
      if (++substep % per_trace != 0) continue;
      io::Trace& tr = res.trace;
      tr.t_s.push_back(s.t_s);
      tr.f_r.push_back(r);
      tr.f_m.push_back(pl.quantize_daq(s.post_l));
      tr.f_f.push_back(s.f_f);
      tr.u_ma.push_back(s.u_ma);
      tr.w_n.push_back(s.w_n);
      tr.contact.push_back(static_cast<int>(s.contact));
      tr.p_t.push_back(s.p_t);
    }
  }
  return res;
}

analysis::TrackingReport analyze_trace(const io::Trace& trace, const analysis::TrackingOptions& options) {
  return analysis::tracking_report(trace.column("f_r"), trace.column("f_m"), options);
}

ExperimentRecord run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentRecord rec;
  rec.dir = cfg.outputs.dir;
  std::filesystem::create_directories(rec.dir);
  rec.config = rec.dir / "config.json";
  write_json_file(rec.config, to_json(cfg));

  const ResolvedController rc = resolve_or_report(cfg, rec.dir);
  rec.controller = rec.dir / "controller.json";
  write_json_file(rec.controller, Json{{"schema_version", kSchemaVersion}, {"filter", to_json(rc.filter)}});
  if (rc.report) {
    rec.design_report = rec.dir / "design_report.json";
    write_json_file(*rec.design_report, to_json(*rc.report));
  }

  const Signal f_r = make_reference(cfg.reference, cfg.duration_s, cfg.plant.control_fs, cfg.seed);
  const SimulationResult sim = simulate(cfg.plant, rc.filter, f_r, cfg.mode, cfg.seed, cfg.mitigator_window,
                                        cfg.design.latency_samples);
  if (cfg.outputs.write_trace || !sim.plant_fault.empty()) {
    rec.trace = rec.dir / trace_name(cfg.outputs.format);
    io::write_trace(*rec.trace, sim.trace, cfg.outputs.format);
  }
  if (!sim.plant_fault.empty()) {
    throw ActuationError(fmt::format("plant fault at {}; trace prefix written to {}", sim.plant_fault,
                                     rec.trace->string()));
  }
  if (cfg.reference.kind != ReferenceKind::Zero) {
    rec.tracking = analyze_trace(sim.trace, cfg.tracking);
    rec.tracking_report = rec.dir / "tracking_report.json";
    write_json_file(*rec.tracking_report, to_json(*rec.tracking));
  }
  return rec;
}

std::vector<analysis::SensitivityCell> sweep_cells(const ExperimentConfig& cfg, const lti::DiscreteFilter& controller) {
  const std::vector<double> freqs =
      cfg.sweep.frequencies_hz.empty() ? signals::sweep_frequencies() : cfg.sweep.frequencies_hz;
  const std::vector<double> amps = cfg.sweep.amplitudes_n.empty() ? signals::sweep_amplitudes() : cfg.sweep.amplitudes_n;
  const std::size_t total = freqs.size() * amps.size();
  std::vector<analysis::SensitivityCell> cells(total);
  std::vector<std::exception_ptr> errors(total);
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (std::size_t i = next++; i < total; i = next++) {
      try {
        const double f = freqs[i / amps.size()];
        const double a = amps[i % amps.size()];
        const Signal ref = signals::gen_sine(f, a, cfg.sweep.duration_s, cfg.plant.control_fs);
        const SimulationResult sim = simulate(cfg.plant, controller, ref, cfg.mode, cfg.seed + i,
                                              cfg.mitigator_window, cfg.design.latency_samples);
        if (!sim.plant_fault.empty()) throw ActuationError(sim.plant_fault);
        const analysis::SensitivityRun run{f, a, sim.trace.column("f_r"), sim.trace.column("f_m")};
        cells[i] = analysis::empirical_sensitivity(std::span(&run, 1), cfg.sweep.options).front();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::size_t threads = cfg.sweep.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, total);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return cells;
}

void write_sensitivity_csv(const std::filesystem::path& path, const std::vector<analysis::SensitivityCell>& cells) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out << "f_ref_hz,amplitude_n,magnitude_ratio,phase_deg,delay_ms,swipes,warning\n";
  for (const auto& c : cells) {
    out << fmt::format("{},{},{},{},{},{},{}\n", c.f_ref_hz, c.amplitude_n, c.magnitude_ratio, c.phase_deg,
                       c.delay_ms, c.swipes, c.warning);
  }
}

SweepRecord run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  SweepRecord rec;
  rec.dir = cfg.outputs.dir;
  std::filesystem::create_directories(rec.dir);
  write_json_file(rec.dir / "config.json", to_json(cfg));
  const ResolvedController rc = resolve_or_report(cfg, rec.dir);
  write_json_file(rec.dir / "controller.json", Json{{"schema_version", kSchemaVersion}, {"filter", to_json(rc.filter)}});
  if (rc.report) write_json_file(rec.dir / "design_report.json", to_json(*rc.report));
  rec.cells = sweep_cells(cfg, rc.filter);
  write_json_file(rec.dir / "sensitivity.json", to_json(rec.cells));
  write_sensitivity_csv(rec.dir / "sensitivity.csv", rec.cells);
  return rec;
}

}  // namespace frictrl::experiment
