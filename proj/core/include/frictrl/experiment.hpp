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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "frictrl/analysis.hpp"
#include "frictrl/controller.hpp"
#include "frictrl/json_io.hpp"
#include "frictrl/lti.hpp"
#include "frictrl/plant.hpp"
#include "frictrl/signal.hpp"
#include "frictrl/trace.hpp"

namespace frictrl::experiment {

enum class LoopMode { ClosedLoop, OpenLoop };
enum class ReferenceKind { Zero, Square, Sine, Texture, File };

struct ReferenceSpec {
  ReferenceKind kind = ReferenceKind::Texture;
  double freq_hz = 20.0;       // square and sine
  double amplitude_n = 0.025;  // square and sine
  std::string texture = "EV";
  std::filesystem::path path;  // CSV (time, value) or signal JSON, sampled at the control rate
};

struct OutputSpec {
  std::filesystem::path dir = "run";
  io::TraceFormat format = io::TraceFormat::Csv;
  bool write_trace = true;
};

struct SweepSpec {
  std::vector<double> frequencies_hz;  // empty selects 20 log-spaced points over 20 Hz to 1 kHz
  std::vector<double> amplitudes_n;    // empty selects 10, 20, 30 and 40 mN
  double duration_s = 10.0;
  std::size_t threads = 0;  // 0 selects the hardware concurrency
  analysis::SensitivityOptions options;
};

struct ExperimentConfig {
  plant::PlantConfig plant;
  control::DesignTarget design;
  std::optional<lti::DiscreteFilter> controller;  // overrides the design target when set
  ReferenceSpec reference;
  double duration_s = 20.0;
  std::uint64_t seed = 0;
  LoopMode mode = LoopMode::ClosedLoop;
  std::size_t mitigator_window = 100;
  analysis::TrackingOptions tracking;
  SweepSpec sweep;
  OutputSpec outputs;

  // Throws ConfigError.
  void validate() const;
};

Json to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const Json& j, ExperimentConfig base = {});

// Controller-rate record of what the loop saw and did.
struct ControlLog {
  double fs = 10000.0;
  std::vector<double> f_r;
  std::vector<double> f_m;  // ADC reading used for the step
  std::vector<double> u_ma;
  std::vector<double> error;
  std::vector<int> action;     // 0 neutral, 1 track
  std::vector<int> contact;    // state seen by the controller
  std::vector<int> direction;  // -1 or 1
  std::size_t faults = 0;
};

struct SimulationResult {
  io::Trace trace;
  ControlLog log;
  std::string plant_fault;  // empty unless the plant aborted the run
};

Signal make_reference(const ReferenceSpec& spec, double duration_s, double fs, std::uint64_t seed);

struct ResolvedController {
  lti::DiscreteFilter filter;
  std::optional<control::DesignReport> report;
};

// Designs from the plant's nominal models unless an explicit filter is given.
// Throws DesignRejected.
ResolvedController resolve_controller(const ExperimentConfig& cfg);

// Runs the sampled loop for the length of f_r. The controller acts on the
// measurement from the previous period, so every drive decision is causal.
SimulationResult simulate(const plant::PlantConfig& plant_cfg, const lti::DiscreteFilter& controller,
                          const Signal& f_r, LoopMode mode, std::uint64_t seed, std::size_t mitigator_window = 100,
                          std::size_t latency_samples = 0);

analysis::TrackingReport analyze_trace(const io::Trace& trace, const analysis::TrackingOptions& options);

struct ExperimentRecord {
  std::filesystem::path dir;
  std::filesystem::path config;
  std::filesystem::path controller;
  std::optional<std::filesystem::path> design_report;
  std::optional<std::filesystem::path> trace;
  std::optional<std::filesystem::path> tracking_report;
  std::optional<analysis::TrackingReport> tracking;
};

// Writes config.json, controller.json, design_report.json, the trace and
// tracking_report.json into cfg.outputs.dir.
ExperimentRecord run_experiment(const ExperimentConfig& cfg);

struct SweepRecord {
  std::filesystem::path dir;
  std::vector<analysis::SensitivityCell> cells;
};

// One closed- or open-loop sine run per (frequency, amplitude) cell. Writes
// sensitivity.json and sensitivity.csv.
SweepRecord run_sweep(const ExperimentConfig& cfg);

std::vector<analysis::SensitivityCell> sweep_cells(const ExperimentConfig& cfg, const lti::DiscreteFilter& controller);

void write_sensitivity_csv(const std::filesystem::path& path, const std::vector<analysis::SensitivityCell>& cells);

}  // namespace frictrl::experiment
