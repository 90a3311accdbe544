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

#include <benchmark/benchmark.h>

#include "frictrl/analysis.hpp"
#include "frictrl/controller.hpp"
#include "frictrl/experiment.hpp"
#include "frictrl/plant.hpp"
#include "frictrl/signals.hpp"
#include "frictrl/sysid.hpp"

namespace {

using namespace frictrl;

const lti::RationalTF kG = lti::make_second_order(1.0, 4400.0, 0.6);
const lti::RationalTF kL = lti::make_second_order(1.0, 5300.0, 0.707);

const lti::DiscreteFilter& designed() {
  static const lti::DiscreteFilter c =
      control::design_discrete(control::DesignTarget{}, lti::RationalTF::gain(0.06), kL, kG).controller;
  return c;
}

void BM_PlantStep(benchmark::State& state) {
  plant::PlantConfig cfg;
  cfg.fidelity = state.range(0) == 0 ? plant::Fidelity::Envelope : plant::Fidelity::Carrier;
  plant::Plant p(cfg, 1);
  for (auto _ : state) benchmark::DoNotOptimize(p.step(2.5));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PlantStep)->Arg(0)->Arg(1);

void BM_DesignDiscrete(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        control::design_discrete(control::DesignTarget{}, lti::RationalTF::gain(0.06), kL, kG));
  }
}
BENCHMARK(BM_DesignDiscrete)->Unit(benchmark::kMillisecond);

void BM_SimulateClosedLoop(benchmark::State& state) {
  const Signal f_r = signals::make_texture("EV", 1.0, 10000.0, 1);
  const plant::PlantConfig cfg;
  const lti::DiscreteFilter& c = designed();
  for (auto _ : state) {
    benchmark::DoNotOptimize(experiment::simulate(cfg, c, f_r, experiment::LoopMode::ClosedLoop, 1));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f_r.size()));
}
BENCHMARK(BM_SimulateClosedLoop)->Unit(benchmark::kMillisecond);

void BM_BandpassZeroPhase(benchmark::State& state) {
  const Signal x = signals::make_texture("SW", static_cast<double>(state.range(0)), 10000.0, 2);
  for (auto _ : state) benchmark::DoNotOptimize(analysis::bandpass_zero_phase(x, 10.0, 1000.0));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(x.size()));
}
BENCHMARK(BM_BandpassZeroPhase)->Arg(1)->Arg(20);

void BM_LockIn(benchmark::State& state) {
  const Signal x = signals::gen_sine(120.0, 0.02, 1.0, 10000.0);
  for (auto _ : state) benchmark::DoNotOptimize(sysid::lock_in(x, 120.0));
}
BENCHMARK(BM_LockIn);

void BM_TrackingReport(benchmark::State& state) {
  const Signal f_r = signals::make_texture("EV", 10.0, 10000.0, 3);
  const auto sim = experiment::simulate(plant::PlantConfig{}, designed(), f_r, experiment::LoopMode::ClosedLoop, 3);
  const Signal r = sim.trace.column("f_r");
  const Signal m = sim.trace.column("f_m");
  for (auto _ : state) benchmark::DoNotOptimize(analysis::tracking_report(r, m));
}
BENCHMARK(BM_TrackingReport)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
