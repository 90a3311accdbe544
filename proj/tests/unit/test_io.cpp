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

#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "frictrl/error.hpp"
#include "frictrl/experiment.hpp"
#include "frictrl/json_io.hpp"
#include "frictrl/trace.hpp"

namespace frictrl::io {
namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / "frictrl_unit" /
           ::testing::UnitTest::GetInstance()->current_test_info()->name();
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

Trace sample_trace() {
  Trace t;
  t.fs = 60000.0;
  for (int i = 0; i < 50; ++i) {
    t.t_s.push_back(i / 60000.0);
    t.f_r.push_back(0.01 * std::sin(0.3 * i));
    t.f_m.push_back(0.1 + 1.0 / (i + 3.0));
    t.f_f.push_back(-0.2 + i * 1e-7);
    t.u_ma.push_back(2.5 + 0.001 * i);
    t.w_n.push_back(0.5);
    t.contact.push_back(i % 3);
    t.p_t.push_back(0.06 / 7.0);
  }
  return t;
}

void expect_same(const Trace& a, const Trace& b) {
  EXPECT_EQ(a.fs, b.fs);
  EXPECT_EQ(a.t_s, b.t_s);
  EXPECT_EQ(a.f_r, b.f_r);
  EXPECT_EQ(a.f_m, b.f_m);
  EXPECT_EQ(a.f_f, b.f_f);
  EXPECT_EQ(a.u_ma, b.u_ma);
  EXPECT_EQ(a.w_n, b.w_n);
  EXPECT_EQ(a.contact, b.contact);
  EXPECT_EQ(a.p_t, b.p_t);
}

TEST_F(TempDir, CsvTraceRoundTripsExactly) {
  const Trace t = sample_trace();
  write_trace_csv(dir_ / "t.csv", t);
  expect_same(t, read_trace_csv(dir_ / "t.csv"));
  expect_same(t, read_trace(dir_ / "t.csv"));
}

TEST_F(TempDir, BinaryTraceRoundTripsExactly) {
  const Trace t = sample_trace();
  write_trace(dir_ / "t.bin", t, TraceFormat::Binary);
  expect_same(t, read_trace_binary(dir_ / "t.bin"));
  expect_same(t, read_trace(dir_ / "t.bin"));
}

TEST_F(TempDir, TraceColumnsByName) {
  const Trace t = sample_trace();
  EXPECT_EQ(t.column("f_m").samples(), t.f_m);
  EXPECT_EQ(t.column("u_mA").samples(), t.u_ma);
  EXPECT_EQ(t.column("f_r_N").fs(), 60000.0);
  EXPECT_THROW(t.column("bogus"), InvalidParameter);
}

TEST_F(TempDir, MalformedFilesRaise) {
  std::ofstream(dir_ / "bad.csv") << "t_s,f_r_N\n0,1\n";
  EXPECT_THROW(read_trace(dir_ / "bad.csv"), IoError);
  std::ofstream(dir_ / "nan.csv") << "t,v\n0,1\n0.1,abc\n";
  EXPECT_THROW(read_signal_csv(dir_ / "nan.csv"), IoError);
  EXPECT_THROW(read_trace(dir_ / "missing.csv"), IoError);
}

TEST_F(TempDir, SignalCsvWithAndWithoutHeader) {
  std::ofstream(dir_ / "h.csv") << "time,force\n0,0.1\n0.001,0.2\n0.002,0.3\n";
  std::ofstream(dir_ / "n.csv") << "0,0.1\n0.001,0.2\n0.002,0.3\n";
  for (const char* name : {"h.csv", "n.csv"}) {
    const Signal s = read_signal(dir_ / name);
    EXPECT_EQ(s.samples(), (std::vector<double>{0.1, 0.2, 0.3})) << name;
    EXPECT_EQ(s.fs(), 1000.0) << name;
  }
}

TEST_F(TempDir, SignalJsonRoundTrip) {
  const Signal s({0.5, -0.25, 1e-17}, 10000.0, Unit::Newton);
  write_json_file(dir_ / "s.json", to_json(s));
  const Signal r = read_signal(dir_ / "s.json");
  EXPECT_EQ(r.samples(), s.samples());
  EXPECT_EQ(r.fs(), s.fs());
  EXPECT_EQ(r.unit(), Unit::Newton);
}

TEST(Json, FilterAndTransferFunctionRoundTrip) {
  const lti::DiscreteFilter f({7.0963, -6.6406, -0.2418, -0.2123}, {1.0, -1.9998, 0.9998, 0.0}, 10000.0);
  const lti::DiscreteFilter g = filter_from_json(to_json(f));
  EXPECT_EQ(g.b(), f.b());
  EXPECT_EQ(g.a(), f.a());
  EXPECT_EQ(g.fs(), f.fs());
  const lti::RationalTF tf = lti::make_second_order(1.0, 4400.0, 0.6);
  const lti::RationalTF back = rational_from_json(to_json(tf));
  EXPECT_EQ(back.num(), tf.num());
  EXPECT_EQ(back.den(), tf.den());
}

TEST(Json, PlantConfigPartialOverride) {
  const plant::PlantConfig c = plant_config_from_json(Json{{"p_nominal", 0.05}, {"fidelity", "carrier"}});
  EXPECT_EQ(c.p_nominal, 0.05);
  EXPECT_EQ(c.fidelity, plant::Fidelity::Carrier);
  EXPECT_EQ(c.mu, plant::PlantConfig{}.mu);
  const plant::PlantConfig d = plant_config_from_json(to_json(c));
  EXPECT_EQ(to_json(d), to_json(c));
}

TEST(Json, ExperimentConfigRoundTrip) {
  experiment::ExperimentConfig c;
  c.seed = 17;
  c.duration_s = 3.0;
  c.mode = experiment::LoopMode::OpenLoop;
  c.reference.kind = experiment::ReferenceKind::Sine;
  c.reference.freq_hz = 120.0;
  c.sweep.frequencies_hz = {20.0, 40.0};
  c.outputs.format = TraceFormat::Binary;
  const Json j = experiment::to_json(c);
  const experiment::ExperimentConfig r = experiment::experiment_config_from_json(j);
  EXPECT_EQ(experiment::to_json(r), j);
  EXPECT_EQ(r.seed, 17u);
  EXPECT_EQ(r.reference.kind, experiment::ReferenceKind::Sine);
}

TEST(Json, ExperimentConfigRejectsOtherSchema) {
  EXPECT_THROW(experiment::experiment_config_from_json(Json{{"schema_version", 99}}), ConfigError);
}

TEST_F(TempDir, ExperimentReplayMatchesRecordedReport) {
  experiment::ExperimentConfig c;
  c.seed = 4;
  c.duration_s = 4.0;
  c.reference.kind = experiment::ReferenceKind::Sine;
  c.reference.freq_hz = 100.0;
  c.outputs.dir = dir_ / "run";
  const auto rec = experiment::run_experiment(c);
  ASSERT_TRUE(rec.trace.has_value());
  ASSERT_TRUE(rec.tracking.has_value());
  const auto replay = experiment::analyze_trace(read_trace(*rec.trace), c.tracking);
  EXPECT_EQ(to_json(replay), to_json(*rec.tracking));
  EXPECT_EQ(read_json_file(*rec.tracking_report), to_json(*rec.tracking));
  const auto loaded = experiment::experiment_config_from_json(read_json_file(rec.config));
  EXPECT_EQ(loaded.seed, 4u);
}

}  // namespace
}  // namespace frictrl::io
