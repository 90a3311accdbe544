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

#include "frictrl/json_io.hpp"

#include <fstream>

#include <fmt/format.h>

#include "frictrl/error.hpp"

namespace frictrl {

namespace {

template <typename T>
void take(const Json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

const char* fidelity_name(plant::Fidelity f) { return f == plant::Fidelity::Carrier ? "carrier" : "envelope"; }

plant::Fidelity fidelity_from(const std::string& s) {
  if (s == "envelope") return plant::Fidelity::Envelope;
  if (s == "carrier") return plant::Fidelity::Carrier;
  throw ConfigError(fmt::format("unknown fidelity '{}'", s));
}

plant::Kinematics kinematics_from(const std::string& s) {
  if (s == "sinusoidal") return plant::Kinematics::Sinusoidal;
  if (s == "constant_velocity") return plant::Kinematics::ConstantVelocity;
  throw ConfigError(fmt::format("unknown kinematics '{}'", s));
}

}  // namespace

Json to_json(const lti::RationalTF& tf) { return Json{{"num", tf.num()}, {"den", tf.den()}}; }

lti::RationalTF rational_from_json(const Json& j) {
  try {
    return lti::RationalTF(j.at("num").get<std::vector<double>>(), j.at("den").get<std::vector<double>>());
  } catch (const Json::exception& e) {
    throw ConfigError(fmt::format("bad transfer function JSON: {}", e.what()));
  }
}

Json to_json(const lti::DiscreteFilter& f) { return Json{{"b", f.b()}, {"a", f.a()}, {"fs", f.fs()}}; }

lti::DiscreteFilter filter_from_json(const Json& j) {
  try {
    return lti::DiscreteFilter(j.at("b").get<std::vector<double>>(), j.at("a").get<std::vector<double>>(),
                               j.at("fs").get<double>());
  } catch (const Json::exception& e) {
    throw ConfigError(fmt::format("bad filter JSON: {}", e.what()));
  }
}

Json to_json(const lti::FrequencyResponse& r) {
  Json pts = Json::array();
  for (std::size_t i = 0; i < r.size(); ++i) {
    pts.push_back({r.hz()[i], r.values()[i].real(), r.values()[i].imag()});
  }
  return Json{{"columns", {"hz", "re", "im"}}, {"points", pts}};
}

Json to_json(const Signal& s) {
  return Json{{"fs", s.fs()}, {"unit", std::string(to_string(s.unit()))}, {"samples", s.samples()}};
}

Signal signal_from_json(const Json& j) {
  try {
    return Signal(j.at("samples").get<std::vector<double>>(), j.at("fs").get<double>(),
                  unit_from_string(j.value("unit", std::string("dimensionless"))));
  } catch (const Json::exception& e) {
    throw ConfigError(fmt::format("bad signal JSON: {}", e.what()));
  }
}

Json to_json(const control::DesignReport& r) {
  Json bw = Json::array();
  for (const auto& b : r.bandwidth) bw.push_back({{"p", b.p}, {"emulated_hz", b.emulated_hz}, {"sampled_hz", b.sampled_hz}});
  Json st = Json::array();
  for (const auto& s : r.stability) st.push_back({{"p", s.p}, {"max_pole_radius", s.max_pole_radius}, {"stable", s.stable}});
  return Json{{"schema_version", kSchemaVersion},
              {"fit_residual", r.fit_residual},
              {"fit_rms_mag_db", r.fit_rms_mag_db},
              {"fit_rms_phase_deg", r.fit_rms_phase_deg},
              {"equivalent_p", r.equivalent_p},
              {"bandwidth", bw},
              {"stability", st},
              {"controller_stable", r.controller_stable},
              {"loop_stable", r.loop_stable}};
}

Json to_json(const control::DesignTarget& t) {
  return Json{{"band_hz", {t.band_lo_hz, t.band_hi_hz}},
              {"epsilon", t.epsilon},
              {"gamma_deg", t.gamma_deg},
              {"order", t.order},
              {"fs", t.fs},
              {"backoff", t.backoff},
              {"p_design", t.p_design},
              {"p_min", t.p_min},
              {"p_max", t.p_max},
              {"p_grid_points", t.p_grid_points},
              {"fit_upper_hz", t.fit_upper_hz},
              {"out_of_band_weight", t.out_of_band_weight},
              {"fit_points", t.fit_points},
              {"restarts", t.restarts},
              {"seed", t.seed},
              {"latency_samples", t.latency_samples}};
}

control::DesignTarget design_target_from_json(const Json& j, control::DesignTarget t) {
  try {
    if (j.contains("band_hz")) {
      const auto b = j.at("band_hz").get<std::vector<double>>();
      if (b.size() != 2) throw ConfigError("band_hz needs two values");
      t.band_lo_hz = b[0];
      t.band_hi_hz = b[1];
    }
    take(j, "epsilon", t.epsilon);
    take(j, "gamma_deg", t.gamma_deg);
    take(j, "order", t.order);
    take(j, "fs", t.fs);
    take(j, "backoff", t.backoff);
    take(j, "p_design", t.p_design);
    take(j, "p_min", t.p_min);
    take(j, "p_max", t.p_max);
    take(j, "p_grid_points", t.p_grid_points);
    take(j, "fit_upper_hz", t.fit_upper_hz);
    take(j, "out_of_band_weight", t.out_of_band_weight);
    take(j, "fit_points", t.fit_points);
    take(j, "restarts", t.restarts);
    take(j, "seed", t.seed);
    take(j, "latency_samples", t.latency_samples);
  } catch (const Json::exception& e) {
    throw ConfigError(fmt::format("bad design JSON: {}", e.what()));
  }
  return t;
}

Json to_json(const plant::PlantConfig& c) {
  Json steps = Json::array();
  for (const auto& s : c.normal_load.steps) steps.push_back({{"time_s", s.time_s}, {"delta_n", s.delta_n}});
  return Json{
      {"mu", c.mu},
      {"normal_load",
       {{"mean_n", c.normal_load.mean_n}, {"amplitude_n", c.normal_load.amplitude_n},
        {"freq_hz", c.normal_load.freq_hz}, {"steps", steps}}},
      {"p_nominal", c.p_nominal},
      {"p_min", c.p_min},
      {"p_max", c.p_max},
      {"direction_asymmetry", c.direction_asymmetry},
      {"gain_drift_sigma", c.gain_drift_sigma},
      {"gain_drift_tau_s", c.gain_drift_tau_s},
      {"carrier_freq_hz", c.carrier_freq_hz},
      {"internal_fs", c.internal_fs},
      {"control_fs", c.control_fs},
      {"trace_fs", c.trace_fs},
      {"noise_anchor_10hz", c.noise_anchor_10hz},
      {"noise_anchor_1khz", c.noise_anchor_1khz},
      {"noise_corner_hz", c.noise_corner_hz},
      {"G", to_json(c.G)},
      {"L", to_json(c.L)},
      {"adc_bits", c.adc_bits},
      {"adc_range_n", c.adc_range_n},
      {"dac_bits", c.dac_bits},
      {"dac_max_ma", c.dac_max_ma},
      {"daq_bits", c.daq_bits},
      {"daq_range_n", c.daq_range_n},
      {"stick_dwell_s", c.stick_dwell_s},
      {"partial_slip_s", c.partial_slip_s},
      {"breakaway_ratio", c.breakaway_ratio},
      {"kinematics", c.kinematics == plant::Kinematics::Sinusoidal ? "sinusoidal" : "constant_velocity"},
      {"swipe_freq_hz", c.swipe_freq_hz},
      {"swipe_amplitude_m", c.swipe_amplitude_m},
      {"velocity_m_s", c.velocity_m_s},
      {"fidelity", fidelity_name(c.fidelity)},
  };
}

plant::PlantConfig plant_config_from_json(const Json& j, plant::PlantConfig c) {
  try {
    take(j, "mu", c.mu);
    if (j.contains("normal_load")) {
      const Json& w = j.at("normal_load");
      take(w, "mean_n", c.normal_load.mean_n);
      take(w, "amplitude_n", c.normal_load.amplitude_n);
      take(w, "freq_hz", c.normal_load.freq_hz);
      if (w.contains("steps")) {
        c.normal_load.steps.clear();
        for (const auto& s : w.at("steps")) c.normal_load.steps.push_back({s.at("time_s"), s.at("delta_n")});
      }
    }
    take(j, "p_nominal", c.p_nominal);
    take(j, "p_min", c.p_min);
    take(j, "p_max", c.p_max);
    take(j, "direction_asymmetry", c.direction_asymmetry);
    take(j, "gain_drift_sigma", c.gain_drift_sigma);
    take(j, "gain_drift_tau_s", c.gain_drift_tau_s);
    take(j, "carrier_freq_hz", c.carrier_freq_hz);
    take(j, "internal_fs", c.internal_fs);
    take(j, "control_fs", c.control_fs);
    take(j, "trace_fs", c.trace_fs);
    take(j, "noise_anchor_10hz", c.noise_anchor_10hz);
    take(j, "noise_anchor_1khz", c.noise_anchor_1khz);
    take(j, "noise_corner_hz", c.noise_corner_hz);
    if (j.contains("G")) c.G = rational_from_json(j.at("G"));
    if (j.contains("L")) c.L = rational_from_json(j.at("L"));
    take(j, "adc_bits", c.adc_bits);
    take(j, "adc_range_n", c.adc_range_n);
    take(j, "dac_bits", c.dac_bits);
    take(j, "dac_max_ma", c.dac_max_ma);
    take(j, "daq_bits", c.daq_bits);
    take(j, "daq_range_n", c.daq_range_n);
    take(j, "stick_dwell_s", c.stick_dwell_s);
    take(j, "partial_slip_s", c.partial_slip_s);
    take(j, "breakaway_ratio", c.breakaway_ratio);
    if (j.contains("kinematics")) c.kinematics = kinematics_from(j.at("kinematics").get<std::string>());
    take(j, "swipe_freq_hz", c.swipe_freq_hz);
    take(j, "swipe_amplitude_m", c.swipe_amplitude_m);
    take(j, "velocity_m_s", c.velocity_m_s);
    if (j.contains("fidelity")) c.fidelity = fidelity_from(j.at("fidelity").get<std::string>());
  } catch (const Json::exception& e) {
    throw ConfigError(fmt::format("bad plant JSON: {}", e.what()));
  }
  return c;
}

Json to_json(const analysis::TrackingReport& r) {
  return Json{{"schema_version", kSchemaVersion},
              {"r2", r.r2},
              {"lag_s", r.lag_s},
              {"swipes", r.swipes},
              {"per_swipe_r2", r.per_swipe_r2}};
}

analysis::TrackingReport tracking_report_from_json(const Json& j) {
  analysis::TrackingReport r;
  r.r2 = j.at("r2").get<double>();
  r.lag_s = j.at("lag_s").get<double>();
  r.swipes = j.at("swipes").get<std::size_t>();
  r.per_swipe_r2 = j.at("per_swipe_r2").get<std::vector<double>>();
  return r;
}

Json to_json(const std::vector<analysis::SensitivityCell>& cells) {
  Json rows = Json::array();
  for (const auto& c : cells) {
    Json row{{"f_ref_hz", c.f_ref_hz},     {"amplitude_n", c.amplitude_n}, {"magnitude_ratio", c.magnitude_ratio},
             {"phase_deg", c.phase_deg},   {"delay_ms", c.delay_ms},       {"swipes", c.swipes}};
    if (!c.warning.empty()) row["warning"] = c.warning;
    rows.push_back(row);
  }
  return Json{{"schema_version", kSchemaVersion}, {"cells", rows}};
}

Json to_json(const sysid::SecondOrderFit& fit) {
  return Json{{"schema_version", kSchemaVersion}, {"gain", fit.gain},         {"fn_hz", fit.fn_hz},
              {"zeta", fit.zeta},                 {"residual", fit.residual}, {"low_confidence", fit.low_confidence},
              {"points", fit.points},             {"model", to_json(fit.model)}};
}

Json to_json(const sysid::GainEstimate& est) {
  Json trials = Json::array();
  for (const auto& t : est.per_trial) {
    trials.push_back({{"frequency_hz", t.frequency},
                      {"gain", t.gain},
                      {"direction", t.direction == Direction::Right ? "right" : "left"}});
  }
  return Json{{"schema_version", kSchemaVersion}, {"mean", est.mean}, {"min", est.min}, {"max", est.max},
              {"per_trial", trials}};
}

Json to_json(const sysid::ImpulseAverage& avg) {
  return Json{{"schema_version", kSchemaVersion},
              {"shifts_db", avg.shifts_db},
              {"onsets", avg.onsets},
              {"warnings", avg.warnings},
              {"response", to_json(avg.response)}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out << j.dump(2) << '\n';
  if (!out) throw IoError(fmt::format("write failed for {}", path.string()));
}

}  // namespace frictrl
