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

// JSON forms of the library's value types. Loaders accept partial objects
// and keep the defaults of `base` for absent keys.

#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "frictrl/analysis.hpp"
#include "frictrl/controller.hpp"
#include "frictrl/lti.hpp"
#include "frictrl/plant.hpp"
#include "frictrl/signal.hpp"
#include "frictrl/sysid.hpp"

namespace frictrl {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

Json to_json(const lti::RationalTF& tf);
lti::RationalTF rational_from_json(const Json& j);

Json to_json(const lti::DiscreteFilter& f);
lti::DiscreteFilter filter_from_json(const Json& j);

Json to_json(const lti::FrequencyResponse& r);

Json to_json(const Signal& s);
Signal signal_from_json(const Json& j);

Json to_json(const control::DesignReport& r);
Json to_json(const control::DesignTarget& t);
control::DesignTarget design_target_from_json(const Json& j, control::DesignTarget base = {});

Json to_json(const plant::PlantConfig& c);
plant::PlantConfig plant_config_from_json(const Json& j, plant::PlantConfig base = {});

Json to_json(const analysis::TrackingReport& r);
analysis::TrackingReport tracking_report_from_json(const Json& j);
Json to_json(const std::vector<analysis::SensitivityCell>& cells);

Json to_json(const sysid::SecondOrderFit& fit);
Json to_json(const sysid::GainEstimate& est);
Json to_json(const sysid::ImpulseAverage& avg);

Json read_json_file(const std::filesystem::path& path);
// Pretty-printed with a trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace frictrl
