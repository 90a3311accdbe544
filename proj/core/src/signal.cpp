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

#include "frictrl/signal.hpp"

#include <cmath>

#include <fmt/format.h>

#include "frictrl/error.hpp"

namespace frictrl {

std::string_view to_string(Unit unit) {
  switch (unit) {
    case Unit::Newton: return "N";
    case Unit::MilliAmp: return "mA";
    case Unit::Volt: return "V";
    case Unit::Meter: return "m";
    case Unit::Dimensionless: return "dimensionless";
  }
  return "dimensionless";
}

Unit unit_from_string(std::string_view text) {
  if (text == "N") return Unit::Newton;
  if (text == "mA") return Unit::MilliAmp;
  if (text == "V") return Unit::Volt;
  if (text == "m") return Unit::Meter;
  if (text == "dimensionless" || text.empty()) return Unit::Dimensionless;
  throw InvalidParameter(fmt::format("unknown unit '{}'", text));
}

Signal::Signal(std::vector<double> samples, double fs, Unit unit)
    : samples_(std::move(samples)), fs_(fs), unit_(unit) {
  if (!(fs_ > 0.0) || !std::isfinite(fs_)) {
    throw InvalidParameter(fmt::format("signal sample rate must be positive, got {}", fs_));
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      throw InvalidParameter(fmt::format("signal sample {} is not finite", i));
    }
  }
}

Signal Signal::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > samples_.size()) {
    throw InvalidParameter(
        fmt::format("slice [{}, {}) out of range for {} samples", begin, end, samples_.size()));
  }
  return Signal(std::vector<double>(samples_.begin() + static_cast<std::ptrdiff_t>(begin),
                                    samples_.begin() + static_cast<std::ptrdiff_t>(end)),
                fs_, unit_);
}

}  // namespace frictrl
