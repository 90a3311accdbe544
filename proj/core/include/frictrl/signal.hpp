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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace frictrl {

// Swipe direction; the underlying value is the sign of the velocity.
enum class Direction : int { Left = -1, Right = 1 };

inline int sign_of(Direction d) { return static_cast<int>(d); }

enum class Unit { Newton, MilliAmp, Volt, Meter, Dimensionless };

std::string_view to_string(Unit unit);
Unit unit_from_string(std::string_view text);

// Uniformly sampled, finite-valued time series.
class Signal {
 public:
  Signal(std::vector<double> samples, double fs, Unit unit = Unit::Dimensionless);

  const std::vector<double>& samples() const noexcept { return samples_; }
  std::span<const double> view() const noexcept { return samples_; }
  double fs() const noexcept { return fs_; }
  Unit unit() const noexcept { return unit_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  double duration() const noexcept { return static_cast<double>(samples_.size()) / fs_; }
  double operator[](std::size_t i) const { return samples_[i]; }

  // Samples [begin, end) as a new signal with the same rate and unit.
  Signal slice(std::size_t begin, std::size_t end) const;

 private:
  std::vector<double> samples_;
  double fs_;
  Unit unit_;
};

}  // namespace frictrl
