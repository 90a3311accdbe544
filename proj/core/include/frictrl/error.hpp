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

#include <stdexcept>
#include <cstddef>
#include <string>
#include <utility>

namespace frictrl {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// A frequency-response evaluation landed on an imaginary-axis pole.
class PoleOnAxis : public Error {
 public:
  using Error::Error;
};

class RateMismatch : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

// Nonlinear fit did not produce an acceptable result. Carries the best
// residual seen across all restarts.
class FitFailure : public Error {
 public:
  FitFailure(const std::string& what, double best_residual)
      : Error(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

// Simulation output exceeded the magnitude guard.
class Divergence : public Error {
 public:
  Divergence(const std::string& what, std::size_t index)
      : Error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class SingularDesign : public Error {
 public:
  using Error::Error;
};

// Designed controller failed a stability or bandwidth check. The report
// is the serialized design report, kept so callers can emit it.
class DesignRejected : public Error {
 public:
  DesignRejected(const std::string& what, std::string report)
      : Error(what), report_(std::move(report)) {}
  const std::string& report() const noexcept { return report_; }

 private:
  std::string report_;
};

class Degeneracy : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ActuationError : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public Error {
 public:
  using Error::Error;
};

class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

class InvalidTrial : public Error {
 public:
  using Error::Error;
};

class SpecError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace frictrl
