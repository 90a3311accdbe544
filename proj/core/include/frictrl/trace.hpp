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

#include <filesystem>
#include <string_view>
#include <vector>

#include "frictrl/signal.hpp"

namespace frictrl::io {

// Experiment trace at the logging rate. Column order matches the CSV:
// t_s, f_r_N, f_m_N, f_f_N, u_mA, W_N, contact, P_t_NpermA.
struct Trace {
  double fs = 60000.0;
  std::vector<double> t_s;
  std::vector<double> f_r;
  std::vector<double> f_m;
  std::vector<double> f_f;
  std::vector<double> u_ma;
  std::vector<double> w_n;
  std::vector<int> contact;
  std::vector<double> p_t;

  std::size_t size() const noexcept { return t_s.size(); }
  void reserve(std::size_t n);
  // Column by CSV name ("f_r_N", "f_m_N", ...) or short name ("f_r", ...).
  Signal column(std::string_view name) const;
};

enum class TraceFormat { Csv, Binary };

void write_trace_csv(const std::filesystem::path& path, const Trace& trace);
Trace read_trace_csv(const std::filesystem::path& path);

// Columnar little-endian doubles behind a small header.
void write_trace_binary(const std::filesystem::path& path, const Trace& trace);
Trace read_trace_binary(const std::filesystem::path& path);

void write_trace(const std::filesystem::path& path, const Trace& trace, TraceFormat format);
// Picks the reader by file content.
Trace read_trace(const std::filesystem::path& path);

// Two-column (time, value) CSV with an optional header row.
Signal read_signal_csv(const std::filesystem::path& path, Unit unit = Unit::Newton);
// Native JSON signal or CSV, chosen by extension.
Signal read_signal(const std::filesystem::path& path, Unit unit = Unit::Newton);

}  // namespace frictrl::io
