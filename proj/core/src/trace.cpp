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

#include "frictrl/trace.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "frictrl/error.hpp"
#include "frictrl/json_io.hpp"

namespace frictrl::io {

namespace {

constexpr std::array<const char*, 8> kColumns = {"t_s", "f_r_N", "f_m_N", "f_f_N",
                                                 "u_mA", "W_N", "contact", "P_t_NpermA"};
constexpr char kMagic[8] = {'F', 'R', 'T', 'R', 'A', 'C', 'E', '1'};

double parse_double(std::string_view s, std::size_t line) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw IoError(fmt::format("line {}: cannot parse '{}' as a number", line, s));
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

double infer_rate(const std::vector<double>& t) {
  if (t.size() < 2) throw InsufficientData("need two samples to infer a sample rate");
  const double fs = static_cast<double>(t.size() - 1) / (t.back() - t.front());
  if (!(fs > 0.0) || !std::isfinite(fs)) throw IoError("time column is not increasing");
  const double rounded = std::round(fs);
  return std::abs(fs - rounded) < 1e-6 * fs ? rounded : fs;
}

template <typename T>
void write_raw(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw IoError("truncated binary trace");
  return v;
}

}  // namespace

void Trace::reserve(std::size_t n) {
  t_s.reserve(n);
  f_r.reserve(n);
  f_m.reserve(n);
  f_f.reserve(n);
  u_ma.reserve(n);
  w_n.reserve(n);
  contact.reserve(n);
  p_t.reserve(n);
}

Signal Trace::column(std::string_view name) const {
  if (name == "f_r" || name == "f_r_N") return Signal(f_r, fs, Unit::Newton);
  if (name == "f_m" || name == "f_m_N") return Signal(f_m, fs, Unit::Newton);
  if (name == "f_f" || name == "f_f_N") return Signal(f_f, fs, Unit::Newton);
  if (name == "u" || name == "u_mA") return Signal(u_ma, fs, Unit::MilliAmp);
  if (name == "W" || name == "W_N") return Signal(w_n, fs, Unit::Newton);
  if (name == "P_t" || name == "P_t_NpermA") return Signal(p_t, fs, Unit::Dimensionless);
  if (name == "contact") return Signal(std::vector<double>(contact.begin(), contact.end()), fs);
  if (name == "t" || name == "t_s") return Signal(t_s, fs, Unit::Dimensionless);
  throw InvalidParameter(fmt::format("unknown trace column '{}'", name));
}

void write_trace_csv(const std::filesystem::path& path, const Trace& tr) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "{}\n", fmt::join(kColumns, ","));
  for (std::size_t i = 0; i < tr.size(); ++i) {
    fmt::format_to(std::back_inserter(buf), "{},{},{},{},{},{},{},{}\n", tr.t_s[i], tr.f_r[i], tr.f_m[i], tr.f_f[i],
                   tr.u_ma[i], tr.w_n[i], tr.contact[i], tr.p_t[i]);
    if (buf.size() > (1 << 20)) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError(fmt::format("write failed for {}", path.string()));
}

Trace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty trace file");
  const auto header = split(line);
  if (header.size() != kColumns.size()) throw IoError(fmt::format("trace header has {} columns", header.size()));
  Trace tr;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty() || line == "\r") continue;
    const auto f = split(line);
    if (f.size() != kColumns.size()) throw IoError(fmt::format("line {}: expected 8 fields", n));
    tr.t_s.push_back(parse_double(f[0], n));
    tr.f_r.push_back(parse_double(f[1], n));
    tr.f_m.push_back(parse_double(f[2], n));
    tr.f_f.push_back(parse_double(f[3], n));
    tr.u_ma.push_back(parse_double(f[4], n));
    tr.w_n.push_back(parse_double(f[5], n));
    tr.contact.push_back(static_cast<int>(parse_double(f[6], n)));
    tr.p_t.push_back(parse_double(f[7], n));
  }
  tr.fs = infer_rate(tr.t_s);
  return tr;
}

void write_trace_binary(const std::filesystem::path& path, const Trace& tr) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out.write(kMagic, sizeof kMagic);
  write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(kColumns.size()));
  write_raw<std::uint64_t>(out, tr.size());
  write_raw<double>(out, tr.fs);
  for (const char* name : kColumns) {
    const auto len = static_cast<std::uint32_t>(std::strlen(name));
    write_raw(out, len);
    out.write(name, len);
  }
  auto col = [&out](const std::vector<double>& v) {
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  };
  col(tr.t_s);
  col(tr.f_r);
  col(tr.f_m);
  col(tr.f_f);
  col(tr.u_ma);
  col(tr.w_n);
  col(std::vector<double>(tr.contact.begin(), tr.contact.end()));
  col(tr.p_t);
  if (!out) throw IoError(fmt::format("write failed for {}", path.string()));
}

Trace read_trace_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw IoError("not a binary trace");
  const auto ncols = read_raw<std::uint32_t>(in);
  const auto nrows = read_raw<std::uint64_t>(in);
  Trace tr;
  tr.fs = read_raw<double>(in);
  if (ncols != kColumns.size()) throw IoError("binary trace has an unexpected column count");
  for (std::uint32_t c = 0; c < ncols; ++c) {
    const auto len = read_raw<std::uint32_t>(in);
    std::string name(len, '\0');
    in.read(name.data(), len);
    if (name != kColumns[c]) throw IoError(fmt::format("unexpected column '{}'", name));
  }
  auto col = [&in, nrows]() {
    std::vector<double> v(nrows);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(nrows * sizeof(double)));
    if (!in) throw IoError("truncated binary trace");
    return v;
  };
  tr.t_s = col();
  tr.f_r = col();
  tr.f_m = col();
  tr.f_f = col();
  tr.u_ma = col();
  tr.w_n = col();
  const auto contact = col();
  tr.contact.assign(contact.begin(), contact.end());
  tr.p_t = col();
  return tr;
}

void write_trace(const std::filesystem::path& path, const Trace& trace, TraceFormat format) {
  if (format == TraceFormat::Binary) {
    write_trace_binary(path, trace);
  } else {
    write_trace_csv(path, trace);
  }
}

Trace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  char magic[8] = {};
  in.read(magic, sizeof magic);
  if (in && std::memcmp(magic, kMagic, sizeof magic) == 0) return read_trace_binary(path);
  return read_trace_csv(path);
}

Signal read_signal_csv(const std::filesystem::path& path, Unit unit) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  std::vector<double> t;
  std::vector<double> v;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty() || line == "\r") continue;
    const auto f = split(line);
    if (f.size() < 2) throw IoError(fmt::format("line {}: expected time,value", n));
    if (n == 1) {
      double probe = 0.0;
      const auto s = f[0];
      if (std::from_chars(s.data(), s.data() + s.size(), probe).ec != std::errc()) continue;  // header
    }
    t.push_back(parse_double(f[0], n));
    v.push_back(parse_double(f[1], n));
  }
  return Signal(std::move(v), infer_rate(t), unit);
}

Signal read_signal(const std::filesystem::path& path, Unit unit) {
  if (path.extension() == ".json") return signal_from_json(read_json_file(path));
  return read_signal_csv(path, unit);
}

}  // namespace frictrl::io
