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

#include "frictrl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>

#include <fmt/format.h>

#include "frictrl/butterworth.hpp"
#include "frictrl/error.hpp"
#include "frictrl/sysid.hpp"

namespace frictrl::analysis {

namespace {

Signal zero_phase(const Signal& x, const dsp::Sos& sos) {
  const std::size_t pad = 3 * dsp::settling_samples(sos);
  return Signal(dsp::filtfilt(sos, x.view(), pad), x.fs(), x.unit());
}

void require_same_rate(const Signal& a, const Signal& b) {
  if (std::abs(a.fs() - b.fs()) > 1e-9 * a.fs()) {
    throw RateMismatch(fmt::format("signal rates differ: {} vs {} Hz", a.fs(), b.fs()));
  }
}

// Pearson correlation of ref[i] against meas[i + lag] over the given
// indices (those whose partner falls outside meas are skipped).
double pearson_at(std::span<const double> ref, std::span<const double> meas,
                  std::span<const std::size_t> idx, long lag) {
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  double n = 0;
  const auto m = static_cast<long>(meas.size());
  for (std::size_t i : idx) {
    const long j = static_cast<long>(i) + lag;
    if (j < 0 || j >= m) continue;
    const double x = ref[i];
    const double y = meas[static_cast<std::size_t>(j)];
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
    n += 1;
  }
  if (n < 2) return -2.0;
  const double cxx = sxx - sx * sx / n;
  const double cyy = syy - sy * sy / n;
  const double cxy = sxy - sx * sy / n;
  if (!(cxx > 0.0) || !(cyy > 0.0)) return -2.0;
  return cxy / std::sqrt(cxx * cyy);
}

struct LagSearch {
  long lag = 0;
  double correlation = -2.0;
};

LagSearch best_lag(std::span<const double> ref, std::span<const double> meas,
                   std::span<const std::size_t> idx, long max_lag) {
  LagSearch best;
  // Scan outward from zero so ties resolve to the smallest shift.
  for (long d = 0; d <= max_lag; ++d) {
    for (long lag : {d, -d}) {
      if (d == 0 && lag < 0) continue;
      const double c = pearson_at(ref, meas, idx, lag);
      if (c > best.correlation + 1e-15) {
        best.correlation = c;
        best.lag = lag;
      }
    }
  }
  return best;
}

std::vector<double> shift_held(std::span<const double> x, long lag) {
  const auto n = static_cast<long>(x.size());
  std::vector<double> out(x.size());
  for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(std::clamp(i + lag, 0L, n - 1))];
  return out;
}

double wrap_deg(double deg) {
  double w = std::remainder(deg, 360.0);
  if (w <= -180.0) w += 360.0;
  return w;
}

}  // namespace

Signal bandpass_zero_phase(const Signal& x, double lo_hz, double hi_hz) {
  if (!(lo_hz > 0.0 && hi_hz > lo_hz && hi_hz < x.fs() / 2.0)) {
    throw InvalidParameter(fmt::format("band [{}, {}] Hz invalid for fs {}", lo_hz, hi_hz, x.fs()));
  }
  return zero_phase(x, dsp::butter_bandpass(2, lo_hz, hi_hz, x.fs()));
}

Signal lowpass_zero_phase(const Signal& x, double fc_hz) {
  if (!(fc_hz > 0.0 && fc_hz < x.fs() / 2.0)) {
    throw InvalidParameter(fmt::format("cutoff {} Hz invalid for fs {}", fc_hz, x.fs()));
  }
  return zero_phase(x, dsp::butter_lowpass(2, fc_hz, x.fs()));
}

std::vector<SwipeSegment> segment_swipes(const Signal& f, const SegmentOptions& options) {
  std::vector<SwipeSegment> out;
  const std::size_t n = f.size();
  std::vector<int> sign(n, 0);
  int last = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (f[i] > 0.0) last = 1;
    if (f[i] < 0.0) last = -1;
    sign[i] = last;
  }
  std::vector<std::size_t> crossings;
  for (std::size_t i = 1; i < n; ++i) {
    if (sign[i - 1] != 0 && sign[i] != sign[i - 1]) crossings.push_back(i);
  }
  const auto debounce = static_cast<std::size_t>(std::llround(options.debounce_s * f.fs()));
  struct Accepted {
    std::size_t at;
    int after;
  };
  std::vector<Accepted> accepted;
  for (std::size_t i = 0; i < crossings.size();) {
    std::size_t j = i;
    while (j + 1 < crossings.size() && crossings[j + 1] - crossings[j] < debounce) ++j;
    const int before = sign[crossings[i] - 1];
    const int after = sign[crossings[j]];
    if (before != after) accepted.push_back({(crossings[i] + crossings[j]) / 2, after});
    i = j + 1;
  }
  for (std::size_t k = 0; k + 1 < accepted.size(); ++k) {
    SwipeSegment s;
    s.start = accepted[k].at;
    s.end = accepted[k + 1].at;
    if (s.end <= s.start) continue;
    s.direction = accepted[k].after > 0 ? Direction::Right : Direction::Left;
    const std::size_t len = s.end - s.start;
    s.mid_start = s.start + len / 4;
    s.mid_end = s.mid_start + len / 2;
    out.push_back(s);
  }
  return out;
}

Alignment align_by_xcorr(const Signal& ref, const Signal& meas, double max_lag_s) {
  require_same_rate(ref, meas);
  if (!(max_lag_s >= 0.0)) throw InvalidParameter("maximum lag must be non-negative");
  const auto max_lag = static_cast<long>(std::floor(max_lag_s * ref.fs() + 1e-9));
  std::vector<std::size_t> idx(ref.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const LagSearch best = best_lag(ref.view(), meas.view(), idx, max_lag);
  if (best.correlation < -1.5) throw AlignmentError("cannot align signals with zero variance");
  Alignment out{Signal(shift_held(meas.view(), best.lag), meas.fs(), meas.unit()),
                static_cast<double>(best.lag) / ref.fs(), best.lag, best.correlation};
  return out;
}

double r_squared(std::span<const double> ref, std::span<const double> meas) {
  if (ref.size() != meas.size()) throw InvalidParameter("R^2 needs equal-length signals");
  if (ref.size() < 2) throw UndefinedMetric("R^2 needs at least two samples");
  const double n = static_cast<double>(ref.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    mx += ref[i];
    my += meas[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double dx = ref[i] - mx;
    const double dy = meas[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0)) throw UndefinedMetric("reference has zero variance");
  if (!(syy > 0.0)) return 0.0;
  return std::min(1.0, sxy * sxy / (sxx * syy));
}

double r_squared(const Signal& ref, const Signal& meas) {
  require_same_rate(ref, meas);
  return r_squared(ref.view(), meas.view());
}

TrackingReport tracking_report(const Signal& f_r, const Signal& f_m, const TrackingOptions& options) {
  require_same_rate(f_r, f_m);
  if (f_r.size() != f_m.size()) throw InvalidParameter("reference and measurement lengths differ");
  const Signal ref = bandpass_zero_phase(f_r, options.band_lo_hz, options.band_hi_hz);
  const Signal meas = bandpass_zero_phase(f_m, options.band_lo_hz, options.band_hi_hz);
  const auto segs = segment_swipes(lowpass_zero_phase(f_m, options.segmentation_lowpass_hz), options.segments);
  if (segs.empty()) throw InsufficientData("no complete swipes found in the measured force");

  std::vector<double> corrected(meas.size(), 0.0);
  std::vector<std::size_t> idx;
  for (const auto& s : segs) {
    const double sgn = sign_of(s.direction);
    for (std::size_t i = s.start; i < s.end; ++i) corrected[i] = sgn * meas[i];
    for (std::size_t i = s.mid_start; i < s.mid_end; ++i) idx.push_back(i);
  }
  const auto max_lag = static_cast<long>(std::floor(options.max_lag_s * f_r.fs() + 1e-9));
  const LagSearch best = best_lag(ref.view(), corrected, idx, max_lag);
  if (best.correlation < -1.5) throw AlignmentError("cannot align: zero variance in retained samples");
  const std::vector<double> shifted = shift_held(corrected, best.lag);

  TrackingReport rep;
  rep.lag_s = static_cast<double>(best.lag) / f_r.fs();
  rep.swipes = segs.size();
  std::vector<double> rx;
  std::vector<double> mx;
  for (const auto& s : segs) {
    std::span<const double> r(ref.samples().data() + s.mid_start, s.mid_end - s.mid_start);
    std::span<const double> m(shifted.data() + s.mid_start, s.mid_end - s.mid_start);
    rep.per_swipe_r2.push_back(r_squared(r, m));
    rx.insert(rx.end(), r.begin(), r.end());
    mx.insert(mx.end(), m.begin(), m.end());
  }
  rep.r2 = r_squared(rx, mx);
  return rep;
}

std::vector<SensitivityCell> empirical_sensitivity(std::span<const SensitivityRun> runs,
                                                   const SensitivityOptions& options) {
  struct Acc {
    double ratio = 0.0;
    std::complex<double> phasor = 0.0;
    std::size_t swipes = 0;
  };
  std::map<std::pair<double, double>, Acc> cells;
  for (const auto& run : runs) {
    require_same_rate(run.f_r, run.f_m);
    Acc& acc = cells[{run.f_ref_hz, run.amplitude_n}];
    const double hi = std::min(options.band_hi_hz, 0.45 * run.f_r.fs());
    const Signal ref = bandpass_zero_phase(run.f_r, options.band_lo_hz, hi);
    const Signal meas = bandpass_zero_phase(run.f_m, options.band_lo_hz, hi);
    const auto segs =
        segment_swipes(lowpass_zero_phase(run.f_m, options.segmentation_lowpass_hz), options.segments);
    for (const auto& s : segs) {
      const double sgn = sign_of(s.direction);
      std::vector<double> m(meas.samples().begin() + static_cast<std::ptrdiff_t>(s.mid_start),
                            meas.samples().begin() + static_cast<std::ptrdiff_t>(s.mid_end));
      for (double& v : m) v *= sgn;
      try {
        const auto lr = sysid::lock_in(ref.slice(s.mid_start, s.mid_end), run.f_ref_hz);
        const auto lm = sysid::lock_in(Signal(std::move(m), meas.fs()), run.f_ref_hz);
        if (!(lr.amplitude > 0.0)) continue;
        acc.ratio += lm.amplitude / lr.amplitude;
        acc.phasor += std::polar(1.0, (lm.phase_deg - lr.phase_deg) * std::numbers::pi / 180.0);
        ++acc.swipes;
      } catch (const InsufficientData&) {
        continue;
      }
    }
  }
  std::vector<SensitivityCell> out;
  for (const auto& [key, acc] : cells) {
    SensitivityCell c;
    c.f_ref_hz = key.first;
    c.amplitude_n = key.second;
    c.swipes = acc.swipes;
    if (acc.swipes > 0) {
      c.magnitude_ratio = acc.ratio / static_cast<double>(acc.swipes);
      c.phase_deg = wrap_deg(std::arg(acc.phasor) * 180.0 / std::numbers::pi);
      c.delay_ms = -c.phase_deg / (360.0 * c.f_ref_hz) * 1000.0;
    }
    if (acc.swipes < options.min_swipes) {
      c.warning = fmt::format("only {} usable swipes (need {})", acc.swipes, options.min_swipes);
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace frictrl::analysis
