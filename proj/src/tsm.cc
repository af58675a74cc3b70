// hpctk/tsm.cc

// Copyright 2026  The hpctk authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "hpctk/tsm.h"

#include <algorithm>
#include <cmath>

#include "hpctk/error.h"

namespace hpctk {

namespace {

double SampleOrZero(const std::vector<float> &x, long i) {
  return (i >= 0 && i < static_cast<long>(x.size())) ? x[i] : 0.0;
}

}  // namespace

long TimeMap::SourceLength() const {
  return segments.empty() ? 0 : segments.back().src_end;
}

long TimeMap::OutputLength() const {
  return segments.empty() ? 0 : segments.back().out_end;
}

double TimeMap::ToSource(double out_pos) const {
  if (segments.empty()) return out_pos;
  for (const auto &s : segments) {
    if (out_pos < s.out_end || &s == &segments.back()) {
      const double out_len = static_cast<double>(s.out_end - s.out_begin);
      const double src_len = static_cast<double>(s.src_end - s.src_begin);
      if (out_len <= 0.0) return static_cast<double>(s.src_begin);
      return s.src_begin + (out_pos - s.out_begin) * src_len / out_len;
    }
  }
  return out_pos;
}

double TimeMap::ToOutput(double src_pos) const {
  if (segments.empty()) return src_pos;
  for (const auto &s : segments) {
    if (src_pos < s.src_end || &s == &segments.back()) {
      const double out_len = static_cast<double>(s.out_end - s.out_begin);
      const double src_len = static_cast<double>(s.src_end - s.src_begin);
      if (src_len <= 0.0) return static_cast<double>(s.out_begin);
      return s.out_begin + (src_pos - s.src_begin) * out_len / src_len;
    }
  }
  return src_pos;
}

std::vector<float> Wsola(const std::vector<float> &x, int sample_rate,
                         const TimeMap &map, const WsolaConfig &cfg) {
  const long out_len = map.OutputLength();
  if (out_len <= 0) return {};

  int win = std::max(32, static_cast<int>(std::lround(cfg.window_seconds *
                                                      sample_rate)));
  win += win & 1;  // even
  const int hop = win / 2;
  const int overlap = hop;
  const int search =
      std::max(1, static_cast<int>(std::lround(cfg.search_seconds *
                                               sample_rate)));
  std::vector<double> window(win);
  for (int n = 0; n < win; ++n)
    window[n] = 0.5 - 0.5 * std::cos(2.0 * M_PI * n / win);

  std::vector<double> acc(out_len, 0.0), wsum(out_len, 0.0);
  const long src_max = static_cast<long>(x.size());

  auto clamp_start = [&](long a) {
    return std::clamp(a, 0L, std::max(0L, src_max - win));
  };

  long prev_a = -1;
  for (long p = 0;; p += hop) {
    const long nominal =
        std::lround(map.ToSource(p + win / 2.0) - win / 2.0);
    long a;
    if (prev_a < 0) {
      a = clamp_start(nominal);
    } else {
      // Pick the candidate start whose beginning best continues the previous
      // frame; tie-break toward the nominal position.
      const long cont = prev_a + hop;
      double cont_energy = 0.0;
      for (int n = 0; n < overlap; ++n) {
        const double v = SampleOrZero(x, cont + n);
        cont_energy += v * v;
      }
      a = clamp_start(nominal);
      if (cont_energy > 1e-12) {
        double best = -2.0;
        for (int step = 0; step <= search; ++step) {
          for (int sign = 0; sign < (step == 0 ? 1 : 2); ++sign) {
            const int delta = sign == 0 ? step : -step;
            const long cand = clamp_start(nominal + delta);
            double cross = 0.0, energy = 0.0;
            for (int n = 0; n < overlap; ++n) {
              const double c = SampleOrZero(x, cand + n);
              cross += c * SampleOrZero(x, cont + n);
              energy += c * c;
            }
            const double score =
                energy > 1e-12 ? cross / std::sqrt(energy * cont_energy) : 0.0;
            if (score > best) {
              best = score;
              a = cand;
            }
          }
        }
      }
    }
    for (int n = 0; n < win; ++n) {
      const long o = p + n;
      if (o >= out_len) break;
      acc[o] += SampleOrZero(x, a + n) * window[n];
      wsum[o] += window[n];
    }
    prev_a = a;
    if (p + hop >= out_len) break;
  }

  std::vector<float> out(out_len);
  for (long i = 0; i < out_len; ++i)
    out[i] = wsum[i] > 1e-4 ? static_cast<float>(acc[i] / wsum[i]) : 0.0f;
  return out;
}

namespace {

struct VoicedRegion {
  long begin = 0;  // samples
  long end = 0;
};

std::vector<VoicedRegion> FindVoicedRegions(const ContinuousLogF0Track &track,
                                            int sample_rate, long num_samples) {
  std::vector<VoicedRegion> regions;
  const int n = track.NumFrames();
  int i = 0;
  while (i < n) {
    if (!track.voiced[i]) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 < n && track.voiced[j + 1]) ++j;
    if (j - i + 1 >= 3) {
      VoicedRegion r;
      const double t0 = std::max(0.0, (i - 0.5) * track.hop_seconds);
      const double t1 = (j + 0.5) * track.hop_seconds;
      r.begin = std::clamp(std::lround(t0 * sample_rate), 0L, num_samples);
      r.end = std::clamp(std::lround(t1 * sample_rate), 0L, num_samples);
      if (r.end > r.begin) regions.push_back(r);
    }
    i = j + 1;
  }
  return regions;
}

// Glottal-cycle anchors: consistent-polarity waveform peaks spaced by the
// local period.
std::vector<long> DetectEpochs(const std::vector<float> &y, int sr,
                               const ContinuousLogF0Track &current,
                               const VoicedRegion &r) {
  const auto period_at = [&](long pos) {
    const double f0 = std::exp(current.SampleAt(static_cast<double>(pos) / sr));
    return std::max(8.0, sr / std::max(f0, 1.0));
  };

  // Polarity from the strongest extremum in the region.
  double best_abs = 0.0;
  double polarity = 1.0;
  for (long n = r.begin; n < r.end; ++n) {
    if (std::fabs(y[n]) > best_abs) {
      best_abs = std::fabs(y[n]);
      polarity = y[n] >= 0 ? 1.0 : -1.0;
    }
  }
  if (best_abs <= 0.0) return {};

  const auto peak_in = [&](long lo, long hi) {
    lo = std::clamp(lo, r.begin, r.end - 1);
    hi = std::clamp(hi, r.begin, r.end);
    long best = lo;
    double best_v = -1e300;
    for (long n = lo; n < hi; ++n) {
      const double v = polarity * y[n];
      if (v > best_v) {
        best_v = v;
        best = n;
      }
    }
    return best;
  };

  const long first =
      peak_in(r.begin, r.begin + std::lround(period_at(r.begin)) + 1);
  std::vector<long> epochs = {first};
  // Forward pass.
  while (true) {
    const long cur = epochs.back();
    const double period = period_at(cur);
    const long nominal = cur + std::lround(period);
    if (nominal >= r.end) break;
    const long radius = std::max(2L, std::lround(0.3 * period));
    long next = peak_in(nominal - radius, nominal + radius + 1);
    if (next <= cur) next = std::min(nominal, r.end - 1);
    if (next <= cur) break;
    epochs.push_back(next);
    if (static_cast<long>(epochs.size()) > (r.end - r.begin)) break;
  }
  return epochs;
}

}  // namespace

std::vector<float> ImposePitchContour(const std::vector<float> &y,
                                      int sample_rate,
                                      const ContinuousLogF0Track &current,
                                      const std::vector<double> &target_log_f0) {
  if (target_log_f0.size() != static_cast<size_t>(current.NumFrames()))
    throw Error("target contour length does not match the pitch track");
  const long len = static_cast<long>(y.size());
  std::vector<double> acc(len, 0.0), wsum(len, 0.0);
  std::vector<double> background(len, 1.0);

  const auto target_at = [&](double pos_samples) {
    const double u = pos_samples / sample_rate / current.hop_seconds;
    const int n = static_cast<int>(target_log_f0.size());
    if (u <= 0.0) return target_log_f0.front();
    if (u >= n - 1) return target_log_f0.back();
    const int i = static_cast<int>(std::floor(u));
    const double frac = u - i;
    return target_log_f0[i] + frac * (target_log_f0[i + 1] - target_log_f0[i]);
  };

  const auto regions = FindVoicedRegions(current, sample_rate, len);
  for (const auto &r : regions) {
    const auto epochs = DetectEpochs(y, sample_rate, current, r);
    if (epochs.size() < 2) continue;

    // Synthesis epoch train paced by the target contour, anchored at the
    // first analysis epoch.  It overshoots the region end by one period so
    // the grains own the audible tail.
    const double tail_period =
        sample_rate / std::max(std::exp(target_at(static_cast<double>(r.end))),
                               1.0);
    std::vector<double> synth;
    double s = static_cast<double>(epochs.front());
    while (s < r.end + tail_period) {
      synth.push_back(s);
      const double f0 = std::exp(target_at(s));
      s += sample_rate / std::max(f0, 1.0);
      if (synth.size() > static_cast<size_t>(r.end - r.begin)) break;
    }

    // The grains own the region from the first epoch through its end;
    // passing raw signal back in any earlier would mix the original pitch
    // with the imposed one.
    const long core_begin = epochs.front();
    long fade = std::max(4L, std::lround(0.5 * (epochs[1] - epochs[0])));
    fade = std::min(fade, std::max(1L, (r.end - core_begin) / 3));
    for (long n = std::max(0L, core_begin);
         n < std::min(len, r.end + fade); ++n) {
      double b;
      if (n < core_begin + fade) {
        b = 1.0 - static_cast<double>(n - core_begin) / fade;
      } else if (n >= r.end) {
        b = static_cast<double>(n - r.end) / fade;
      } else {
        b = 0.0;
      }
      background[n] = std::min(background[n], b);
    }

    for (double se : synth) {
      // Nearest analysis epoch supplies the two-period grain.
      const auto it = std::lower_bound(epochs.begin(), epochs.end(),
                                       static_cast<long>(std::lround(se)));
      size_t idx = static_cast<size_t>(it - epochs.begin());
      if (idx > 0 &&
          (idx == epochs.size() ||
           std::llabs(epochs[idx] - std::llround(se)) >
               std::llabs(epochs[idx - 1] - std::llround(se))))
        --idx;
      const long a = epochs[idx];
      const long t_left =
          idx > 0 ? a - epochs[idx - 1] : epochs[idx + 1] - epochs[idx];
      const long t_right =
          idx + 1 < epochs.size() ? epochs[idx + 1] - a : t_left;
      const long o = std::lround(se);
      for (long n = -t_left; n <= t_right; ++n) {
        const long pos = o + n;
        if (pos < 0 || pos >= len) continue;
        double w;
        if (n <= 0) {
          w = 0.5 - 0.5 * std::cos(M_PI * (n + t_left) /
                                   static_cast<double>(t_left));
        } else {
          w = 0.5 + 0.5 * std::cos(M_PI * n / static_cast<double>(t_right));
        }
        acc[pos] += SampleOrZero(y, a + n) * w;
        wsum[pos] += w;
      }
    }
  }

  std::vector<float> out(len);
  for (long n = 0; n < len; ++n) {
    const double b = background[n];
    const double denom = wsum[n] + b;
    const double v = denom > 1e-6 ? (acc[n] + y[n] * b) / denom : y[n];
    out[n] = static_cast<float>(std::clamp(v, -1.0, 1.0));
  }
  return out;
}

}  // namespace hpctk
