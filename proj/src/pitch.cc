// hpctk/pitch.cc

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

#include "hpctk/pitch.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hpctk/error.h"
#include "hpctk/mathutil.h"

namespace hpctk {

namespace {

struct Candidate {
  double lag = 0.0;   // samples, parabolic-refined
  double f0 = 0.0;    // Hz
  double value = 0.0; // NCCF peak in [0, 1]
};

// Minimum window energy for a frame to produce candidates at all.  Relative
// to full scale; silence and near-silence yield no voicing hypotheses.
constexpr double kEnergyFloor = 1e-8;

double SampleOrZero(const std::vector<float> &x, long i) {
  return (i >= 0 && i < static_cast<long>(x.size())) ? x[i] : 0.0;
}

// Cumulative energy, so any window energy is two lookups.
struct EnergyPrefix {
  std::vector<double> cum;  // cum[i] = sum of x[j]^2 for j < i

  explicit EnergyPrefix(const std::vector<float> &x) {
    cum.resize(x.size() + 1, 0.0);
    for (size_t i = 0; i < x.size(); ++i)
      cum[i + 1] = cum[i] + static_cast<double>(x[i]) * x[i];
  }
  double WindowEnergy(long begin, long end) const {
    const long n = static_cast<long>(cum.size()) - 1;
    begin = std::clamp(begin, 0L, n);
    end = std::clamp(end, begin, n);
    return cum[end] - cum[begin];
  }
  // A window is "filled" when at least 4 of its 5 sub-blocks carry energy;
  // windows straddling silence edges fail and produce no candidates.
  bool Filled(long begin, int win) const {
    double block[5];
    double peak = 0.0;
    for (int b = 0; b < 5; ++b) {
      block[b] = WindowEnergy(begin + b * win / 5, begin + (b + 1) * win / 5);
      peak = std::max(peak, block[b]);
    }
    if (peak <= 0.0) return false;
    int live = 0;
    for (double b : block)
      if (b >= 0.005 * peak) ++live;
    return live >= 4;
  }
};

// NCCF peaks for one frame.  The window is centered on the frame time; data
// outside the signal reads as zero.
std::vector<Candidate> FrameCandidates(const std::vector<float> &x,
                                       const EnergyPrefix &energy, int sr,
                                       double t_center, int win, int lag_min,
                                       int lag_max, int max_candidates) {
  const long m = std::lround(t_center * sr - win / 2.0);

  const double e0 = energy.WindowEnergy(m, m + win);
  if (e0 < kEnergyFloor * win) return {};
  if (!energy.Filled(m, win)) return {};

  const int num_lags = lag_max - lag_min + 1;
  std::vector<double> nccf(num_lags, 0.0);
  for (int k = lag_min; k <= lag_max; ++k) {
    const double ek = energy.WindowEnergy(m + k, m + k + win);
    if (ek < kEnergyFloor * win) continue;
    // A lag window hanging off the end of speech correlates fragments into
    // spurious near-1 peaks; require comparable, acoustically filled
    // windows.
    if (ek < 0.2 * e0 || e0 < 0.2 * ek) continue;
    if (!energy.Filled(m + k, win)) continue;
    double cross = 0.0;
    for (int n = 0; n < win; ++n)
      cross += SampleOrZero(x, m + n) * SampleOrZero(x, m + k + n);
    nccf[k - lag_min] = cross / std::sqrt(e0 * std::max(ek, 1e-300));
  }

  std::vector<Candidate> cands;
  for (int i = 1; i + 1 < num_lags; ++i) {
    const double y0 = nccf[i - 1], y1 = nccf[i], y2 = nccf[i + 1];
    if (y1 <= 0.0 || y1 < y0 || y1 <= y2) continue;
    // Parabolic refinement of the peak position and height.
    double delta = 0.0;
    const double denom = y0 - 2.0 * y1 + y2;
    if (denom < 0.0) delta = std::clamp(0.5 * (y0 - y2) / denom, -0.5, 0.5);
    const double lag = (lag_min + i) + delta;
    const double value = std::clamp(y1 - 0.25 * (y0 - y2) * delta, 0.0, 1.0);
    Candidate c;
    c.lag = lag;
    c.f0 = static_cast<double>(sr) / lag;
    c.value = value;
    cands.push_back(c);
  }
  std::sort(cands.begin(), cands.end(),
            [](const Candidate &a, const Candidate &b) {
              if (a.value != b.value) return a.value > b.value;
              return a.lag < b.lag;
            });
  if (static_cast<int>(cands.size()) > max_candidates)
    cands.resize(max_candidates);
  return cands;
}

// Frames at voiced-run edges sit on partially covered windows and can lock
// onto arbitrary lags; drop edge frames that disagree wildly with their
// neighbor.
void TrimRunEdges(std::vector<PitchFrame> *frames) {
  constexpr double kMaxEdgeJump = 0.15;  // |delta log f0| per 5 ms
  const int n = static_cast<int>(frames->size());
  int i = 0;
  while (i < n) {
    if (!(*frames)[i].voiced) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 < n && (*frames)[j + 1].voiced) ++j;
    int lo = i, hi = j;
    while (lo < hi &&
           std::fabs(std::log((*frames)[lo].f0 / (*frames)[lo + 1].f0)) >
               kMaxEdgeJump) {
      (*frames)[lo] = PitchFrame{false, 0.0, (*frames)[lo].nccf_peak};
      ++lo;
    }
    while (hi > lo &&
           std::fabs(std::log((*frames)[hi].f0 / (*frames)[hi - 1].f0)) >
               kMaxEdgeJump) {
      (*frames)[hi] = PitchFrame{false, 0.0, (*frames)[hi].nccf_peak};
      --hi;
    }
    i = j + 1;
  }
}

void MedianFilterVoicedRuns(std::vector<PitchFrame> *frames) {
  const std::vector<PitchFrame> in = *frames;
  for (size_t i = 1; i + 1 < in.size(); ++i) {
    if (!in[i - 1].voiced || !in[i].voiced || !in[i + 1].voiced) continue;
    double a = in[i - 1].f0, b = in[i].f0, c = in[i + 1].f0;
    (*frames)[i].f0 = std::max(std::min(a, b), std::min(std::max(a, b), c));
  }
}

}  // namespace

double ContinuousLogF0Track::SampleAt(double t) const {
  if (log_f0.empty()) return 0.0;
  const double u = t / hop_seconds;
  if (u <= 0.0) return log_f0.front();
  const int n = NumFrames();
  if (u >= n - 1) return log_f0.back();
  const int i = static_cast<int>(std::floor(u));
  const double frac = u - i;
  return log_f0[i] + frac * (log_f0[i + 1] - log_f0[i]);
}

PitchTrack TrackPitch(const Waveform &w, const PitchConfig &cfg) {
  ValidateWaveform(w);
  const int sr = w.sample_rate;
  if (cfg.f0_min >= cfg.f0_max)
    throw Error("pitch config: f0_min must be < f0_max");
  if (cfg.f0_max >= sr / 4.0)
    throw Error("pitch config: f0_max must be < sample_rate / 4");

  const int win = std::max(2, static_cast<int>(std::lround(
                                  cfg.window_seconds * sr)));
  if (static_cast<int>(w.samples.size()) < win)
    throw Error("waveform shorter than one analysis window");

  const int lag_min =
      std::max(2, static_cast<int>(std::floor(sr / cfg.f0_max)));
  const int lag_max = static_cast<int>(std::ceil(sr / cfg.f0_min));
  const double duration = w.Duration();
  const int num_frames =
      static_cast<int>(std::floor(duration / kPitchHopSeconds)) + 1;

  const EnergyPrefix energy(w.samples);
  std::vector<std::vector<Candidate>> cands(num_frames);
  for (int t = 0; t < num_frames; ++t) {
    cands[t] = FrameCandidates(w.samples, energy, sr, t * kPitchHopSeconds,
                               win, lag_min, lag_max, cfg.max_candidates);
  }

  // Dynamic programming over per-frame states: state 0 is the unvoiced
  // hypothesis, states 1..C are the NCCF candidates.
  const double uv_local = 1.0 - cfg.voicing_threshold;
  std::vector<std::vector<double>> cost(num_frames);
  std::vector<std::vector<int>> back(num_frames);
  for (int t = 0; t < num_frames; ++t) {
    const int num_states = 1 + static_cast<int>(cands[t].size());
    cost[t].assign(num_states, 0.0);
    back[t].assign(num_states, 0);
    for (int s = 0; s < num_states; ++s) {
      double local;
      if (s == 0) {
        local = uv_local;
      } else {
        const Candidate &c = cands[t][s - 1];
        local = 1.0 - c.value + cfg.lag_bias * (c.lag / lag_max);
      }
      if (t == 0) {
        cost[t][s] = local;
        continue;
      }
      double best = std::numeric_limits<double>::infinity();
      int best_prev = 0;
      const int prev_states = 1 + static_cast<int>(cands[t - 1].size());
      for (int p = 0; p < prev_states; ++p) {
        double trans;
        if (s == 0 && p == 0) {
          trans = 0.0;
        } else if (s == 0 || p == 0) {
          trans = cfg.voicing_transition_cost;
        } else {
          trans = cfg.transition_cost *
                  std::fabs(std::log(cands[t][s - 1].f0 /
                                     cands[t - 1][p - 1].f0));
        }
        const double total = cost[t - 1][p] + trans;
        if (total < best) {
          best = total;
          best_prev = p;
        }
      }
      cost[t][s] = best + local;
      back[t][s] = best_prev;
    }
  }

  PitchTrack track;
  track.frames.resize(num_frames);
  int state = 0;
  {
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < static_cast<int>(cost[num_frames - 1].size()); ++s) {
      if (cost[num_frames - 1][s] < best) {
        best = cost[num_frames - 1][s];
        state = s;
      }
    }
  }
  for (int t = num_frames - 1; t >= 0; --t) {
    PitchFrame &f = track.frames[t];
    f.nccf_peak = cands[t].empty() ? 0.0 : cands[t][0].value;
    if (state > 0) {
      const Candidate &c = cands[t][state - 1];
      f.voiced = true;
      f.f0 = std::clamp(c.f0, cfg.f0_min, cfg.f0_max);
    }
    if (t > 0) state = back[t][state];
  }

  TrimRunEdges(&track.frames);
  if (cfg.median_filter) MedianFilterVoicedRuns(&track.frames);
  return track;
}

ContinuousLogF0Track InterpolateUnvoiced(const PitchTrack &p) {
  const int n = p.NumFrames();
  ContinuousLogF0Track out;
  out.hop_seconds = p.hop_seconds;
  out.log_f0.assign(n, 0.0);
  out.voiced.assign(n, false);

  int first_voiced = -1, last_voiced = -1;
  for (int i = 0; i < n; ++i) {
    if (p.frames[i].voiced) {
      out.voiced[i] = true;
      out.log_f0[i] = std::log(p.frames[i].f0);
      if (first_voiced < 0) first_voiced = i;
      last_voiced = i;
    }
  }
  if (first_voiced < 0) throw Error("unvoiced utterance");

  for (int i = 0; i < first_voiced; ++i)
    out.log_f0[i] = out.log_f0[first_voiced];
  for (int i = last_voiced + 1; i < n; ++i)
    out.log_f0[i] = out.log_f0[last_voiced];

  int prev = first_voiced;
  for (int i = first_voiced + 1; i <= last_voiced; ++i) {
    if (!out.voiced[i]) continue;
    for (int j = prev + 1; j < i; ++j) {
      const double frac =
          static_cast<double>(j - prev) / static_cast<double>(i - prev);
      out.log_f0[j] = out.log_f0[prev] + frac * (out.log_f0[i] - out.log_f0[prev]);
    }
    prev = i;
  }
  return out;
}

double MedianVoicedLogF0(const PitchTrack &p) {
  std::vector<double> v;
  for (const PitchFrame &f : p.frames)
    if (f.voiced) v.push_back(std::log(f.f0));
  if (v.empty()) throw Error("unvoiced utterance");
  return Median(v);
}

double MedianVoicedLogF0(const ContinuousLogF0Track &t) {
  std::vector<double> v;
  for (int i = 0; i < t.NumFrames(); ++i)
    if (t.voiced[i]) v.push_back(t.log_f0[i]);
  if (v.empty()) throw Error("unvoiced utterance");
  return Median(v);
}

}  // namespace hpctk
