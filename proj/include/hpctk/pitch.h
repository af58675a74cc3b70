// hpctk/pitch.h

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

#ifndef HPCTK_PITCH_H_
#define HPCTK_PITCH_H_

#include <vector>

#include "hpctk/waveform.h"

namespace hpctk {

// All pitch analysis runs on a fixed 5 ms frame grid; frame i sits at time
// i * kPitchHopSeconds and the track has floor(duration / hop) + 1 frames.
constexpr double kPitchHopSeconds = 0.005;

struct PitchConfig {
  double f0_min = 55.0;   // Hz
  double f0_max = 500.0;  // Hz
  // A frame whose best NCCF peak falls below this is biased toward unvoiced.
  double voicing_threshold = 0.3;

  // NCCF correlation window length.
  double window_seconds = 0.025;
  // NCCF peak candidates kept per frame.
  int max_candidates = 10;
  // Voiced->voiced transition cost per unit |delta log f0|.
  double transition_cost = 0.35;
  // Cost of switching between voiced and unvoiced between frames.
  double voicing_transition_cost = 0.15;
  // Per-candidate penalty proportional to lag / max_lag; breaks octave ties
  // toward the shorter lag.
  double lag_bias = 0.02;
  // Optional 3-frame median smoothing of voiced f0 runs (off by default).
  bool median_filter = false;
};

struct PitchFrame {
  bool voiced = false;
  double f0 = 0.0;        // Hz; valid when voiced
  double nccf_peak = 0.0; // [0, 1]
};

struct PitchTrack {
  double hop_seconds = kPitchHopSeconds;
  std::vector<PitchFrame> frames;

  int NumFrames() const { return static_cast<int>(frames.size()); }
};

// Fixed-grid log-f0 trajectory with no gaps: voiced frames carry log(f0) and
// unvoiced frames carry linearly interpolated (or edge-held) values.
struct ContinuousLogF0Track {
  double hop_seconds = kPitchHopSeconds;
  std::vector<double> log_f0;
  std::vector<bool> voiced;

  int NumFrames() const { return static_cast<int>(log_f0.size()); }
  // Piecewise-linear evaluation between frame centers, clamped at the ends.
  double SampleAt(double t) const;
};

// RAPT-style f0 estimation: per-frame NCCF candidate peaks (with parabolic
// lag refinement) followed by dynamic-programming path selection over
// candidate + unvoiced states.  Deterministic for identical inputs.
//
// Requires cfg.f0_min < cfg.f0_max, cfg.f0_max < sample_rate / 4, and the
// waveform to be at least one analysis window long.
PitchTrack TrackPitch(const Waveform &w, const PitchConfig &cfg = {});

// Builds the continuous log-f0 trajectory: voiced frames are log(f0),
// interior unvoiced gaps are linearly interpolated in the log domain, and
// leading/trailing unvoiced runs hold the nearest voiced value.  Throws if no
// frame is voiced.
ContinuousLogF0Track InterpolateUnvoiced(const PitchTrack &p);

// Median of log(f0) over voiced frames (linear-interpolation percentile
// convention).  Throws if no frame is voiced.
double MedianVoicedLogF0(const PitchTrack &p);
double MedianVoicedLogF0(const ContinuousLogF0Track &t);

}  // namespace hpctk

#endif  // HPCTK_PITCH_H_
