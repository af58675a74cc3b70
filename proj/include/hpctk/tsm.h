// hpctk/tsm.h

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

#ifndef HPCTK_TSM_H_
#define HPCTK_TSM_H_

#include <vector>

#include "hpctk/pitch.h"

namespace hpctk {

// Piecewise-linear sample-domain time warp.  Segments are contiguous in both
// domains; each maps [src_begin, src_end) linearly onto [out_begin, out_end).
struct TimeMapSegment {
  long src_begin = 0;
  long src_end = 0;
  long out_begin = 0;
  long out_end = 0;
};

struct TimeMap {
  std::vector<TimeMapSegment> segments;

  long SourceLength() const;
  long OutputLength() const;
  double ToSource(double out_pos) const;  // sample positions
  double ToOutput(double src_pos) const;
};

struct WsolaConfig {
  double window_seconds = 0.025;
  double search_seconds = 0.005;  // +/- similarity search range
};

// Waveform-similarity overlap-add time-scale modification along `map`.
// Pitch is preserved; an identity map reproduces the input (up to window
// normalization at the edges).  Deterministic.
std::vector<float> Wsola(const std::vector<float> &x, int sample_rate,
                         const TimeMap &map, const WsolaConfig &cfg = {});

// Pitch-synchronous overlap-add: re-spaces the periods of the voiced regions
// of `y` so the output follows exp(target_log_f0) (one value per 5 ms frame
// on y's grid).  `current` is the interpolated track of y itself and supplies
// the voicing decisions and analysis period estimates.  Unvoiced regions are
// passed through; timing is unchanged.
std::vector<float> ImposePitchContour(const std::vector<float> &y,
                                      int sample_rate,
                                      const ContinuousLogF0Track &current,
                                      const std::vector<double> &target_log_f0);

}  // namespace hpctk

#endif  // HPCTK_TSM_H_
