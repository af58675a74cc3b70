// hpctk/waveform.h

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

#ifndef HPCTK_WAVEFORM_H_
#define HPCTK_WAVEFORM_H_

#include <cstdint>
#include <string>
#include <vector>

namespace hpctk {

// Mono audio buffer.  Samples are in [-1, 1]; sample_rate is in Hz and must
// be at least 8000.
struct Waveform {
  std::vector<float> samples;
  int sample_rate = 0;

  double Duration() const {
    return sample_rate > 0
               ? static_cast<double>(samples.size()) / sample_rate
               : 0.0;
  }
};

// Checks the Waveform invariants (mono is implicit in the type; this verifies
// the sample-rate floor and that all samples are finite).  Throws Error.
void ValidateWaveform(const Waveform &w);

// Reads a RIFF/WAVE file.  Accepts 16-bit PCM and 32-bit IEEE float, single
// channel only; multi-channel input is rejected, not downmixed.  16-bit
// samples are scaled by 1/32768.
Waveform LoadWav(const std::string &path);

// Parses WAV bytes already in memory (same contract as LoadWav).
Waveform ParseWav(const std::string &bytes);

// Writes a 16-bit PCM RIFF/WAVE file.  Samples are clamped to [-1, 1] and
// rounded; the encoding is deterministic.
void SaveWav(const Waveform &w, const std::string &path);

// In-memory counterpart of SaveWav.
std::string EncodeWav(const Waveform &w);

}  // namespace hpctk

#endif  // HPCTK_WAVEFORM_H_
