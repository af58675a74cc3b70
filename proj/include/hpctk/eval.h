// hpctk/eval.h

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

#ifndef HPCTK_EVAL_H_
#define HPCTK_EVAL_H_

#include <string>
#include <vector>

#include "hpctk/hpc.h"

namespace hpctk {

// Objective prosody-similarity summary between two parallel utterances.
//   f0_correlation: Pearson r of the log-f0 contours resampled to a common
//                   200-point axis over each sentence interval.
//   duration_rmse:  RMS difference of per-word durations, seconds.
//   hpc_distance:   mean over levels of the per-phone L2 distance between
//                   the 4-column blocks of the normalized HPC matrices.
//   overall:        mean of (r+1)/2, exp(-rmse/0.05) and exp(-distance).
struct SimilarityReport {
  double f0_correlation = 0.0;
  double duration_rmse = 0.0;
  double hpc_distance = 0.0;
  double overall = 0.0;
  std::vector<std::string> level_names;
  std::vector<double> per_level_distance;
};

SimilarityReport CompareProsody(const Waveform &wav_a,
                                const UtteranceAlignment &align_a,
                                const Waveform &wav_b,
                                const UtteranceAlignment &align_b,
                                const HierarchySpec &hierarchy,
                                const CorpusStats &stats,
                                const PitchConfig &pitch_cfg = {});

std::string SimilarityReportToJson(const SimilarityReport &r);
std::string SimilarityReportToText(const SimilarityReport &r);

// Heuristic forced-alignment sanity checks: suspiciously short phones, very
// long vowels or words, and (when a pitch track is supplied) sonorant phones
// that are mostly unvoiced.
struct AlignmentWarning {
  std::string message;
  int phone_index = -1;  // index into alignment.phones, when applicable
  int word_index = -1;
};

std::vector<AlignmentWarning> AlignmentSanity(
    const UtteranceAlignment &a, const PitchTrack *track = nullptr);

}  // namespace hpctk

#endif  // HPCTK_EVAL_H_
