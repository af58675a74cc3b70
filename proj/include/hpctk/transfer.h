// hpctk/transfer.h

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

#ifndef HPCTK_TRANSFER_H_
#define HPCTK_TRANSFER_H_

#include <string>
#include <vector>

#include "hpctk/hpc.h"

namespace hpctk {

// d0 imports the HPC sequence and predicts durations with the baseline
// table; d1 additionally imports the source phone durations.
enum class TransferMode { kHpcImport, kHpcAndDurationImport };

const char *TransferModeName(TransferMode mode);             // "d0" / "d1"
TransferMode TransferModeFromName(const std::string &name);

// Everything the transplant stage needs, serializable so planning and
// transplanting can run as separate CLI invocations.  Besides the imported
// controls, the plan keeps the source utterance geometry (phone spans on the
// contour's time axis and the word grouping) for phone-to-phone contour
// warping.
struct TransferPlan {
  TransferMode mode = TransferMode::kHpcAndDurationImport;
  HierarchySpec hierarchy;
  std::vector<std::string> phone_labels;  // non-silence phones, in order
  std::vector<double> phone_durations;    // seconds, strictly positive
  HpcMatrix hpc;                          // normalized
  ContinuousLogF0Track source_contour;
  std::vector<double> source_phone_start;  // seconds on the contour axis
  std::vector<double> source_phone_end;
  std::vector<int> word_index;  // per non-silence phone
};

void ValidateTransferPlan(const TransferPlan &plan);

// Baseline duration predictor: per-label mean from the stats table; unknown
// labels fall back to the global mean and emit a warning.
struct DurationPrediction {
  std::vector<double> durations;
  std::vector<std::string> warnings;
};
DurationPrediction PredictDurationsBaseline(
    const std::vector<std::string> &phones, const CorpusStats &stats);

// Builds a plan from a source recording under the parallel-text contract:
// the source's non-silence phone sequence must equal target_phones exactly.
// HPCs are extracted in unseen-speaker mode.
TransferPlan PlanTransfer(const Waveform &source,
                          const UtteranceAlignment &source_align,
                          const std::vector<std::string> &target_phones,
                          TransferMode mode, const HierarchySpec &hierarchy,
                          const CorpusStats &stats,
                          const PitchConfig &pitch_cfg = {},
                          std::vector<std::string> *warnings = nullptr);

struct TransplantResult {
  Waveform audio;
  // Output phone/word/syllable boundaries: carrier silences are unchanged,
  // non-silence phones sit at the plan durations.
  UtteranceAlignment alignment;
};

// Deterministic DSP transplant: per-phone WSOLA time-scaling to the plan
// durations, then pitch-synchronous imposition of the plan's source contour,
// warped phone-to-phone onto the new time axis, limited to the detail the
// plan's finest hierarchy level carries, and shifted in the log domain so its
// median matches the carrier's median log-f0.
TransplantResult Transplant(const Waveform &carrier,
                            const UtteranceAlignment &carrier_align,
                            const TransferPlan &plan,
                            const PitchConfig &pitch_cfg = {});

std::string TransferPlanToJson(const TransferPlan &plan);
TransferPlan TransferPlanFromJson(const std::string &json_text);
void SaveTransferPlan(const TransferPlan &plan, const std::string &path);
TransferPlan LoadTransferPlan(const std::string &path);

}  // namespace hpctk

#endif  // HPCTK_TRANSFER_H_
