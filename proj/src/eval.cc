// hpctk/eval.cc

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

#include "hpctk/eval.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hpctk/error.h"
#include "hpctk/mathutil.h"
#include "json.hpp"

namespace hpctk {

namespace {

constexpr int kContourPoints = 200;
constexpr double kDurationRmseScale = 0.05;  // seconds
constexpr double kTimeEps = 1e-9;

std::vector<double> ResampleSentenceContour(const ContinuousLogF0Track &track,
                                            const UtteranceAlignment &a) {
  std::vector<double> out(kContourPoints);
  const double span = a.sentence_end - a.sentence_start;
  for (int i = 0; i < kContourPoints; ++i) {
    const double t =
        a.sentence_start + span * i / static_cast<double>(kContourPoints - 1);
    out[i] = track.SampleAt(t);
  }
  return out;
}

}  // namespace

SimilarityReport CompareProsody(const Waveform &wav_a,
                                const UtteranceAlignment &align_a,
                                const Waveform &wav_b,
                                const UtteranceAlignment &align_b,
                                const HierarchySpec &hierarchy,
                                const CorpusStats &stats,
                                const PitchConfig &pitch_cfg) {
  ValidateHierarchy(hierarchy);
  {
    std::vector<std::string> la, lb;
    for (int pi : align_a.NonSilencePhones()) la.push_back(align_a.phones[pi].label);
    for (int pi : align_b.NonSilencePhones()) lb.push_back(align_b.phones[pi].label);
    const size_t n = std::min(la.size(), lb.size());
    for (size_t i = 0; i < n; ++i)
      if (la[i] != lb[i])
        throw Error("phone sequence mismatch at index " + std::to_string(i) +
                    ": '" + la[i] + "' vs '" + lb[i] + "'");
    if (la.size() != lb.size())
      throw Error("phone sequence mismatch: " + std::to_string(la.size()) +
                  " vs " + std::to_string(lb.size()) + " phones");
  }
  if (align_a.words.size() != align_b.words.size())
    throw Error("word count mismatch: " + std::to_string(align_a.words.size()) +
                " vs " + std::to_string(align_b.words.size()));

  const ContinuousLogF0Track track_a =
      InterpolateUnvoiced(TrackPitch(wav_a, pitch_cfg));
  const ContinuousLogF0Track track_b =
      InterpolateUnvoiced(TrackPitch(wav_b, pitch_cfg));

  SimilarityReport r;
  r.f0_correlation = PearsonCorrelation(
      ResampleSentenceContour(track_a, align_a),
      ResampleSentenceContour(track_b, align_b));

  double sq = 0.0;
  for (size_t w = 0; w < align_a.words.size(); ++w) {
    const double da = align_a.words[w].end - align_a.words[w].start;
    const double db = align_b.words[w].end - align_b.words[w].start;
    sq += (da - db) * (da - db);
  }
  r.duration_rmse = std::sqrt(sq / static_cast<double>(align_a.words.size()));

  const HpcMatrix ma = ExtractHpc(wav_a, align_a, hierarchy, stats,
                                  SpeakerMode::Unseen(), pitch_cfg);
  const HpcMatrix mb = ExtractHpc(wav_b, align_b, hierarchy, stats,
                                  SpeakerMode::Unseen(), pitch_cfg);
  const int rows = ma.values.rows;
  double level_sum = 0.0;
  for (int li = 0; li < hierarchy.NumLevels(); ++li) {
    double acc = 0.0;
    for (int row = 0; row < rows; ++row) {
      double sq_row = 0.0;
      for (int c = 0; c < 4; ++c) {
        const double d =
            ma.values.At(row, 4 * li + c) - mb.values.At(row, 4 * li + c);
        sq_row += d * d;
      }
      acc += std::sqrt(sq_row);
    }
    const double level_mean = rows > 0 ? acc / rows : 0.0;
    r.level_names.push_back(LevelName(hierarchy.levels[li]));
    r.per_level_distance.push_back(level_mean);
    level_sum += level_mean;
  }
  r.hpc_distance = level_sum / hierarchy.NumLevels();

  r.overall = ((r.f0_correlation + 1.0) / 2.0 +
               std::exp(-r.duration_rmse / kDurationRmseScale) +
               std::exp(-r.hpc_distance)) /
              3.0;
  return r;
}

std::string SimilarityReportToJson(const SimilarityReport &r) {
  nlohmann::json j;
  j["f0_correlation"] = r.f0_correlation;
  j["duration_rmse"] = r.duration_rmse;
  j["hpc_distance"] = r.hpc_distance;
  j["overall"] = r.overall;
  nlohmann::json per_level = nlohmann::json::object();
  for (size_t i = 0; i < r.level_names.size(); ++i)
    per_level[r.level_names[i]] = r.per_level_distance[i];
  j["per_level_distance"] = std::move(per_level);
  return j.dump(2) + "\n";
}

std::string SimilarityReportToText(const SimilarityReport &r) {
  std::ostringstream out;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%-18s %12.6f\n", "f0_correlation",
                r.f0_correlation);
  out << buf;
  std::snprintf(buf, sizeof(buf), "%-18s %12.6f\n", "duration_rmse",
                r.duration_rmse);
  out << buf;
  std::snprintf(buf, sizeof(buf), "%-18s %12.6f\n", "hpc_distance",
                r.hpc_distance);
  out << buf;
  for (size_t i = 0; i < r.level_names.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%-18s %12.6f\n",
                  ("  " + r.level_names[i]).c_str(), r.per_level_distance[i]);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "%-18s %12.6f\n", "overall", r.overall);
  out << buf;
  return out.str();
}

std::vector<AlignmentWarning> AlignmentSanity(const UtteranceAlignment &a,
                                              const PitchTrack *track) {
  std::vector<AlignmentWarning> warnings;
  for (int pi = 0; pi < static_cast<int>(a.phones.size()); ++pi) {
    const PhoneInterval &p = a.phones[pi];
    if (p.is_silence) continue;
    const double dur = p.end - p.start;
    if (dur < 0.020) {
      warnings.push_back({"phone '" + p.label + "' is only " +
                              std::to_string(static_cast<int>(dur * 1000)) +
                              " ms long",
                          pi, p.word_index});
    }
    if (IsVowelLabel(p.label) && dur > 0.400) {
      warnings.push_back(
          {"vowel '" + p.label + "' is longer than 400 ms", pi, p.word_index});
    }
    if (track != nullptr) {
      const double hop = track->hop_seconds;
      int begin = static_cast<int>(std::ceil((p.start - kTimeEps) / hop));
      int stop = static_cast<int>(std::ceil((p.end - kTimeEps) / hop));
      begin = std::clamp(begin, 0, track->NumFrames());
      stop = std::clamp(stop, 0, track->NumFrames());
      if (stop > begin && IsSonorantLabel(p.label)) {
        int unvoiced = 0;
        for (int i = begin; i < stop; ++i)
          if (!track->frames[i].voiced) ++unvoiced;
        if (unvoiced * 2 > stop - begin) {
          warnings.push_back({"sonorant phone '" + p.label +
                                  "' is mostly unvoiced",
                              pi, p.word_index});
        }
      }
    }
  }
  for (int wi = 0; wi < static_cast<int>(a.words.size()); ++wi) {
    const WordInterval &w = a.words[wi];
    if (w.end - w.start > 2.0) {
      warnings.push_back(
          {"word '" + w.label + "' is longer than 2 s", -1, wi});
    }
  }
  return warnings;
}

}  // namespace hpctk
