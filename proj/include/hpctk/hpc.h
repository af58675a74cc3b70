// hpctk/hpc.h

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

#ifndef HPCTK_HPC_H_
#define HPCTK_HPC_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hpctk/alignment.h"
#include "hpctk/pitch.h"
#include "hpctk/waveform.h"

namespace hpctk {

// ---------------------------------------------------------------------------
// Hierarchy

enum class Level { kSentence = 0, kWord = 1, kSyllable = 2, kPhone = 3 };

const char *LevelName(Level level);
Level LevelFromName(const std::string &name);

// Ordered list of temporal levels, coarsest first.  Must start at sentence,
// strictly increase in granularity, and contain 1..4 levels.
struct HierarchySpec {
  std::vector<Level> levels;

  int NumLevels() const { return static_cast<int>(levels.size()); }
  int NumColumns() const { return 4 * NumLevels(); }
  Level Finest() const { return levels.back(); }
  bool operator==(const HierarchySpec &o) const = default;

  // Presets: hpc0 = (sentence, word); hpc1 = (sentence, word, syllable);
  // hpc2 = (sentence, word, phone).
  static HierarchySpec Preset(const std::string &name);
};

void ValidateHierarchy(const HierarchySpec &h);

// Column names, 4 per level: <level>_{dur, df0, f0, slopef0}, with "res"
// appended on residual blocks (every block after the first), e.g.
// sentence_dur, word_durres, word_f0res.
std::vector<std::string> HpcColumnNames(const HierarchySpec &h);

// ---------------------------------------------------------------------------
// Matrices

// Dense row-major matrix of doubles; small enough for desk-scale corpora.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c) {}

  double &At(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double At(int r, int c) const {
    return data[static_cast<size_t>(r) * cols + c];
  }
};

// The four prosodic measurements of one interval.
struct IntervalMeasurements {
  double dur = 0.0;       // log mean non-silence phone duration (log-seconds)
  double delta_f0 = 0.0;  // P95 - P5 of log-f0 over the interval's frames
  double f0 = 0.0;        // median log-f0 minus the speaker median log-f0
  double slope_f0 = 0.0;  // least-squares log-f0 slope (per second)
};

// N_phones x (4 * |levels|) control matrix: the first 4-column block holds
// the sentence-level measurements, each further block the residual against
// the previous level.
struct HpcMatrix {
  Matrix values;
  HierarchySpec hierarchy;
  bool normalized = false;
};

// Global normalization statistics plus the per-speaker median log-f0 table
// and the per-phone-label mean duration table used by the baseline duration
// predictor.
struct CorpusStats {
  HierarchySpec hierarchy;
  std::vector<double> mu;     // per column
  std::vector<double> sigma;  // per column, population convention, all > 0
  std::map<std::string, double> speaker_median_logf0;
  std::map<std::string, double> phone_mean_duration;
  double global_mean_duration = 0.0;
};

// ---------------------------------------------------------------------------
// Measurement pipeline

// Measures one interval of the hierarchy.  `phones` lists the interval's
// non-silence phones (used for the duration average); frames of `track`
// falling in [start, end) provide the f0 statistics.  The slope time axis is
// seconds from the interval start.
IntervalMeasurements MeasureInterval(const ContinuousLogF0Track &track,
                                     double start, double end,
                                     const std::vector<PhoneInterval> &phones,
                                     double speaker_median_logf0);

// Per-phone 4-column block for one level: the row of each non-silence phone
// is the measurement of the level interval containing it.
Matrix PropagateLevel(const ContinuousLogF0Track &track,
                      const UtteranceAlignment &a, Level level,
                      double speaker_median_logf0);

// Residual-hierarchy assembly: first block verbatim, every further block
// replaced by its
// difference with the previous level's block.
Matrix BuildResidual(const std::vector<Matrix> &blocks);

// Inverse of BuildResidual: prefix-sums the 4-column groups back to the
// absolute per-level blocks.
std::vector<Matrix> ReconstructAbsoluteBlocks(const Matrix &p,
                                              const HierarchySpec &h);

// Global normalization: column k maps to (p_k - mu_k) / (3 sigma_k).
HpcMatrix Normalize(const Matrix &p, const HierarchySpec &h,
                    const CorpusStats &stats);
Matrix Denormalize(const HpcMatrix &phat, const CorpusStats &stats);

// How the speaker median log-f0 is obtained: from the stats table for seen
// speakers, from the utterance's own voiced frames for unseen ones.
struct SpeakerMode {
  bool seen = false;
  std::string speaker_id;

  static SpeakerMode Unseen() { return {}; }
  static SpeakerMode Seen(std::string id) { return {true, std::move(id)}; }
};

// Raw (unnormalized) extraction entry points.
Matrix ExtractRawHpcFromTrack(const ContinuousLogF0Track &track,
                              const UtteranceAlignment &a,
                              const HierarchySpec &h,
                              double speaker_median_logf0);
Matrix ExtractRawHpc(const Waveform &w, const UtteranceAlignment &a,
                     const HierarchySpec &h, const SpeakerMode &mode,
                     const CorpusStats *stats = nullptr,
                     const PitchConfig &pitch_cfg = {});

// Full pipeline: track -> measure -> propagate -> residual -> normalize.
HpcMatrix ExtractHpc(const Waveform &w, const UtteranceAlignment &a,
                     const HierarchySpec &h, const CorpusStats &stats,
                     const SpeakerMode &mode, const PitchConfig &pitch_cfg = {});

// ---------------------------------------------------------------------------
// Corpus statistics

// Mergeable per-column moment accumulator (Chan's parallel update), so
// corpus accumulation is associative/commutative up to float reassociation.
struct ColumnMoments {
  long long count = 0;
  std::vector<double> mean;
  std::vector<double> m2;

  explicit ColumnMoments(int cols = 0) : mean(cols, 0.0), m2(cols, 0.0) {}
  void AddRow(const double *row);
  void Merge(const ColumnMoments &other);
};

struct UtteranceStatsInput {
  std::string speaker_id;
  Matrix raw;  // unnormalized P matrix
  std::vector<double> voiced_log_f0;  // voiced frames, for the median table
  // (label, duration) of non-silence phones, for the duration table.
  std::vector<std::pair<std::string, double>> phone_durations;
};

// Pools all phone rows of all utterances for mu/sigma (population standard
// deviation), pools voiced frames per speaker for the median table, and
// averages durations per phone label.  Requires >= 2 utterances; any column
// with sigma == 0 is rejected with the column named.
CorpusStats ComputeCorpusStats(const std::vector<UtteranceStatsInput> &corpus,
                               const HierarchySpec &h);

// ---------------------------------------------------------------------------
// Files

// Stats JSON with hierarchy, mu, sigma, speaker medians, duration table and
// the conventions that make the numbers reproducible.
std::string CorpusStatsToJson(const CorpusStats &stats);
CorpusStats CorpusStatsFromJson(const std::string &json_text);
void SaveCorpusStats(const CorpusStats &stats, const std::string &path);
CorpusStats LoadCorpusStats(const std::string &path);

// Matrix files: CSV has a mandatory header naming the columns (see
// HpcColumnNames) and one row per non-silence phone; unnormalized output is
// flagged with a leading '#' comment.  JSON carries the same content.
std::string HpcMatrixToCsv(const HpcMatrix &m);
std::string HpcMatrixToJson(const HpcMatrix &m);
HpcMatrix HpcMatrixFromJson(const std::string &json_text);

}  // namespace hpctk

#endif  // HPCTK_HPC_H_
