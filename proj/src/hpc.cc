// hpctk/hpc.cc

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

#include "hpctk/hpc.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hpctk/error.h"
#include "hpctk/mathutil.h"
#include "json.hpp"

namespace hpctk {

namespace {

constexpr double kTimeEps = 1e-9;

const char *const kMeasureNames[4] = {"dur", "df0", "f0", "slopef0"};

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Frame index range [begin, end) of track frames whose center lies in
// [start, end).
std::pair<int, int> FrameRange(const ContinuousLogF0Track &track, double start,
                               double end) {
  const double hop = track.hop_seconds;
  int begin = static_cast<int>(std::ceil((start - kTimeEps) / hop));
  int stop = static_cast<int>(std::ceil((end - kTimeEps) / hop));
  begin = std::clamp(begin, 0, track.NumFrames());
  stop = std::clamp(stop, 0, track.NumFrames());
  return {begin, stop};
}

}  // namespace

// ---------------------------------------------------------------------------
// Hierarchy

const char *LevelName(Level level) {
  switch (level) {
    case Level::kSentence: return "sentence";
    case Level::kWord: return "word";
    case Level::kSyllable: return "syllable";
    case Level::kPhone: return "phone";
  }
  return "?";
}

Level LevelFromName(const std::string &name) {
  if (name == "sentence") return Level::kSentence;
  if (name == "word") return Level::kWord;
  if (name == "syllable") return Level::kSyllable;
  if (name == "phone") return Level::kPhone;
  throw Error("unknown hierarchy level '" + name + "'");
}

HierarchySpec HierarchySpec::Preset(const std::string &name) {
  if (name == "hpc0")
    return {{Level::kSentence, Level::kWord}};
  if (name == "hpc1")
    return {{Level::kSentence, Level::kWord, Level::kSyllable}};
  if (name == "hpc2")
    return {{Level::kSentence, Level::kWord, Level::kPhone}};
  throw Error("unknown hierarchy preset '" + name +
              "' (expected hpc0, hpc1 or hpc2)");
}

void ValidateHierarchy(const HierarchySpec &h) {
  if (h.levels.empty() || h.levels.size() > 4)
    throw Error("hierarchy must contain 1 to 4 levels");
  if (h.levels.front() != Level::kSentence)
    throw Error("hierarchy must start at the sentence level");
  for (size_t i = 0; i + 1 < h.levels.size(); ++i) {
    if (static_cast<int>(h.levels[i + 1]) <= static_cast<int>(h.levels[i]))
      throw Error("hierarchy levels must strictly increase in granularity");
  }
}

std::vector<std::string> HpcColumnNames(const HierarchySpec &h) {
  std::vector<std::string> names;
  for (size_t li = 0; li < h.levels.size(); ++li) {
    for (const char *m : kMeasureNames) {
      std::string name = std::string(LevelName(h.levels[li])) + "_" + m;
      if (li > 0) name += "res";
      names.push_back(std::move(name));
    }
  }
  return names;
}

// ---------------------------------------------------------------------------
// Measurement

IntervalMeasurements MeasureInterval(const ContinuousLogF0Track &track,
                                     double start, double end,
                                     const std::vector<PhoneInterval> &phones,
                                     double speaker_median_logf0) {
  const auto [begin, stop] = FrameRange(track, start, end);
  if (stop <= begin)
    throw Error("interval [" + std::to_string(start) + ", " +
                std::to_string(end) + "] covers no pitch frames");

  double dur_sum = 0.0;
  int dur_count = 0;
  for (const auto &p : phones) {
    if (p.is_silence) continue;
    dur_sum += p.end - p.start;
    ++dur_count;
  }
  if (dur_count == 0)
    throw Error("interval [" + std::to_string(start) + ", " +
                std::to_string(end) + "] contains no non-silence phones");

  std::vector<double> values(track.log_f0.begin() + begin,
                             track.log_f0.begin() + stop);
  std::vector<double> times(values.size());
  for (size_t i = 0; i < values.size(); ++i)
    times[i] = (begin + static_cast<int>(i)) * track.hop_seconds - start;

  IntervalMeasurements m;
  m.dur = std::log(dur_sum / dur_count);
  m.delta_f0 = Percentile(values, 95.0) - Percentile(values, 5.0);
  m.f0 = Median(values) - speaker_median_logf0;
  m.slope_f0 = LeastSquaresSlope(times, values);
  return m;
}

Matrix PropagateLevel(const ContinuousLogF0Track &track,
                      const UtteranceAlignment &a, Level level,
                      double speaker_median_logf0) {
  const std::vector<int> content = a.NonSilencePhones();
  const int n = static_cast<int>(content.size());
  Matrix block(n, 4);

  // Row index of each phone in the non-silence ordering.
  std::vector<int> row_of(a.phones.size(), -1);
  for (int r = 0; r < n; ++r) row_of[content[r]] = r;

  auto write_rows = [&](const IntervalMeasurements &m,
                        const std::vector<int> &phone_indices) {
    for (int pi : phone_indices) {
      const int r = row_of[pi];
      if (r < 0) continue;
      block.At(r, 0) = m.dur;
      block.At(r, 1) = m.delta_f0;
      block.At(r, 2) = m.f0;
      block.At(r, 3) = m.slope_f0;
    }
  };

  std::vector<bool> covered(n, false);
  auto mark = [&](const std::vector<int> &phone_indices) {
    for (int pi : phone_indices)
      if (row_of[pi] >= 0) covered[row_of[pi]] = true;
  };

  switch (level) {
    case Level::kSentence: {
      std::vector<PhoneInterval> all;
      for (int pi : content) all.push_back(a.phones[pi]);
      const auto m = MeasureInterval(track, a.sentence_start, a.sentence_end,
                                     all, speaker_median_logf0);
      write_rows(m, content);
      mark(content);
      break;
    }
    case Level::kWord: {
      for (const auto &w : a.words) {
        std::vector<PhoneInterval> members;
        for (int pi : w.phone_indices) members.push_back(a.phones[pi]);
        const auto m = MeasureInterval(track, w.start, w.end, members,
                                       speaker_median_logf0);
        write_rows(m, w.phone_indices);
        mark(w.phone_indices);
      }
      break;
    }
    case Level::kSyllable: {
      for (const auto &s : a.syllables) {
        std::vector<PhoneInterval> members;
        for (int pi : s.phone_indices) members.push_back(a.phones[pi]);
        const auto m = MeasureInterval(track, s.start, s.end, members,
                                       speaker_median_logf0);
        write_rows(m, s.phone_indices);
        mark(s.phone_indices);
      }
      break;
    }
    case Level::kPhone: {
      for (int pi : content) {
        const auto m =
            MeasureInterval(track, a.phones[pi].start, a.phones[pi].end,
                            {a.phones[pi]}, speaker_median_logf0);
        write_rows(m, {pi});
        mark({pi});
      }
      break;
    }
  }

  for (int r = 0; r < n; ++r) {
    if (!covered[r])
      throw Error("phone row " + std::to_string(r) + " is not covered by any " +
                  LevelName(level) + "-level interval");
  }
  return block;
}

Matrix BuildResidual(const std::vector<Matrix> &blocks) {
  if (blocks.empty()) throw Error("residual construction needs >= 1 block");
  const int rows = blocks[0].rows;
  for (const auto &b : blocks) {
    if (b.cols != 4) throw Error("level blocks must have 4 columns");
    if (b.rows != rows)
      throw Error("level blocks disagree on phone count: " +
                  std::to_string(b.rows) + " vs " + std::to_string(rows));
  }
  Matrix p(rows, 4 * static_cast<int>(blocks.size()));
  for (size_t li = 0; li < blocks.size(); ++li) {
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < 4; ++c) {
        double v = blocks[li].At(r, c);
        if (li > 0) v -= blocks[li - 1].At(r, c);
        p.At(r, 4 * static_cast<int>(li) + c) = v;
      }
    }
  }
  return p;
}

std::vector<Matrix> ReconstructAbsoluteBlocks(const Matrix &p,
                                              const HierarchySpec &h) {
  if (p.cols != h.NumColumns())
    throw Error("matrix does not match the hierarchy");
  std::vector<Matrix> blocks;
  for (int li = 0; li < h.NumLevels(); ++li) {
    Matrix b(p.rows, 4);
    for (int r = 0; r < p.rows; ++r) {
      for (int c = 0; c < 4; ++c) {
        double v = p.At(r, 4 * li + c);
        if (li > 0) v += blocks[li - 1].At(r, c);
        b.At(r, c) = v;
      }
    }
    blocks.push_back(std::move(b));
  }
  return blocks;
}

HpcMatrix Normalize(const Matrix &p, const HierarchySpec &h,
                    const CorpusStats &stats) {
  if (p.cols != static_cast<int>(stats.mu.size()) ||
      p.cols != h.NumColumns())
    throw Error("normalize: column count does not match the statistics");
  if (!(stats.hierarchy == h))
    throw Error("normalize: hierarchy does not match the statistics");
  HpcMatrix out;
  out.hierarchy = h;
  out.normalized = true;
  out.values = Matrix(p.rows, p.cols);
  for (int c = 0; c < p.cols; ++c) {
    if (!(stats.sigma[c] > 0.0))
      throw Error("normalize: sigma must be positive in column " +
                  HpcColumnNames(h)[c]);
    const double inv = 1.0 / (3.0 * stats.sigma[c]);
    for (int r = 0; r < p.rows; ++r)
      out.values.At(r, c) = (p.At(r, c) - stats.mu[c]) * inv;
  }
  return out;
}

Matrix Denormalize(const HpcMatrix &phat, const CorpusStats &stats) {
  if (phat.values.cols != static_cast<int>(stats.mu.size()))
    throw Error("denormalize: column count does not match the statistics");
  Matrix out(phat.values.rows, phat.values.cols);
  for (int c = 0; c < out.cols; ++c) {
    for (int r = 0; r < out.rows; ++r)
      out.At(r, c) = phat.values.At(r, c) * 3.0 * stats.sigma[c] + stats.mu[c];
  }
  return out;
}

Matrix ExtractRawHpcFromTrack(const ContinuousLogF0Track &track,
                              const UtteranceAlignment &a,
                              const HierarchySpec &h,
                              double speaker_median_logf0) {
  ValidateHierarchy(h);
  std::vector<Matrix> blocks;
  for (Level level : h.levels)
    blocks.push_back(PropagateLevel(track, a, level, speaker_median_logf0));
  return BuildResidual(blocks);
}

Matrix ExtractRawHpc(const Waveform &w, const UtteranceAlignment &a,
                     const HierarchySpec &h, const SpeakerMode &mode,
                     const CorpusStats *stats, const PitchConfig &pitch_cfg) {
  if (a.sentence_end > w.Duration() + kTimeEps)
    throw Error("alignment extends past the end of the waveform");
  const PitchTrack pt = TrackPitch(w, pitch_cfg);
  const ContinuousLogF0Track track = InterpolateUnvoiced(pt);
  double median;
  if (mode.seen) {
    if (stats == nullptr)
      throw Error("seen-speaker extraction requires corpus statistics");
    const auto it = stats->speaker_median_logf0.find(mode.speaker_id);
    if (it == stats->speaker_median_logf0.end())
      throw Error("speaker '" + mode.speaker_id +
                  "' not present in the statistics file");
    median = it->second;
  } else {
    median = MedianVoicedLogF0(track);
  }
  return ExtractRawHpcFromTrack(track, a, h, median);
}

HpcMatrix ExtractHpc(const Waveform &w, const UtteranceAlignment &a,
                     const HierarchySpec &h, const CorpusStats &stats,
                     const SpeakerMode &mode, const PitchConfig &pitch_cfg) {
  const Matrix raw = ExtractRawHpc(w, a, h, mode, &stats, pitch_cfg);
  return Normalize(raw, h, stats);
}

// ---------------------------------------------------------------------------
// Corpus statistics

void ColumnMoments::AddRow(const double *row) {
  ++count;
  for (size_t c = 0; c < mean.size(); ++c) {
    const double delta = row[c] - mean[c];
    mean[c] += delta / static_cast<double>(count);
    m2[c] += delta * (row[c] - mean[c]);
  }
}

void ColumnMoments::Merge(const ColumnMoments &other) {
  if (other.count == 0) return;
  if (count == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count);
  const double nb = static_cast<double>(other.count);
  const double n = na + nb;
  for (size_t c = 0; c < mean.size(); ++c) {
    const double delta = other.mean[c] - mean[c];
    mean[c] += delta * nb / n;
    m2[c] += other.m2[c] + delta * delta * na * nb / n;
  }
  count += other.count;
}

CorpusStats ComputeCorpusStats(const std::vector<UtteranceStatsInput> &corpus,
                               const HierarchySpec &h) {
  ValidateHierarchy(h);
  if (corpus.size() < 2)
    throw Error("corpus statistics require at least 2 utterances, got " +
                std::to_string(corpus.size()));

  ColumnMoments moments(h.NumColumns());
  std::map<std::string, std::vector<double>> speaker_frames;
  std::map<std::string, std::pair<double, long long>> label_durations;
  double dur_sum = 0.0;
  long long dur_count = 0;

  for (const auto &u : corpus) {
    if (u.raw.cols != h.NumColumns())
      throw Error("utterance matrix does not match the hierarchy (" +
                  std::to_string(u.raw.cols) + " columns, expected " +
                  std::to_string(h.NumColumns()) + ")");
    for (int r = 0; r < u.raw.rows; ++r)
      moments.AddRow(&u.raw.data[static_cast<size_t>(r) * u.raw.cols]);
    auto &frames = speaker_frames[u.speaker_id];
    frames.insert(frames.end(), u.voiced_log_f0.begin(),
                  u.voiced_log_f0.end());
    for (const auto &[label, dur] : u.phone_durations) {
      auto &agg = label_durations[label];
      agg.first += dur;
      agg.second += 1;
      dur_sum += dur;
      ++dur_count;
    }
  }
  if (moments.count == 0) throw Error("empty corpus");

  CorpusStats stats;
  stats.hierarchy = h;
  stats.mu = moments.mean;
  stats.sigma.resize(h.NumColumns());
  const auto names = HpcColumnNames(h);
  for (int c = 0; c < h.NumColumns(); ++c) {
    const double var =
        std::max(0.0, moments.m2[c] / static_cast<double>(moments.count));
    stats.sigma[c] = std::sqrt(var);
    if (!(stats.sigma[c] > 0.0))
      throw Error("degenerate corpus: column " + names[c] +
                  " has zero standard deviation");
  }
  for (auto &[speaker, frames] : speaker_frames) {
    if (frames.empty())
      throw Error("speaker '" + speaker + "' has no voiced frames");
    stats.speaker_median_logf0[speaker] = Median(frames);
  }
  for (const auto &[label, agg] : label_durations)
    stats.phone_mean_duration[label] =
        agg.first / static_cast<double>(agg.second);
  if (dur_count > 0)
    stats.global_mean_duration = dur_sum / static_cast<double>(dur_count);
  return stats;
}

// ---------------------------------------------------------------------------
// Files

namespace {

nlohmann::json HierarchyToJson(const HierarchySpec &h) {
  nlohmann::json arr = nlohmann::json::array();
  for (Level level : h.levels) arr.push_back(LevelName(level));
  return arr;
}

HierarchySpec HierarchyFromJson(const nlohmann::json &arr) {
  HierarchySpec h;
  for (const auto &name : arr)
    h.levels.push_back(LevelFromName(name.get<std::string>()));
  ValidateHierarchy(h);
  return h;
}

}  // namespace

std::string CorpusStatsToJson(const CorpusStats &stats) {
  nlohmann::json j;
  j["hierarchy"] = HierarchyToJson(stats.hierarchy);
  j["mu"] = stats.mu;
  j["sigma"] = stats.sigma;
  j["speaker_median_logf0"] = stats.speaker_median_logf0;
  j["phone_mean_duration"] = stats.phone_mean_duration;
  j["global_mean_duration"] = stats.global_mean_duration;
  j["percentile_convention"] = "linear-interpolation-inclusive";
  j["std_convention"] = "population";
  j["log_base"] = "e";
  return j.dump(2) + "\n";
}

CorpusStats CorpusStatsFromJson(const std::string &json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception &e) {
    throw Error(std::string("malformed stats JSON: ") + e.what());
  }
  try {
    CorpusStats stats;
    stats.hierarchy = HierarchyFromJson(j.at("hierarchy"));
    stats.mu = j.at("mu").get<std::vector<double>>();
    stats.sigma = j.at("sigma").get<std::vector<double>>();
    stats.speaker_median_logf0 =
        j.at("speaker_median_logf0").get<std::map<std::string, double>>();
    if (j.contains("phone_mean_duration"))
      stats.phone_mean_duration =
          j.at("phone_mean_duration").get<std::map<std::string, double>>();
    if (j.contains("global_mean_duration"))
      stats.global_mean_duration = j.at("global_mean_duration").get<double>();
    if (j.value("std_convention", "population") != std::string("population"))
      throw Error("stats file uses an unsupported std convention");
    if (j.value("log_base", "e") != std::string("e"))
      throw Error("stats file uses an unsupported log base");
    if (stats.mu.size() != static_cast<size_t>(stats.hierarchy.NumColumns()) ||
        stats.sigma.size() != stats.mu.size())
      throw Error("stats file mu/sigma length does not match the hierarchy");
    for (double s : stats.sigma)
      if (!(s > 0.0)) throw Error("stats file contains non-positive sigma");
    return stats;
  } catch (const nlohmann::json::exception &e) {
    throw Error(std::string("malformed stats JSON: ") + e.what());
  }
}

void SaveCorpusStats(const CorpusStats &stats, const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open output file: " + path);
  out << CorpusStatsToJson(stats);
}

CorpusStats LoadCorpusStats(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open stats file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return CorpusStatsFromJson(buf.str());
  } catch (const Error &e) {
    throw Error(path + ": " + e.what());
  }
}

std::string HpcMatrixToCsv(const HpcMatrix &m) {
  std::ostringstream out;
  if (!m.normalized) out << "# unnormalized\n";
  const auto names = HpcColumnNames(m.hierarchy);
  for (size_t c = 0; c < names.size(); ++c) {
    if (c > 0) out << ',';
    out << names[c];
  }
  out << '\n';
  for (int r = 0; r < m.values.rows; ++r) {
    for (int c = 0; c < m.values.cols; ++c) {
      if (c > 0) out << ',';
      out << FormatDouble(m.values.At(r, c));
    }
    out << '\n';
  }
  return out.str();
}

std::string HpcMatrixToJson(const HpcMatrix &m) {
  nlohmann::json j;
  j["hierarchy"] = HierarchyToJson(m.hierarchy);
  j["normalized"] = m.normalized;
  j["columns"] = HpcColumnNames(m.hierarchy);
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < m.values.rows; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < m.values.cols; ++c) row.push_back(m.values.At(r, c));
    rows.push_back(std::move(row));
  }
  j["values"] = std::move(rows);
  return j.dump(2) + "\n";
}

HpcMatrix HpcMatrixFromJson(const std::string &json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception &e) {
    throw Error(std::string("malformed matrix JSON: ") + e.what());
  }
  try {
    HpcMatrix m;
    m.hierarchy = HierarchyFromJson(j.at("hierarchy"));
    m.normalized = j.at("normalized").get<bool>();
    const auto &rows = j.at("values");
    m.values = Matrix(static_cast<int>(rows.size()),
                      m.hierarchy.NumColumns());
    int r = 0;
    for (const auto &row : rows) {
      if (static_cast<int>(row.size()) != m.values.cols)
        throw Error("matrix JSON row length does not match the hierarchy");
      for (int c = 0; c < m.values.cols; ++c)
        m.values.At(r, c) = row[c].get<double>();
      ++r;
    }
    return m;
  } catch (const nlohmann::json::exception &e) {
    throw Error(std::string("malformed matrix JSON: ") + e.what());
  }
}

}  // namespace hpctk
