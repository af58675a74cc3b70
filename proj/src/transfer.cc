// hpctk/transfer.cc

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

#include "hpctk/transfer.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hpctk/error.h"
#include "hpctk/mathutil.h"
#include "hpctk/tsm.h"
#include "json.hpp"

namespace hpctk {

namespace {

constexpr double kMinPlanDuration = 0.010;  // seconds; modification limit
constexpr double kTimeEps = 1e-9;

void CheckParallelPhones(const std::vector<std::string> &a,
                         const std::vector<std::string> &b,
                         const char *a_name, const char *b_name) {
  const size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    if (a[i] != b[i])
      throw Error("phone sequence mismatch at index " + std::to_string(i) +
                  ": " + a_name + " '" + a[i] + "' vs " + b_name + " '" +
                  b[i] + "'");
  }
  if (a.size() != b.size())
    throw Error("phone sequence mismatch at index " + std::to_string(n) +
                ": " + a_name + " has " + std::to_string(a.size()) +
                " phones, " + b_name + " has " + std::to_string(b.size()));
}

std::vector<std::string> NonSilenceLabels(const UtteranceAlignment &a) {
  std::vector<std::string> labels;
  for (int pi : a.NonSilencePhones()) labels.push_back(a.phones[pi].label);
  return labels;
}

// Frame indices of track grid with center in [start, end).
std::pair<int, int> GridRange(double start, double end, double hop,
                              int num_frames) {
  int begin = static_cast<int>(std::ceil((start - kTimeEps) / hop));
  int stop = static_cast<int>(std::ceil((end - kTimeEps) / hop));
  begin = std::clamp(begin, 0, num_frames);
  stop = std::clamp(stop, 0, num_frames);
  return {begin, stop};
}

}  // namespace

const char *TransferModeName(TransferMode mode) {
  return mode == TransferMode::kHpcImport ? "d0" : "d1";
}

TransferMode TransferModeFromName(const std::string &name) {
  if (name == "d0") return TransferMode::kHpcImport;
  if (name == "d1") return TransferMode::kHpcAndDurationImport;
  throw Error("unknown transfer mode '" + name + "' (expected d0 or d1)");
}

void ValidateTransferPlan(const TransferPlan &plan) {
  ValidateHierarchy(plan.hierarchy);
  const size_t n = plan.phone_labels.size();
  if (n == 0) throw Error("transfer plan has no phones");
  if (plan.phone_durations.size() != n || plan.source_phone_start.size() != n ||
      plan.source_phone_end.size() != n || plan.word_index.size() != n)
    throw Error("transfer plan field lengths disagree");
  if (plan.hpc.values.rows != static_cast<int>(n))
    throw Error("transfer plan HPC row count does not match the phone count");
  if (plan.hpc.values.cols != plan.hierarchy.NumColumns())
    throw Error("transfer plan HPC width does not match the hierarchy");
  if (!plan.hpc.normalized)
    throw Error("transfer plan HPC matrix must be normalized");
  for (double d : plan.phone_durations)
    if (!(d > 0.0)) throw Error("transfer plan durations must be positive");
  for (size_t i = 0; i < n; ++i)
    if (!(plan.source_phone_end[i] > plan.source_phone_start[i]))
      throw Error("transfer plan source phone spans must be increasing");
  if (plan.source_contour.NumFrames() == 0)
    throw Error("transfer plan is missing the source contour");
}

DurationPrediction PredictDurationsBaseline(
    const std::vector<std::string> &phones, const CorpusStats &stats) {
  if (phones.empty()) throw Error("empty phone sequence");
  if (stats.phone_mean_duration.empty() && !(stats.global_mean_duration > 0.0))
    throw Error("statistics file has no phone duration table");
  DurationPrediction out;
  out.durations.reserve(phones.size());
  for (const auto &label : phones) {
    const auto it = stats.phone_mean_duration.find(label);
    if (it != stats.phone_mean_duration.end()) {
      out.durations.push_back(it->second);
    } else {
      out.durations.push_back(stats.global_mean_duration);
      out.warnings.push_back("phone label '" + label +
                             "' not in the duration table; using the global "
                             "mean duration");
    }
  }
  return out;
}

TransferPlan PlanTransfer(const Waveform &source,
                          const UtteranceAlignment &source_align,
                          const std::vector<std::string> &target_phones,
                          TransferMode mode, const HierarchySpec &hierarchy,
                          const CorpusStats &stats,
                          const PitchConfig &pitch_cfg,
                          std::vector<std::string> *warnings) {
  ValidateHierarchy(hierarchy);
  const std::vector<std::string> source_labels = NonSilenceLabels(source_align);
  CheckParallelPhones(source_labels, target_phones, "source", "target");

  const PitchTrack pt = TrackPitch(source, pitch_cfg);
  const ContinuousLogF0Track track = InterpolateUnvoiced(pt);
  const double median = MedianVoicedLogF0(pt);  // unseen speaker

  TransferPlan plan;
  plan.mode = mode;
  plan.hierarchy = hierarchy;
  plan.phone_labels = source_labels;
  plan.source_contour = track;

  const Matrix raw = ExtractRawHpcFromTrack(track, source_align, hierarchy,
                                            median);
  plan.hpc = Normalize(raw, hierarchy, stats);

  for (int pi : source_align.NonSilencePhones()) {
    const PhoneInterval &p = source_align.phones[pi];
    plan.source_phone_start.push_back(p.start);
    plan.source_phone_end.push_back(p.end);
    plan.word_index.push_back(p.word_index);
  }
  if (mode == TransferMode::kHpcAndDurationImport) {
    for (size_t i = 0; i < plan.phone_labels.size(); ++i)
      plan.phone_durations.push_back(plan.source_phone_end[i] -
                                     plan.source_phone_start[i]);
  } else {
    DurationPrediction pred = PredictDurationsBaseline(source_labels, stats);
    plan.phone_durations = std::move(pred.durations);
    if (warnings != nullptr)
      warnings->insert(warnings->end(), pred.warnings.begin(),
                       pred.warnings.end());
  }
  ValidateTransferPlan(plan);
  return plan;
}

TransplantResult Transplant(const Waveform &carrier,
                            const UtteranceAlignment &carrier_align,
                            const TransferPlan &plan,
                            const PitchConfig &pitch_cfg) {
  ValidateTransferPlan(plan);
  CheckParallelPhones(NonSilenceLabels(carrier_align), plan.phone_labels,
                      "carrier", "plan");
  for (size_t i = 0; i < plan.phone_durations.size(); ++i) {
    if (plan.phone_durations[i] < kMinPlanDuration)
      throw Error("plan duration for phone " + std::to_string(i) + " ('" +
                  plan.phone_labels[i] + "') is below the 10 ms "
                  "modification limit");
  }

  const int sr = carrier.sample_rate;
  const long num_samples = static_cast<long>(carrier.samples.size());

  // Segment the carrier timeline: silences and gaps keep their length,
  // non-silence phone k is scaled to the plan duration.
  TimeMap map;
  struct PhoneSpan {
    long out_begin = 0;
    long out_end = 0;
  };
  std::vector<PhoneSpan> out_phone(carrier_align.phones.size());
  long src_cursor = 0, out_cursor = 0;
  int k = 0;
  auto push_segment = [&](long src_end, long out_len) {
    TimeMapSegment seg;
    seg.src_begin = src_cursor;
    seg.src_end = src_end;
    seg.out_begin = out_cursor;
    seg.out_end = out_cursor + out_len;
    map.segments.push_back(seg);
    src_cursor = src_end;
    out_cursor += out_len;
  };
  for (size_t pi = 0; pi < carrier_align.phones.size(); ++pi) {
    const PhoneInterval &p = carrier_align.phones[pi];
    long b = std::clamp(std::lround(p.start * sr), 0L, num_samples);
    long e = std::clamp(std::lround(p.end * sr), 0L, num_samples);
    b = std::max(b, src_cursor);
    e = std::max(e, b + 1);
    if (e > num_samples)
      throw Error("carrier alignment extends past the end of the waveform");
    if (b > src_cursor) push_segment(b, b - src_cursor);  // inter-phone gap
    long out_len;
    if (p.is_silence) {
      out_len = e - b;
    } else {
      out_len = std::max(1L, std::lround(plan.phone_durations[k] * sr));
      ++k;
    }
    push_segment(e, out_len);
    out_phone[pi].out_begin = map.segments.back().out_begin;
    out_phone[pi].out_end = map.segments.back().out_end;
  }
  if (src_cursor < num_samples)
    push_segment(num_samples, num_samples - src_cursor);

  std::vector<float> scaled = Wsola(carrier.samples, sr, map);

  // Output alignment: words snap to their member phones' mapped boundaries.
  TextGridTier out_phones_tier, out_words_tier;
  for (size_t pi = 0; pi < carrier_align.phones.size(); ++pi) {
    TextGridInterval iv;
    iv.text = carrier_align.phones[pi].label;
    iv.xmin = static_cast<double>(out_phone[pi].out_begin) / sr;
    iv.xmax = static_cast<double>(out_phone[pi].out_end) / sr;
    out_phones_tier.push_back(std::move(iv));
  }
  for (const auto &w : carrier_align.words) {
    TextGridInterval iv;
    iv.text = w.label;
    iv.xmin = static_cast<double>(out_phone[w.phone_indices.front()].out_begin) / sr;
    iv.xmax = static_cast<double>(out_phone[w.phone_indices.back()].out_end) / sr;
    out_words_tier.push_back(std::move(iv));
  }
  UtteranceAlignment out_align = BuildAlignment(out_words_tier, out_phones_tier);

  // Warp the source contour phone-to-phone onto the output frame grid.
  const double hop = kPitchHopSeconds;
  const long out_len = static_cast<long>(scaled.size());
  const int num_frames =
      static_cast<int>(std::floor(static_cast<double>(out_len) / sr / hop)) + 1;
  std::vector<double> g(num_frames, 0.0);
  std::vector<bool> covered(num_frames, false);
  {
    const auto content = carrier_align.NonSilencePhones();
    for (size_t j = 0; j < content.size(); ++j) {
      const PhoneSpan &span = out_phone[content[j]];
      const double t0 = static_cast<double>(span.out_begin) / sr;
      const double t1 = static_cast<double>(span.out_end) / sr;
      const double u0 = plan.source_phone_start[j];
      const double rate = (plan.source_phone_end[j] - u0) / (t1 - t0);
      const auto [fb, fe] = GridRange(t0, t1, hop, num_frames);
      for (int i = fb; i < fe; ++i) {
        const double t = i * hop;
        g[i] = plan.source_contour.SampleAt(u0 + (t - t0) * rate);
        covered[i] = true;
      }
    }
  }
  auto bridge = [&](const std::vector<bool> &mask) {
    int first = -1, last = -1;
    for (int i = 0; i < num_frames; ++i)
      if (mask[i]) {
        if (first < 0) first = i;
        last = i;
      }
    if (first < 0) throw Error("transplant produced no voiced content");
    for (int i = 0; i < first; ++i) g[i] = g[first];
    for (int i = last + 1; i < num_frames; ++i) g[i] = g[last];
    int prev = first;
    for (int i = first + 1; i <= last; ++i) {
      if (!mask[i]) continue;
      for (int j = prev + 1; j < i; ++j) {
        const double frac =
            static_cast<double>(j - prev) / static_cast<double>(i - prev);
        g[j] = g[prev] + frac * (g[i] - g[prev]);
      }
      prev = i;
    }
  };
  bridge(covered);

  // Limit the imposed contour to the detail the plan's hierarchy carries:
  // below its finest level the contour collapses to per-interval lines
  // through (median, slope).
  if (plan.hierarchy.Finest() != Level::kPhone) {
    std::vector<std::pair<double, double>> spans;
    switch (plan.hierarchy.Finest()) {
      case Level::kSentence:
        spans.emplace_back(out_align.sentence_start, out_align.sentence_end);
        break;
      case Level::kWord:
        for (const auto &w : out_align.words) spans.emplace_back(w.start, w.end);
        break;
      case Level::kSyllable:
        for (const auto &s : out_align.syllables)
          spans.emplace_back(s.start, s.end);
        break;
      case Level::kPhone:
        break;
    }
    std::vector<bool> in_span(num_frames, false);
    for (const auto &[t0, t1] : spans) {
      const auto [fb, fe] = GridRange(t0, t1, hop, num_frames);
      if (fe - fb < 1) continue;
      std::vector<double> values(g.begin() + fb, g.begin() + fe);
      std::vector<double> times(values.size());
      double tmid = 0.0;
      for (size_t i = 0; i < values.size(); ++i) {
        times[i] = (fb + static_cast<int>(i)) * hop;
        tmid += times[i];
      }
      tmid /= static_cast<double>(values.size());
      const double med = Median(values);
      const double slope = LeastSquaresSlope(times, values);
      for (int i = fb; i < fe; ++i) {
        g[i] = med + slope * (i * hop - tmid);
        in_span[i] = true;
      }
    }
    bridge(in_span);
  }

  // Re-anchor the contour to the carrier's register.
  const PitchTrack carrier_pt = TrackPitch(carrier, pitch_cfg);
  const double carrier_median = MedianVoicedLogF0(carrier_pt);
  Waveform scaled_wave;
  scaled_wave.samples = scaled;
  scaled_wave.sample_rate = sr;
  const PitchTrack scaled_pt = TrackPitch(scaled_wave, pitch_cfg);
  const ContinuousLogF0Track scaled_track = InterpolateUnvoiced(scaled_pt);
  std::vector<double> voiced_targets;
  for (int i = 0; i < std::min<int>(num_frames, scaled_pt.NumFrames()); ++i)
    if (scaled_pt.frames[i].voiced) voiced_targets.push_back(g[i]);
  if (voiced_targets.empty())
    throw Error("transplant produced no voiced content");
  const double shift = carrier_median - Median(voiced_targets);
  for (double &v : g) v += shift;

  std::vector<double> target(scaled_track.NumFrames());
  for (int i = 0; i < scaled_track.NumFrames(); ++i)
    target[i] = i < num_frames ? g[i] : g.back();

  TransplantResult result;
  result.audio.sample_rate = sr;
  result.audio.samples = ImposePitchContour(scaled, sr, scaled_track, target);
  result.alignment = std::move(out_align);
  return result;
}

// ---------------------------------------------------------------------------
// Plan serialization

std::string TransferPlanToJson(const TransferPlan &plan) {
  nlohmann::json j;
  j["mode"] = TransferModeName(plan.mode);
  j["phone_labels"] = plan.phone_labels;
  j["phone_durations"] = plan.phone_durations;
  j["word_index"] = plan.word_index;
  j["source_phone_start"] = plan.source_phone_start;
  j["source_phone_end"] = plan.source_phone_end;
  j["hpc"] = nlohmann::json::parse(HpcMatrixToJson(plan.hpc));
  nlohmann::json contour;
  contour["hop_seconds"] = plan.source_contour.hop_seconds;
  contour["log_f0"] = plan.source_contour.log_f0;
  contour["voiced"] = std::vector<bool>(plan.source_contour.voiced.begin(),
                                        plan.source_contour.voiced.end());
  j["source_contour"] = std::move(contour);
  return j.dump(2) + "\n";
}

TransferPlan TransferPlanFromJson(const std::string &json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception &e) {
    throw Error(std::string("malformed plan JSON: ") + e.what());
  }
  try {
    TransferPlan plan;
    plan.mode = TransferModeFromName(j.at("mode").get<std::string>());
    plan.phone_labels = j.at("phone_labels").get<std::vector<std::string>>();
    plan.phone_durations =
        j.at("phone_durations").get<std::vector<double>>();
    plan.word_index = j.at("word_index").get<std::vector<int>>();
    plan.source_phone_start =
        j.at("source_phone_start").get<std::vector<double>>();
    plan.source_phone_end =
        j.at("source_phone_end").get<std::vector<double>>();
    plan.hpc = HpcMatrixFromJson(j.at("hpc").dump());
    plan.hierarchy = plan.hpc.hierarchy;
    const auto &contour = j.at("source_contour");
    plan.source_contour.hop_seconds = contour.at("hop_seconds").get<double>();
    plan.source_contour.log_f0 =
        contour.at("log_f0").get<std::vector<double>>();
    const auto voiced = contour.at("voiced").get<std::vector<bool>>();
    plan.source_contour.voiced.assign(voiced.begin(), voiced.end());
    ValidateTransferPlan(plan);
    return plan;
  } catch (const nlohmann::json::exception &e) {
    throw Error(std::string("malformed plan JSON: ") + e.what());
  }
}

void SaveTransferPlan(const TransferPlan &plan, const std::string &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open output file: " + path);
  out << TransferPlanToJson(plan);
}

TransferPlan LoadTransferPlan(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open plan file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return TransferPlanFromJson(buf.str());
  } catch (const Error &e) {
    throw Error(path + ": " + e.what());
  }
}

}  // namespace hpctk
