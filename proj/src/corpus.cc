// hpctk/corpus.cc

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

#include "hpctk/corpus.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "hpctk/error.h"
#include "hpctk/mathutil.h"

namespace hpctk {

namespace {

std::string Trim(const std::string &s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<ManifestEntry> ReadManifest(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest: " + path);
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  const auto resolve = [&](const std::string &p) {
    const std::filesystem::path fp(p);
    return fp.is_absolute() ? fp.string() : (base / fp).string();
  };

  std::vector<ManifestEntry> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(trimmed);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(Trim(field));
    if (fields.size() != 3)
      throw Error(path + ":" + std::to_string(line_no) +
                  ": manifest lines must be 'speaker_id,wav_path,"
                  "textgrid_path'");
    ManifestEntry e;
    e.speaker_id = fields[0];
    e.wav_path = resolve(fields[1]);
    e.alignment_path = resolve(fields[2]);
    entries.push_back(std::move(e));
  }
  return entries;
}

void RunParallel(int n, int jobs, const std::function<void(int)> &fn) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next(0);
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> workers;
  const int num_workers = std::min(jobs, n);
  for (int w = 0; w < num_workers; ++w) {
    workers.emplace_back([&]() {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto &t : workers) t.join();
  for (int i = 0; i < n; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);
}

CorpusStats BuildCorpusStats(const std::vector<ManifestEntry> &entries,
                             const HierarchySpec &hierarchy,
                             const PitchConfig &pitch_cfg, int jobs) {
  ValidateHierarchy(hierarchy);
  if (entries.size() < 2)
    throw Error("corpus statistics require at least 2 utterances, got " +
                std::to_string(entries.size()));

  struct Loaded {
    ContinuousLogF0Track track;
    UtteranceAlignment align;
    std::vector<double> voiced_log_f0;
  };
  const int n = static_cast<int>(entries.size());
  std::vector<Loaded> loaded(n);
  std::vector<std::string> failures(n);

  RunParallel(n, jobs, [&](int i) {
    try {
      const Waveform w = LoadWav(entries[i].wav_path);
      Loaded l;
      l.align = LoadAlignmentFile(entries[i].alignment_path);
      if (l.align.sentence_end > w.Duration() + 1e-9)
        throw Error("alignment extends past the end of the waveform");
      const PitchTrack pt = TrackPitch(w, pitch_cfg);
      l.track = InterpolateUnvoiced(pt);
      for (const auto &f : pt.frames)
        if (f.voiced) l.voiced_log_f0.push_back(std::log(f.f0));
      loaded[i] = std::move(l);
    } catch (const std::exception &e) {
      failures[i] = std::string(entries[i].wav_path) + ": " + e.what();
    }
  });
  std::string failure_list;
  for (const auto &f : failures) {
    if (f.empty()) continue;
    if (!failure_list.empty()) failure_list += "; ";
    failure_list += f;
  }
  if (!failure_list.empty())
    throw Error("unreadable corpus entries: " + failure_list);

  // Pooled per-speaker medians, then matrices with those medians.
  std::map<std::string, std::vector<double>> speaker_frames;
  for (int i = 0; i < n; ++i) {
    auto &frames = speaker_frames[entries[i].speaker_id];
    frames.insert(frames.end(), loaded[i].voiced_log_f0.begin(),
                  loaded[i].voiced_log_f0.end());
  }
  std::map<std::string, double> speaker_median;
  for (auto &[speaker, frames] : speaker_frames) {
    if (frames.empty())
      throw Error("speaker '" + speaker + "' has no voiced frames");
    speaker_median[speaker] = Median(frames);
  }

  std::vector<UtteranceStatsInput> inputs(n);
  RunParallel(n, jobs, [&](int i) {
    UtteranceStatsInput u;
    u.speaker_id = entries[i].speaker_id;
    u.raw = ExtractRawHpcFromTrack(loaded[i].track, loaded[i].align, hierarchy,
                                   speaker_median.at(entries[i].speaker_id));
    u.voiced_log_f0 = loaded[i].voiced_log_f0;
    for (int pi : loaded[i].align.NonSilencePhones()) {
      const auto &p = loaded[i].align.phones[pi];
      u.phone_durations.emplace_back(p.label, p.end - p.start);
    }
    inputs[i] = std::move(u);
  });

  return ComputeCorpusStats(inputs, hierarchy);
}

}  // namespace hpctk
