// hpctk/corpus.h

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

#ifndef HPCTK_CORPUS_H_
#define HPCTK_CORPUS_H_

#include <functional>
#include <string>
#include <vector>

#include "hpctk/hpc.h"

namespace hpctk {

// One manifest line: speaker_id,wav_path,textgrid_path.  Relative paths are
// resolved against the manifest's directory.
struct ManifestEntry {
  std::string speaker_id;
  std::string wav_path;
  std::string alignment_path;
};

std::vector<ManifestEntry> ReadManifest(const std::string &path);

// Runs fn(0..n-1) on up to `jobs` worker threads.  Exceptions are captured
// and the lowest-index one is rethrown after all workers finish, so failures
// are deterministic regardless of scheduling.
void RunParallel(int n, int jobs, const std::function<void(int)> &fn);

// Two-pass corpus statistics: per-utterance pitch tracking and alignment
// (parallel), per-speaker median log-f0 pooling, then matrix extraction with
// the pooled medians and global moment accumulation in manifest order.
// Unreadable entries are all listed in a single error.
CorpusStats BuildCorpusStats(const std::vector<ManifestEntry> &entries,
                             const HierarchySpec &hierarchy,
                             const PitchConfig &pitch_cfg = {}, int jobs = 1);

}  // namespace hpctk

#endif  // HPCTK_CORPUS_H_
