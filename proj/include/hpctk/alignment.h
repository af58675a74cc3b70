// hpctk/alignment.h

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

#ifndef HPCTK_ALIGNMENT_H_
#define HPCTK_ALIGNMENT_H_

#include <string>
#include <vector>

#include "hpctk/textgrid.h"

namespace hpctk {

struct AlignmentConfig {
  std::vector<std::string> silence_labels = {"", "sil", "sp", "spn"};
  double boundary_tolerance = 0.001;  // seconds
};

struct PhoneInterval {
  std::string label;  // ARPABET; vowels may carry a stress digit
  double start = 0.0;
  double end = 0.0;
  bool is_silence = false;
  int word_index = -1;      // -1 for silence phones
  int syllable_index = -1;  // -1 for silence phones
};

struct SyllableInterval {
  double start = 0.0;
  double end = 0.0;
  int word_index = -1;
  std::vector<int> phone_indices;
};

struct WordInterval {
  std::string label;
  double start = 0.0;
  double end = 0.0;
  std::vector<int> phone_indices;
  std::vector<int> syllable_indices;
};

// Nested sentence -> word -> syllable -> phone hierarchy.  `phones` holds all
// phones in time order, silences included; words and syllables cover exactly
// the non-silence phones.  The sentence interval spans the first non-silence
// phone start to the last non-silence phone end.
struct UtteranceAlignment {
  double sentence_start = 0.0;
  double sentence_end = 0.0;
  std::vector<PhoneInterval> phones;
  std::vector<WordInterval> words;
  std::vector<SyllableInterval> syllables;

  std::vector<int> NonSilencePhones() const;
  int NumNonSilencePhones() const;
};

// ARPABET label classification.  Stress digits on vowels are ignored.
bool IsVowelLabel(const std::string &label);
bool IsConsonantLabel(const std::string &label);
bool IsSonorantLabel(const std::string &label);
std::string StripStress(const std::string &label);

// Groups a word's phone labels into syllables: one syllable per vowel
// nucleus, onset maximized against a fixed English legal-onset table, the
// remainder attached as coda.  A vowel-less word becomes a single fallback
// syllable.  Returns index ranges into the input.  Throws on labels outside
// the vowel/consonant inventories.
std::vector<std::vector<int>> Syllabify(const std::vector<std::string> &labels);

// Assembles the hierarchy from MFA-style word and phone interval tiers.
// Silence phones are kept in `phones` but excluded from words and syllables;
// silence-labelled word intervals are dropped.  Every non-silence phone must
// lie within exactly one word interval (boundary tolerance applies).
UtteranceAlignment BuildAlignment(const TextGridTier &words,
                                  const TextGridTier &phones,
                                  const AlignmentConfig &cfg = {});

// Checks the structural invariants (nesting, sibling ordering, syllable
// partition).  Throws Error on violation.
void ValidateAlignment(const UtteranceAlignment &a,
                       double tolerance = 0.001);

// Toolkit JSON alignment format:
//   {"sample_rate_independent": true,
//    "phones": [{"label": ..., "start": ..., "end": ...}, ...],
//    "words":  [{"label": ..., "start": ..., "end": ...}, ...]}
// Syllables are always re-derived, never read.
std::string AlignmentToJson(const UtteranceAlignment &a);
UtteranceAlignment AlignmentFromJson(const std::string &json_text,
                                     const AlignmentConfig &cfg = {});

// Loads either a Praat TextGrid (tiers "words" and "phones") or the toolkit
// JSON format, chosen by the ".json" extension.
UtteranceAlignment LoadAlignmentFile(const std::string &path,
                                     const AlignmentConfig &cfg = {});

}  // namespace hpctk

#endif  // HPCTK_ALIGNMENT_H_
