// hpctk/alignment.cc

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

#include "hpctk/alignment.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "hpctk/error.h"
#include "json.hpp"

namespace hpctk {

namespace {

const std::set<std::string> kVowels = {
    "AA", "AE", "AH", "AO", "AW", "AY", "EH", "ER",
    "EY", "IH", "IY", "OW", "OY", "UH", "UW"};

const std::set<std::string> kConsonants = {
    "B", "CH", "D",  "DH", "F", "G", "HH", "JH", "K", "L",  "M", "N",
    "NG", "P", "R", "S", "SH", "T", "TH", "V", "W", "Y", "Z", "ZH"};

const std::set<std::string> kSonorantConsonants = {"L", "M",  "N", "NG",
                                                   "R", "W", "Y"};

// English legal onsets (stress-stripped), used for onset maximization.
// Singletons cover every consonant except NG, which never starts a word.
const std::set<std::vector<std::string>> kLegalOnsets = {
    {"B"}, {"CH"}, {"D"}, {"DH"}, {"F"}, {"G"}, {"HH"}, {"JH"}, {"K"}, {"L"},
    {"M"}, {"N"}, {"P"}, {"R"}, {"S"}, {"SH"}, {"T"}, {"TH"}, {"V"}, {"W"},
    {"Y"}, {"Z"}, {"ZH"},
    {"P", "R"}, {"B", "R"}, {"T", "R"}, {"D", "R"}, {"K", "R"}, {"G", "R"},
    {"F", "R"}, {"TH", "R"}, {"SH", "R"},
    {"P", "L"}, {"B", "L"}, {"K", "L"}, {"G", "L"}, {"F", "L"}, {"S", "L"},
    {"T", "W"}, {"D", "W"}, {"K", "W"}, {"G", "W"}, {"S", "W"}, {"TH", "W"},
    {"P", "Y"}, {"B", "Y"}, {"K", "Y"}, {"G", "Y"}, {"F", "Y"}, {"V", "Y"},
    {"M", "Y"}, {"HH", "Y"},
    {"S", "P"}, {"S", "T"}, {"S", "K"}, {"S", "M"}, {"S", "N"}, {"S", "F"},
    {"S", "P", "L"}, {"S", "P", "R"}, {"S", "P", "Y"}, {"S", "T", "R"},
    {"S", "K", "L"}, {"S", "K", "R"}, {"S", "K", "W"}, {"S", "K", "Y"}};

bool IsLegalOnset(const std::vector<std::string> &stripped) {
  if (stripped.empty()) return true;
  return kLegalOnsets.count(stripped) > 0;
}

bool IsSilence(const std::string &label, const AlignmentConfig &cfg) {
  return std::find(cfg.silence_labels.begin(), cfg.silence_labels.end(),
                   label) != cfg.silence_labels.end();
}

}  // namespace

std::string StripStress(const std::string &label) {
  if (!label.empty() && label.back() >= '0' && label.back() <= '2')
    return label.substr(0, label.size() - 1);
  return label;
}

bool IsVowelLabel(const std::string &label) {
  return kVowels.count(StripStress(label)) > 0;
}

bool IsConsonantLabel(const std::string &label) {
  return kConsonants.count(label) > 0;
}

bool IsSonorantLabel(const std::string &label) {
  if (IsVowelLabel(label)) return true;
  return kSonorantConsonants.count(StripStress(label)) > 0;
}

std::vector<int> UtteranceAlignment::NonSilencePhones() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(phones.size()); ++i)
    if (!phones[i].is_silence) out.push_back(i);
  return out;
}

int UtteranceAlignment::NumNonSilencePhones() const {
  int n = 0;
  for (const auto &p : phones)
    if (!p.is_silence) ++n;
  return n;
}

std::vector<std::vector<int>> Syllabify(
    const std::vector<std::string> &labels) {
  if (labels.empty()) throw Error("syllabify: empty phone sequence");

  std::vector<bool> is_vowel(labels.size());
  std::vector<int> nuclei;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (IsVowelLabel(labels[i])) {
      is_vowel[i] = true;
      nuclei.push_back(static_cast<int>(i));
    } else if (!IsConsonantLabel(labels[i])) {
      throw Error("syllabify: unknown phone label '" + labels[i] + "'");
    }
  }

  std::vector<std::vector<int>> syllables;
  if (nuclei.empty()) {
    // Vowel-less fallback: the whole word is one syllable.
    std::vector<int> all(labels.size());
    for (size_t i = 0; i < labels.size(); ++i) all[i] = static_cast<int>(i);
    syllables.push_back(std::move(all));
    return syllables;
  }

  // Between consecutive nuclei, attach the longest legal onset to the right
  // syllable; anything left becomes the left syllable's coda.
  std::vector<int> boundaries;  // first phone index of each syllable
  boundaries.push_back(0);
  for (size_t v = 0; v + 1 < nuclei.size(); ++v) {
    const int left = nuclei[v];
    const int right = nuclei[v + 1];
    int onset_start = right;  // exclusive cluster is (left, right)
    for (int s = left + 1; s < right; ++s) {
      std::vector<std::string> onset;
      for (int i = s; i < right; ++i) onset.push_back(StripStress(labels[i]));
      if (IsLegalOnset(onset)) {
        onset_start = s;
        break;  // earliest start = longest onset
      }
    }
    boundaries.push_back(onset_start);
  }
  boundaries.push_back(static_cast<int>(labels.size()));

  for (size_t s = 0; s + 1 < boundaries.size(); ++s) {
    std::vector<int> syl;
    for (int i = boundaries[s]; i < boundaries[s + 1]; ++i) syl.push_back(i);
    syllables.push_back(std::move(syl));
  }
  return syllables;
}

UtteranceAlignment BuildAlignment(const TextGridTier &words_tier,
                                  const TextGridTier &phones_tier,
                                  const AlignmentConfig &cfg) {
  const double tol = cfg.boundary_tolerance;
  UtteranceAlignment a;

  std::vector<TextGridInterval> phones(phones_tier.begin(), phones_tier.end());
  std::sort(phones.begin(), phones.end(),
            [](const TextGridInterval &x, const TextGridInterval &y) {
              return x.xmin < y.xmin;
            });
  for (const auto &p : phones) {
    PhoneInterval ph;
    ph.label = p.text;
    ph.start = p.xmin;
    ph.end = p.xmax;
    ph.is_silence = IsSilence(p.text, cfg);
    a.phones.push_back(std::move(ph));
  }
  for (size_t i = 0; i + 1 < a.phones.size(); ++i) {
    if (a.phones[i + 1].start < a.phones[i].end - tol)
      throw Error("overlapping phone intervals at index " + std::to_string(i));
  }

  std::vector<TextGridInterval> words;
  for (const auto &w : words_tier)
    if (!IsSilence(w.text, cfg)) words.push_back(w);
  std::sort(words.begin(), words.end(),
            [](const TextGridInterval &x, const TextGridInterval &y) {
              return x.xmin < y.xmin;
            });
  for (size_t i = 0; i + 1 < words.size(); ++i) {
    if (words[i + 1].xmin < words[i].xmax - tol)
      throw Error("overlapping word intervals at index " + std::to_string(i));
  }
  for (const auto &w : words) {
    WordInterval wi;
    wi.label = w.text;
    wi.start = w.xmin;
    wi.end = w.xmax;
    a.words.push_back(std::move(wi));
  }

  bool any_content = false;
  for (int pi = 0; pi < static_cast<int>(a.phones.size()); ++pi) {
    PhoneInterval &ph = a.phones[pi];
    if (ph.is_silence) continue;
    any_content = true;
    int found = -1;
    for (int wi = 0; wi < static_cast<int>(a.words.size()); ++wi) {
      const WordInterval &w = a.words[wi];
      if (ph.start >= w.start - tol && ph.end <= w.end + tol) {
        found = wi;
        break;
      }
    }
    if (found < 0) {
      // Distinguish straddling from plain lack of coverage for the message.
      for (const auto &w : a.words) {
        const bool overlaps = ph.start < w.end && ph.end > w.start;
        if (overlaps)
          throw Error("phone '" + ph.label + "' at [" +
                      std::to_string(ph.start) + ", " + std::to_string(ph.end) +
                      "] straddles the boundary of word '" + w.label + "'");
      }
      throw Error("phone '" + ph.label + "' at [" + std::to_string(ph.start) +
                  ", " + std::to_string(ph.end) +
                  "] is not covered by any word");
    }
    ph.word_index = found;
    a.words[found].phone_indices.push_back(pi);
  }
  if (!any_content) throw Error("empty utterance (no non-silence phones)");

  for (int wi = 0; wi < static_cast<int>(a.words.size()); ++wi) {
    WordInterval &w = a.words[wi];
    if (w.phone_indices.empty())
      throw Error("word '" + w.label + "' contains no phones");
    std::vector<std::string> labels;
    for (int pi : w.phone_indices) labels.push_back(a.phones[pi].label);
    const auto groups = Syllabify(labels);
    for (const auto &group : groups) {
      SyllableInterval syl;
      syl.word_index = wi;
      for (int local : group)
        syl.phone_indices.push_back(w.phone_indices[local]);
      syl.start = a.phones[syl.phone_indices.front()].start;
      syl.end = a.phones[syl.phone_indices.back()].end;
      const int si = static_cast<int>(a.syllables.size());
      for (int pi : syl.phone_indices) a.phones[pi].syllable_index = si;
      w.syllable_indices.push_back(si);
      a.syllables.push_back(std::move(syl));
    }
  }

  const auto content = a.NonSilencePhones();
  a.sentence_start = a.phones[content.front()].start;
  a.sentence_end = a.phones[content.back()].end;
  return a;
}

void ValidateAlignment(const UtteranceAlignment &a, double tolerance) {
  if (a.NumNonSilencePhones() == 0)
    throw Error("alignment invariant: no non-silence phones");
  if (a.sentence_end <= a.sentence_start)
    throw Error("alignment invariant: empty sentence interval");
  for (const auto &p : a.phones) {
    if (p.end <= p.start) throw Error("alignment invariant: phone end <= start");
    if (p.is_silence) continue;
    if (p.word_index < 0 || p.syllable_index < 0)
      throw Error("alignment invariant: unparented non-silence phone");
    const auto &syl = a.syllables[p.syllable_index];
    if (p.start < syl.start - tolerance || p.end > syl.end + tolerance)
      throw Error("alignment invariant: phone outside its syllable");
    const auto &w = a.words[syl.word_index];
    if (syl.start < w.start - tolerance || syl.end > w.end + tolerance)
      throw Error("alignment invariant: syllable outside its word");
    if (w.start < a.sentence_start - tolerance ||
        w.end > a.sentence_end + tolerance)
      throw Error("alignment invariant: word outside the sentence");
  }
  for (size_t i = 0; i + 1 < a.words.size(); ++i)
    if (a.words[i + 1].start < a.words[i].end - tolerance)
      throw Error("alignment invariant: words overlap");
  for (const auto &w : a.words) {
    if (w.syllable_indices.empty())
      throw Error("alignment invariant: word without syllables");
    int vowels_total = 0;
    for (int si : w.syllable_indices) {
      const auto &syl = a.syllables[si];
      if (syl.phone_indices.empty())
        throw Error("alignment invariant: empty syllable");
      int vowels = 0;
      for (int pi : syl.phone_indices)
        if (IsVowelLabel(a.phones[pi].label)) ++vowels;
      if (vowels > 1)
        throw Error("alignment invariant: syllable with multiple nuclei");
      vowels_total += vowels;
    }
    // Vowel-less words are allowed only as a single fallback syllable.
    if (vowels_total == 0 && w.syllable_indices.size() != 1)
      throw Error("alignment invariant: vowel-less word split into syllables");
  }
  // Syllabification must partition each word's phones.
  std::vector<int> owner(a.phones.size(), -1);
  for (size_t si = 0; si < a.syllables.size(); ++si) {
    for (int pi : a.syllables[si].phone_indices) {
      if (owner[pi] != -1)
        throw Error("alignment invariant: phone in two syllables");
      owner[pi] = static_cast<int>(si);
    }
  }
  for (size_t pi = 0; pi < a.phones.size(); ++pi) {
    if (!a.phones[pi].is_silence && owner[pi] < 0)
      throw Error("alignment invariant: non-silence phone in no syllable");
  }
}

std::string AlignmentToJson(const UtteranceAlignment &a) {
  nlohmann::json j;
  j["sample_rate_independent"] = true;
  j["phones"] = nlohmann::json::array();
  for (const auto &p : a.phones)
    j["phones"].push_back(
        {{"label", p.label}, {"start", p.start}, {"end", p.end}});
  j["words"] = nlohmann::json::array();
  for (const auto &w : a.words)
    j["words"].push_back(
        {{"label", w.label}, {"start", w.start}, {"end", w.end}});
  return j.dump(2) + "\n";
}

UtteranceAlignment AlignmentFromJson(const std::string &json_text,
                                     const AlignmentConfig &cfg) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception &e) {
    throw Error(std::string("malformed alignment JSON: ") + e.what());
  }
  if (!j.contains("phones") || !j.contains("words"))
    throw Error("malformed alignment JSON: missing 'phones' or 'words'");
  TextGridTier phones, words;
  for (const auto &p : j["phones"]) {
    TextGridInterval iv;
    iv.text = p.at("label").get<std::string>();
    iv.xmin = p.at("start").get<double>();
    iv.xmax = p.at("end").get<double>();
    phones.push_back(std::move(iv));
  }
  for (const auto &w : j["words"]) {
    TextGridInterval iv;
    iv.text = w.at("label").get<std::string>();
    iv.xmin = w.at("start").get<double>();
    iv.xmax = w.at("end").get<double>();
    words.push_back(std::move(iv));
  }
  return BuildAlignment(words, phones, cfg);
}

UtteranceAlignment LoadAlignmentFile(const std::string &path,
                                     const AlignmentConfig &cfg) {
  const bool is_json =
      path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  if (is_json) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open alignment file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
      return AlignmentFromJson(buf.str(), cfg);
    } catch (const Error &e) {
      throw Error(path + ": " + e.what());
    }
  }
  const TextGrid tg = LoadTextGrid(path);
  const TextGridTier *words = tg.FindTier("words");
  const TextGridTier *phones = tg.FindTier("phones");
  if (words == nullptr || phones == nullptr)
    throw Error(path + ": TextGrid must contain 'words' and 'phones' tiers");
  try {
    return BuildAlignment(*words, *phones, cfg);
  } catch (const Error &e) {
    throw Error(path + ": " + e.what());
  }
}

}  // namespace hpctk
