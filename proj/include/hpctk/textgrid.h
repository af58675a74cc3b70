// hpctk/textgrid.h

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

#ifndef HPCTK_TEXTGRID_H_
#define HPCTK_TEXTGRID_H_

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hpctk {

struct TextGridInterval {
  double xmin = 0.0;
  double xmax = 0.0;
  std::string text;
};

using TextGridTier = std::vector<TextGridInterval>;

struct TextGrid {
  double xmin = 0.0;
  double xmax = 0.0;
  // Interval tiers in file order, name -> intervals.  Point tiers are
  // skipped during parsing.
  std::vector<std::pair<std::string, TextGridTier>> tiers;

  const TextGridTier *FindTier(std::string_view name) const;
};

// Parses a Praat TextGrid in long or short text format.  Input may be UTF-8
// (with or without BOM) or UTF-16 (LE/BE, BOM required).  Labels are
// preserved verbatim, including empty strings.  Throws Error on malformed
// headers, truncated files, declared counts that do not match the intervals
// present, and intervals with xmax <= xmin.
TextGrid ParseTextGrid(std::string_view bytes);

TextGrid LoadTextGrid(const std::string &path);

}  // namespace hpctk

#endif  // HPCTK_TEXTGRID_H_
