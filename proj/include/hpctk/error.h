// hpctk/error.h

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

#ifndef HPCTK_ERROR_H_
#define HPCTK_ERROR_H_

#include <stdexcept>
#include <string>

namespace hpctk {

// Thrown on invalid input data or violated operation contracts (bad files,
// mismatched phone sequences, degenerate statistics, ...).  The CLI maps this
// to exit code 2; any other exception maps to exit code 1.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

}  // namespace hpctk

#endif  // HPCTK_ERROR_H_
