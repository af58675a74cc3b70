// hpctk/mathutil.h

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

#ifndef HPCTK_MATHUTIL_H_
#define HPCTK_MATHUTIL_H_

#include <cstddef>
#include <span>
#include <vector>

namespace hpctk {

// Percentile with linear interpolation between order statistics (inclusive
// convention): position = p/100 * (n-1).  p in [0, 100]; values need not be
// sorted.  Throws Error on an empty input.
double Percentile(std::span<const double> values, double p);

inline double Median(std::span<const double> values) {
  return Percentile(values, 50.0);
}

double Mean(std::span<const double> values);

// Least-squares slope of y against t.  Returns 0 when fewer than two points
// or when t is degenerate (zero variance).
double LeastSquaresSlope(std::span<const double> t, std::span<const double> y);

// Pearson correlation; returns 0 when either side has zero variance.
double PearsonCorrelation(std::span<const double> x, std::span<const double> y);

}  // namespace hpctk

#endif  // HPCTK_MATHUTIL_H_
