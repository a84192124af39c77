// Copyright 2026 The fedgbdt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Split-candidate generation.
//
// Q thresholds s_1 < ... < s_Q on feature j with bounds [a, b] define Q + 1
// bins: [a, s_1], (s_1, s_2], ..., (s_{Q-1}, s_Q], (s_Q, b]. A value equal to
// a threshold falls in the bin that threshold closes. The last bin is empty
// whenever s_Q = b, which is the case for uniform and log candidates.

#ifndef FEDGBDT_CANDIDATES_H_
#define FEDGBDT_CANDIDATES_H_

#include <cstddef>
#include <span>
#include <vector>

#include "fedgbdt/data.h"

namespace fedgbdt {

struct SplitCandidateSet {
  std::vector<std::vector<double>> per_feature;

  std::size_t num_features() const { return per_feature.size(); }
  const std::vector<double>& operator[](std::size_t j) const { return per_feature[j]; }
  // Exactly q strictly increasing thresholds per feature, all within bounds.
  void Validate(std::span<const FeatureBounds> bounds, int q) const;
};

// Noisy per-bin Hessian sums; per_feature[j] has |S_j| + 1 entries.
struct HessianHistogram {
  std::vector<std::vector<double>> per_feature;
};

// Bin of x under `thresholds`: the number of thresholds strictly below x.
std::size_t BinIndex(std::span<const double> thresholds, double x);

// s_q = a + (q - 1)(b - a)/(Q - 1).
std::vector<double> UniformThresholds(FeatureBounds bounds, int q);
SplitCandidateSet UniformCandidates(std::span<const FeatureBounds> bounds, int q);

// Uniform in log(1 + x - a), mapped back.
std::vector<double> LogThresholds(FeatureBounds bounds, int q);
SplitCandidateSet LogCandidates(std::span<const FeatureBounds> bounds, int q);

// Empirical quantiles at levels q/(Q+1) with the (n + 1)p interpolation rule
// (Hyndman-Fan type 6), deduplicated and padded to Q. Reads raw values, so it
// is not private.
std::vector<double> QuantileThresholds(std::span<const double> values,
                                       FeatureBounds bounds, int q);
SplitCandidateSet QuantileCandidates(const Dataset& data, int q);

// Brings a point set to exactly q strictly increasing in-bounds thresholds.
// Short sets are padded by spreading new points evenly over the gaps of
// points u {a, b}: every gap gets floor(need / gaps), the remainder goes to
// the widest gaps (ties to the lower one). Long sets are subsampled evenly by
// rank, keeping both ends.
std::vector<double> PadOrTrim(std::vector<double> points, FeatureBounds bounds,
                              int q);

// One round of Hessian-guided refinement for one feature. Bins whose
// (accumulated) Hessian stays below theta = sum H+ / #bins merge into their
// right neighbour; a bin reaching theta keeps its two edges and gains its
// midpoint. A trailing low run merges left and adds nothing. The result is
// then trimmed (midpoints of the lightest bins go first) or filled inside the
// kept half-bins, and returned as exactly q thresholds. Negative noisy sums
// count as 0.
std::vector<double> RefineThresholds(std::span<const double> hessian,
                                     std::span<const double> current,
                                     FeatureBounds bounds, int q);

// Pure post-processing of an already noisy histogram: never sees raw data.
SplitCandidateSet IterativeHessianRefine(const HessianHistogram& hist,
                                         const SplitCandidateSet& current,
                                         std::span<const FeatureBounds> bounds,
                                         int q);

}  // namespace fedgbdt

#endif  // FEDGBDT_CANDIDATES_H_
