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

#ifndef FEDGBDT_BOOSTING_H_
#define FEDGBDT_BOOSTING_H_

#include <cstddef>
#include <span>
#include <vector>

#include "fedgbdt/accountant.h"
#include "fedgbdt/candidates.h"
#include "fedgbdt/config.h"
#include "fedgbdt/data.h"
#include "fedgbdt/federation.h"
#include "fedgbdt/gradient.h"
#include "fedgbdt/tree.h"

namespace fedgbdt {

enum class EnsembleKind {
  kBoosted,   // raw = sum of leaf weights (eta already applied)
  kBatched,   // raw += eta (sigmoid(mean w) - c) per batch, c = 1/2 or 0
  kAveraged,  // probability = mean leaf proportion
};

struct Ensemble {
  EnsembleKind kind = EnsembleKind::kBoosted;
  UpdateMode update_mode = UpdateMode::kNewton;
  double eta = 0.3;
  bool centered = true;
  std::size_t num_features = 0;
  std::vector<FeatureBounds> bounds;
  std::vector<Tree> trees;
  // Start index of every batch; the last batch ends at trees.size().
  std::vector<std::size_t> batch_boundaries;

  // Clamps x to the bounds first. Throws kShapeMismatch on wrong width.
  double PredictRaw(std::span<const double> x) const;
  double Predict(std::span<const double> x) const;
  std::vector<double> PredictAll(const Dataset& data) const;
};

// prev + eta (sigmoid(mean w) - 1/2); the 1/2 is dropped when !centered.
double BatchedUpdate(double prev_raw, std::span<const double> leaf_weights,
                     double eta, bool centered = true);

struct TrainResult {
  Ensemble ensemble;
  double sigma = 0.0;   // noise multiplier used, 0 when not private
  double delta = 0.0;   // resolved delta
  QueryCounter planned; // CountQueries(config)
  SplitCandidateSet final_candidates;
  bool uses_private_candidates = true;  // false for quantile candidates
};

// Runs the full private training protocol against `federation`.
TrainResult Train(const TrainConfig& config, Federation& federation);

}  // namespace fedgbdt

#endif  // FEDGBDT_BOOSTING_H_
