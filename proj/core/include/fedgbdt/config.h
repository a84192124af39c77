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

#ifndef FEDGBDT_CONFIG_H_
#define FEDGBDT_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "fedgbdt/gradient.h"

namespace fedgbdt {

enum class SplitMethod { kHist, kPartiallyRandom, kTotallyRandom };
enum class CandidateMethod { kUniform, kLog, kQuantile, kIterativeHessian };
enum class FeatureMode { kCyclical, kRandom };
// kLocal: every client noises its own (g, h) before release; aggregates are
// then noiseless sums of noisy values.
enum class PrivacyModel { kCentral, kLocal };
enum class PartitionPolicy { kOneRecordPerClient, kEqualShards };

std::string_view ToString(SplitMethod v);
std::string_view ToString(UpdateMode v);
std::string_view ToString(CandidateMethod v);
std::string_view ToString(FeatureMode v);
std::string_view ToString(PrivacyModel v);
std::string_view ToString(PartitionPolicy v);

SplitMethod ParseSplitMethod(std::string_view s);
UpdateMode ParseUpdateMode(std::string_view s);
CandidateMethod ParseCandidateMethod(std::string_view s);
FeatureMode ParseFeatureMode(std::string_view s);
PrivacyModel ParsePrivacyModel(std::string_view s);
PartitionPolicy ParsePartitionPolicy(std::string_view s);

// Everything needed to train one ensemble. Defaults follow the experimental
// protocol: Q=32, beta=2, eta=0.3, gamma=0, lambda=1, delta=1/n.
struct TrainConfig {
  int num_trees = 100;                      // T
  int max_depth = 4;                        // d
  int num_candidates = 32;                  // Q
  SplitMethod split_method = SplitMethod::kTotallyRandom;
  UpdateMode update_mode = UpdateMode::kNewton;
  CandidateMethod candidate_method = CandidateMethod::kUniform;
  int ih_rounds = 5;                        // s, used by kIterativeHessian
  FeatureMode feature_mode = FeatureMode::kCyclical;
  int feature_subset = 0;                   // k; 0 means all m features
  int batch_size = 1;                       // B
  double batch_fraction = 0.0;              // > 0 overrides B with p * T
  double eta = 0.3;
  double beta = 2.0;
  double lambda = 1.0;
  double gamma = 0.0;
  bool private_training = true;
  double epsilon = 1.0;
  double delta = 0.0;                       // 0 means 1/n
  PrivacyModel privacy_model = PrivacyModel::kCentral;
  bool batch_centering = true;
  int fixed_point_bits = 16;
  PartitionPolicy partition = PartitionPolicy::kOneRecordPerClient;
  int num_clients = 0;                      // equal-shards only; 0 means n
  std::uint64_t seed = 0;

  // k resolved against the data width.
  std::size_t FeatureSubsetSize(std::size_t num_features) const;
  // B resolved: Averaging always uses B = T; batch_fraction wins over
  // batch_size; result clamped to [1, T].
  int EffectiveBatchSize() const;
  int NumBatches() const;
  // Rounds of Hessian-histogram refinement actually run (min(s, T)), or 0.
  int EffectiveIhRounds() const;
  // True when IH refinement needs its own Hessian-histogram rounds, i.e. the
  // split method does not already release a root histogram for every tree.
  bool IhUsesOwnRounds(std::size_t num_features) const;
  // Number of features refined per IH round when it runs its own rounds.
  std::size_t IhFeaturesPerRound(std::size_t num_features) const;

  void Validate(std::size_t num_features) const;
};

}  // namespace fedgbdt

#endif  // FEDGBDT_CONFIG_H_
