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

#include "fedgbdt/config.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "fedgbdt/error.h"

namespace fedgbdt {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParameter: return "invalid_parameter";
    case ErrorCode::kGridMismatch: return "grid_mismatch";
    case ErrorCode::kZeroQuery: return "zero_query";
    case ErrorCode::kCalibrationFailed: return "calibration_failed";
    case ErrorCode::kShapeMismatch: return "shape_mismatch";
    case ErrorCode::kCodecOverflow: return "codec_overflow";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kNonBinaryLabel: return "non_binary_label";
    case ErrorCode::kOutOfBounds: return "out_of_bounds";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kUndefinedAuc: return "undefined_auc";
    case ErrorCode::kUnknownName: return "unknown_name";
    case ErrorCode::kMissingCells: return "missing_cells";
    case ErrorCode::kNonPrivateBounds: return "non_private_bounds";
  }
  return "unknown";
}

std::string_view ToString(SplitMethod v) {
  switch (v) {
    case SplitMethod::kHist: return "hist";
    case SplitMethod::kPartiallyRandom: return "pr";
    case SplitMethod::kTotallyRandom: return "tr";
  }
  return "";
}

std::string_view ToString(UpdateMode v) {
  switch (v) {
    case UpdateMode::kAveraging: return "averaging";
    case UpdateMode::kGradient: return "gradient";
    case UpdateMode::kNewton: return "newton";
  }
  return "";
}

std::string_view ToString(CandidateMethod v) {
  switch (v) {
    case CandidateMethod::kUniform: return "uniform";
    case CandidateMethod::kLog: return "log";
    case CandidateMethod::kQuantile: return "quantile";
    case CandidateMethod::kIterativeHessian: return "ih";
  }
  return "";
}

std::string_view ToString(FeatureMode v) {
  return v == FeatureMode::kCyclical ? "cyclical" : "random";
}

std::string_view ToString(PrivacyModel v) {
  return v == PrivacyModel::kCentral ? "central" : "local";
}

std::string_view ToString(PartitionPolicy v) {
  return v == PartitionPolicy::kOneRecordPerClient ? "one-record" : "equal-shards";
}

namespace {

[[noreturn]] void UnknownValue(std::string_view field, std::string_view value) {
  Fail(ErrorCode::kUnknownName,
       "unknown " + std::string(field) + " '" + std::string(value) + "'");
}

}  // namespace

SplitMethod ParseSplitMethod(std::string_view s) {
  if (s == "hist") return SplitMethod::kHist;
  if (s == "pr" || s == "partially-random") return SplitMethod::kPartiallyRandom;
  if (s == "tr" || s == "totally-random") return SplitMethod::kTotallyRandom;
  UnknownValue("split_method", s);
}

UpdateMode ParseUpdateMode(std::string_view s) {
  if (s == "averaging") return UpdateMode::kAveraging;
  if (s == "gradient") return UpdateMode::kGradient;
  if (s == "newton") return UpdateMode::kNewton;
  UnknownValue("update_mode", s);
}

CandidateMethod ParseCandidateMethod(std::string_view s) {
  if (s == "uniform") return CandidateMethod::kUniform;
  if (s == "log") return CandidateMethod::kLog;
  if (s == "quantile") return CandidateMethod::kQuantile;
  if (s == "ih" || s == "iterative-hessian") return CandidateMethod::kIterativeHessian;
  UnknownValue("candidate_method", s);
}

FeatureMode ParseFeatureMode(std::string_view s) {
  if (s == "cyclical") return FeatureMode::kCyclical;
  if (s == "random") return FeatureMode::kRandom;
  UnknownValue("feature_mode", s);
}

PrivacyModel ParsePrivacyModel(std::string_view s) {
  if (s == "central") return PrivacyModel::kCentral;
  if (s == "local") return PrivacyModel::kLocal;
  UnknownValue("privacy_model", s);
}

PartitionPolicy ParsePartitionPolicy(std::string_view s) {
  if (s == "one-record") return PartitionPolicy::kOneRecordPerClient;
  if (s == "equal-shards") return PartitionPolicy::kEqualShards;
  UnknownValue("partition", s);
}

std::size_t TrainConfig::FeatureSubsetSize(std::size_t num_features) const {
  if (feature_subset <= 0) return num_features;
  return std::min<std::size_t>(static_cast<std::size_t>(feature_subset), num_features);
}

int TrainConfig::EffectiveBatchSize() const {
  if (update_mode == UpdateMode::kAveraging) return num_trees;
  int b = batch_size;
  if (batch_fraction > 0.0) {
    b = static_cast<int>(std::lround(batch_fraction * num_trees));
  }
  return std::clamp(b, 1, std::max(num_trees, 1));
}

int TrainConfig::NumBatches() const {
  const int b = EffectiveBatchSize();
  return (num_trees + b - 1) / b;
}

int TrainConfig::EffectiveIhRounds() const {
  if (candidate_method != CandidateMethod::kIterativeHessian) return 0;
  return std::min(ih_rounds, num_trees);
}

bool TrainConfig::IhUsesOwnRounds(std::size_t num_features) const {
  if (EffectiveIhRounds() == 0) return false;
  switch (split_method) {
    case SplitMethod::kHist:
      return false;
    case SplitMethod::kPartiallyRandom:
      return FeatureSubsetSize(num_features) > 1;
    case SplitMethod::kTotallyRandom:
      return true;
  }
  return true;
}

std::size_t TrainConfig::IhFeaturesPerRound(std::size_t num_features) const {
  const std::size_t k = FeatureSubsetSize(num_features);
  if (feature_mode == FeatureMode::kRandom && k < num_features) return k;
  return num_features;
}

void TrainConfig::Validate(std::size_t num_features) const {
  auto require = [](bool ok, const std::string& what) {
    Require(ok, ErrorCode::kInvalidParameter, what);
  };
  require(num_features >= 1, "need at least one feature");
  require(num_trees >= 1, "num_trees must be >= 1");
  require(max_depth >= 1 && max_depth <= 20, "max_depth must be in [1, 20]");
  require(num_candidates >= 2, "num_candidates must be >= 2");
  require(feature_subset >= 0 &&
              static_cast<std::size_t>(feature_subset) <= num_features,
          "feature_subset must be in [0, m]");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(batch_fraction >= 0.0 && batch_fraction <= 1.0,
          "batch_fraction must be in [0, 1]");
  require(candidate_method != CandidateMethod::kIterativeHessian || ih_rounds >= 1,
          "ih_rounds must be >= 1 with iterative Hessian candidates");
  require(eta > 0.0, "eta must be > 0");
  require(beta >= 0.0, "beta must be >= 0");
  require(lambda >= 0.0, "lambda must be >= 0");
  require(gamma >= 0.0, "gamma must be >= 0");
  require(fixed_point_bits >= 1 && fixed_point_bits <= 48,
          "fixed_point_bits must be in [1, 48]");
  require(num_clients >= 0, "num_clients must be >= 0");
  if (private_training) {
    require(epsilon > 0.0, "epsilon must be > 0");
    require(delta >= 0.0 && delta < 1.0, "delta must be in [0, 1)");
    require(lambda > 0.0, "lambda must be > 0 under differential privacy");
  }
}

}  // namespace fedgbdt
