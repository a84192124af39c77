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

#include "fedgbdt/boosting.h"

#include <cmath>

#include <gtest/gtest.h>

#include "fedgbdt/config_io.h"
#include "fedgbdt/harness.h"
#include "test_util.h"

namespace fedgbdt {
namespace {

Dataset Small(std::uint64_t seed, std::size_t n = 400, std::size_t m = 4) {
  return Synthesize({n, m, 0.5, 0.5, seed});
}

TEST(BatchedUpdateTest, Examples) {
  const std::vector<double> zeros(5, 0.0);
  EXPECT_EQ(BatchedUpdate(0.7, zeros, 0.3), 0.7);
  const std::vector<double> pair{1.3, -1.3};
  EXPECT_NEAR(BatchedUpdate(-0.2, pair, 0.3), -0.2, 1e-15);
  const std::vector<double> two{2.0};
  EXPECT_NEAR(BatchedUpdate(0.0, two, 1.0), 1.0 / (1.0 + std::exp(-2.0)) - 0.5, 1e-15);
  EXPECT_NEAR(BatchedUpdate(0.0, two, 1.0), 0.3808, 1e-4);
  EXPECT_NEAR(BatchedUpdate(0.0, zeros, 1.0, false), 0.5, 1e-15);
  EXPECT_ERROR_CODE(BatchedUpdate(0.0, std::vector<double>{}, 1.0),
                    ErrorCode::kInvalidParameter);
}

TEST(EnsembleTest, PredictExamples) {
  Ensemble e;
  e.kind = EnsembleKind::kAveraged;
  e.num_features = 1;
  e.bounds = {{0, 1}};
  const std::vector<double> x{0.5};
  EXPECT_EQ(e.Predict(x), 0.5);
  Tree one;
  one.SetWeight(0, 1.0);
  e.trees = {one, one, one};
  EXPECT_EQ(e.Predict(x), 1.0);
  EXPECT_ERROR_CODE(e.Predict(std::vector<double>{0.5, 0.5}), ErrorCode::kShapeMismatch);

  e.kind = EnsembleKind::kBoosted;
  e.trees.clear();
  EXPECT_EQ(e.Predict(x), 0.5);
}

TEST(EnsembleTest, InputsAreClampedToBounds) {
  Ensemble e;
  e.num_features = 1;
  e.bounds = {{0, 1}};
  Tree t(1, {0});
  const int l = t.Split(0, 0, 1.0);
  t.SetWeight(l, -1.0);
  t.SetWeight(l + 1, 1.0);
  e.trees = {t};
  EXPECT_EQ(e.PredictRaw(std::vector<double>{5.0}), -1.0);
}

TEST(TrainTest, BoostedRawIsSumOfPathWeights) {
  const Dataset d = Small(1);
  auto fed = testing::MakeFederation(d);
  TrainConfig c;
  c.num_trees = 10;
  c.split_method = SplitMethod::kHist;
  c.max_depth = 3;
  const TrainResult r = Train(c, fed);
  ASSERT_EQ(r.ensemble.kind, EnsembleKind::kBoosted);
  ASSERT_EQ(r.ensemble.trees.size(), 10u);
  for (std::size_t i = 0; i < d.num_rows(); ++i) {
    double raw = 0;
    for (const Tree& t : r.ensemble.trees) {
      int node = 0;
      while (!t.node(node).is_leaf) {
        const TreeNode& n = t.node(node);
        node = d.at(i, n.feature) <= n.threshold ? n.left : n.right;
      }
      raw += t.node(node).weight;
    }
    EXPECT_NEAR(r.ensemble.PredictRaw(d.row(i)), raw, 1e-12);
  }
}

TEST(TrainTest, Deterministic) {
  const Dataset d = Small(2);
  for (const std::string name : {"DP-TR-Newton", "DP-GBM", "DP-TR-Batch-Newton-IH-EBM"}) {
    TrainConfig c = BaselinePreset(name);
    c.num_trees = 8;
    c.seed = 42;
    auto fa = testing::MakeFederation(d, {16, c.privacy_model, 5});
    auto fb = testing::MakeFederation(d, {16, c.privacy_model, 5});
    const auto a = Train(c, fa).ensemble.PredictAll(d);
    const auto b = Train(c, fb).ensemble.PredictAll(d);
    EXPECT_EQ(a, b) << name;
  }
}

TEST(TrainTest, AveragingMatchesLeafProportions) {
  // Noise-free averaging: each tree's leaf holds the positive share of its
  // records, and the model averages those shares.
  const Dataset d = Small(3, 300, 3);
  auto fed = testing::MakeFederation(d);
  TrainConfig c;
  c.update_mode = UpdateMode::kAveraging;
  c.private_training = false;
  c.num_trees = 6;
  c.max_depth = 2;
  c.lambda = 1e-9;
  const TrainResult r = Train(c, fed);
  ASSERT_EQ(r.ensemble.kind, EnsembleKind::kAveraged);
  std::vector<double> want(d.num_rows(), 0.0);
  for (const Tree& t : r.ensemble.trees) {
    for (int leaf : t.Leaves()) {
      double pos = 0, count = 0;
      for (std::size_t i = 0; i < d.num_rows(); ++i) {
        if (t.Route(d.row(i)) != leaf) continue;
        pos += d.labels[i];
        count += 1;
      }
      const double share = count > 0 ? pos / (count + c.lambda) : 0.0;
      EXPECT_NEAR(t.node(leaf).weight, share, 1e-6);
    }
    for (std::size_t i = 0; i < d.num_rows(); ++i) want[i] += t.Predict(d.row(i)) / 6;
  }
  const auto got = r.ensemble.PredictAll(d);
  for (std::size_t i = 0; i < d.num_rows(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
}

TEST(TrainTest, BarriersAreBatches) {
  const Dataset d = Small(4);
  for (int b : {1, 3, 7, 10}) {
    TrainConfig c = BaselinePreset("DP-TR-Newton");
    c.num_trees = 10;
    c.batch_size = b;
    auto fed = testing::MakeFederation(d);
    const TrainResult r = Train(c, fed);
    EXPECT_EQ(fed.stats().gradient_barriers, (10 + b - 1) / b) << b;
    EXPECT_EQ(r.ensemble.batch_boundaries.size(), static_cast<std::size_t>((10 + b - 1) / b));
  }
}

TEST(TrainTest, LedgerMatchesPlanAcrossConfigs) {
  const Dataset d = Small(5, 200, 5);
  Rng rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const auto& names = PresetNames();
    TrainConfig c = BaselinePreset(names[rng.UniformInt(names.size())]);
    c.num_trees = 1 + static_cast<int>(rng.UniformInt(12));
    c.max_depth = 1 + static_cast<int>(rng.UniformInt(3));
    c.num_candidates = 2 + static_cast<int>(rng.UniformInt(8));
    c.ih_rounds = 1 + static_cast<int>(rng.UniformInt(4));
    if (c.update_mode != UpdateMode::kAveraging && rng.Uniform() < 0.5) {
      c.batch_size = 1 + static_cast<int>(rng.UniformInt(c.num_trees));
    }
    if (rng.Uniform() < 0.5) {
      c.feature_subset = 1 + static_cast<int>(rng.UniformInt(5));
      c.feature_mode = rng.Uniform() < 0.5 ? FeatureMode::kRandom : FeatureMode::kCyclical;
    }
    c.seed = trial;
    auto fed = testing::MakeFederation(d, {16, c.privacy_model, 1});
    const TrainResult r = Train(c, fed);
    EXPECT_EQ(fed.stats().ledger, r.planned) << ConfigToText(c);
    EXPECT_EQ(r.planned, CountQueries(c, d.num_features()));
  }
}

TEST(TrainTest, NoiselessHistNewtonTrainingAucIsMonotone) {
  const Dataset d = Small(6, 1000, 5);
  double prev = 0, first = 0;
  for (int t : {1, 5, 20, 60}) {
    TrainConfig c;
    c.split_method = SplitMethod::kHist;
    c.private_training = false;
    c.num_trees = t;
    c.max_depth = 3;
    auto fed = testing::MakeFederation(d);
    const auto r = Train(c, fed);
    const double auc = AucRoc(d.labels, r.ensemble.PredictAll(d));
    EXPECT_GE(auc, prev - 1e-12) << t;
    if (t == 1) first = auc;
    prev = auc;
  }
  EXPECT_GT(prev, first + 0.05);
}

TEST(TrainTest, PrivateTrainingNeedsDeclaredBounds) {
  Dataset d = Small(7);
  d.bounds_declared = false;
  auto fed = testing::MakeFederation(d);
  TrainConfig c;
  c.num_trees = 2;
  EXPECT_ERROR_CODE(Train(c, fed), ErrorCode::kNonPrivateBounds);
  c.private_training = false;
  Train(c, fed);
}

TEST(TrainTest, PrivacyModelMustMatch) {
  const Dataset d = Small(8);
  auto fed = testing::MakeFederation(d);
  TrainConfig c;
  c.num_trees = 2;
  c.privacy_model = PrivacyModel::kLocal;
  EXPECT_ERROR_CODE(Train(c, fed), ErrorCode::kInvalidParameter);
}

}  // namespace
}  // namespace fedgbdt
