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

#include <algorithm>
#include <cmath>
#include <string>

#include "fedgbdt/error.h"
#include "fedgbdt/rng.h"
#include "fedgbdt/trees.h"

namespace fedgbdt {

namespace {

constexpr std::uint64_t kFeatureStream = 0x7EA7;
constexpr std::uint64_t kTreeStream = 0x74EE;

std::vector<double> Clamped(std::span<const double> x,
                            const std::vector<FeatureBounds>& bounds) {
  std::vector<double> out(x.begin(), x.end());
  for (std::size_t j = 0; j < out.size() && j < bounds.size(); ++j) {
    out[j] = std::clamp(out[j], bounds[j].lo, bounds[j].hi);
  }
  return out;
}

}  // namespace

double BatchedUpdate(double prev_raw, std::span<const double> leaf_weights,
                     double eta, bool centered) {
  Require(!leaf_weights.empty(), ErrorCode::kInvalidParameter, "empty batch");
  double mean = 0.0;
  for (double w : leaf_weights) mean += w;
  mean /= static_cast<double>(leaf_weights.size());
  return prev_raw + eta * (Sigmoid(mean) - (centered ? 0.5 : 0.0));
}

double Ensemble::PredictRaw(std::span<const double> x) const {
  Require(x.size() == num_features, ErrorCode::kShapeMismatch,
          "expected " + std::to_string(num_features) + " features, got " +
              std::to_string(x.size()));
  const std::vector<double> v = Clamped(x, bounds);
  switch (kind) {
    case EnsembleKind::kBoosted: {
      double raw = 0.0;
      for (const Tree& t : trees) raw += t.Predict(v);
      return raw;
    }
    case EnsembleKind::kBatched: {
      double raw = 0.0;
      std::vector<double> w;
      for (std::size_t b = 0; b < batch_boundaries.size(); ++b) {
        const std::size_t end =
            b + 1 < batch_boundaries.size() ? batch_boundaries[b + 1] : trees.size();
        w.clear();
        for (std::size_t t = batch_boundaries[b]; t < end; ++t) {
          w.push_back(trees[t].Predict(v));
        }
        if (!w.empty()) raw = BatchedUpdate(raw, w, eta, centered);
      }
      return raw;
    }
    case EnsembleKind::kAveraged: {
      if (trees.empty()) return 0.5;
      double sum = 0.0;
      for (const Tree& t : trees) sum += t.Predict(v);
      return sum / static_cast<double>(trees.size());
    }
  }
  return 0.0;
}

double Ensemble::Predict(std::span<const double> x) const {
  const double raw = PredictRaw(x);
  return kind == EnsembleKind::kAveraged ? raw : Sigmoid(raw);
}

std::vector<double> Ensemble::PredictAll(const Dataset& data) const {
  std::vector<double> out(data.num_rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = Predict(data.row(i));
  return out;
}

TrainResult Train(const TrainConfig& config, Federation& federation) {
  const std::size_t m = federation.num_features();
  config.Validate(m);
  Require(config.privacy_model == federation.privacy_model(),
          ErrorCode::kInvalidParameter,
          "federation and config disagree on the privacy model");
  const auto bounds = federation.bounds();
  const std::vector<FeatureBounds> bounds_vec(bounds.begin(), bounds.end());

  TrainResult result;
  result.delta = config.delta > 0.0
                     ? config.delta
                     : 1.0 / static_cast<double>(federation.num_records());
  result.planned = CountQueries(config, m);
  if (config.private_training) {
    Require(federation.bounds_declared(), ErrorCode::kNonPrivateBounds,
            "feature bounds were derived from the data; declare bounds for "
            "private training");
    result.sigma = CalibrateSigma({config.epsilon, result.delta}, result.planned,
                                  DefaultAlphaGrid());
    federation.EnablePrivacy(result.sigma);
  } else {
    federation.DisablePrivacy();
  }

  const int q = config.num_candidates;
  SplitCandidateSet cand;
  switch (config.candidate_method) {
    case CandidateMethod::kUniform:
    case CandidateMethod::kIterativeHessian:
      cand = UniformCandidates(bounds, q);
      break;
    case CandidateMethod::kLog:
      cand = LogCandidates(bounds, q);
      break;
    case CandidateMethod::kQuantile:
      cand = federation.QuantileCandidates(q);
      result.uses_private_candidates = false;
      break;
  }

  const int total = config.num_trees;
  const int batch = config.EffectiveBatchSize();
  Ensemble& ens = result.ensemble;
  ens.update_mode = config.update_mode;
  ens.eta = config.eta;
  ens.centered = config.batch_centering;
  ens.num_features = m;
  ens.bounds = bounds_vec;
  BuildContext ctx;
  ctx.method = config.split_method;
  ctx.mode = config.update_mode;
  ctx.max_depth = config.max_depth;
  ctx.candidates = &cand;
  ctx.lambda = config.lambda;
  ctx.gamma = config.gamma;
  ctx.eta = config.eta;
  ctx.beta = config.beta;
  if (config.update_mode == UpdateMode::kAveraging) {
    ens.kind = EnsembleKind::kAveraged;
    ctx.leaf_rule = LeafRule::kAveraged;
  } else if (batch == 1) {
    ens.kind = EnsembleKind::kBoosted;
    ctx.leaf_rule = LeafRule::kBoosted;
  } else {
    ens.kind = EnsembleKind::kBatched;
    ctx.leaf_rule = LeafRule::kBatched;
  }

  const std::size_t k = config.FeatureSubsetSize(m);
  const Rng feature_root(config.seed, kFeatureStream);
  const Rng tree_root(config.seed, kTreeStream);
  std::vector<std::vector<std::size_t>> features(total);
  for (int t = 0; t < total; ++t) {
    Rng r = feature_root.Derive(t);
    features[t] = SelectFeatures(config.feature_mode, k, t, m, r);
  }

  const int ih_rounds = config.EffectiveIhRounds();
  const bool ih_own = config.IhUsesOwnRounds(m);
  const bool ih_all_features = config.IhFeaturesPerRound(m) == m;

  for (int start = 0; start < total; start += batch) {
    const int size = std::min(batch, total - start);
    federation.BeginBatch(config.update_mode, size);

    if (ih_own) {
      for (int t = start; t < start + size && t < ih_rounds; ++t) {
        std::vector<std::size_t> refine;
        if (ih_all_features) {
          for (std::size_t j = 0; j < m; ++j) refine.push_back(j);
        } else {
          refine = features[t];
        }
        std::vector<Query> queries;
        for (std::size_t j : refine) {
          HistogramQuery hq;
          hq.tree_slot = t - start;
          hq.feature = j;
          hq.thresholds = cand[j];
          hq.hessian_only = true;
          hq.role = QueryRole::kCandidate;
          queries.emplace_back(std::move(hq));
        }
        const auto answers = federation.Round(queries);
        for (std::size_t i = 0; i < refine.size(); ++i) {
          const std::size_t j = refine[i];
          cand.per_feature[j] = RefineThresholds(answers[i], cand[j], bounds[j], q);
        }
      }
    }

    std::vector<TreeBuilder> builders;
    builders.reserve(size);
    for (int t = start; t < start + size; ++t) {
      builders.emplace_back(ctx, features[t], t - start, tree_root.Derive(t));
    }
    // Trees of one batch share every round.
    while (true) {
      std::vector<Query> queries;
      std::vector<std::size_t> owner;
      for (std::size_t b = 0; b < builders.size(); ++b) {
        if (builders[b].done()) continue;
        for (auto& query : builders[b].NextQueries()) {
          queries.push_back(std::move(query));
          owner.push_back(b);
        }
      }
      if (queries.empty()) break;
      const auto answers = federation.Round(queries);
      std::size_t i = 0;
      while (i < answers.size()) {
        const std::size_t b = owner[i];
        std::size_t e = i;
        while (e < answers.size() && owner[e] == b) ++e;
        builders[b].Consume(std::span(answers).subspan(i, e - i));
        i = e;
      }
    }

    if (ih_rounds > 0 && !ih_own) {
      // Refine from the root histograms the trees already released.
      for (std::size_t j = 0; j < m; ++j) {
        std::vector<double> sum;
        int count = 0;
        for (int t = start; t < start + size && t < ih_rounds; ++t) {
          auto h = builders[t - start].RootHessian(j);
          if (!h) continue;
          if (sum.empty()) sum.assign(h->size(), 0.0);
          for (std::size_t b = 0; b < h->size(); ++b) sum[b] += (*h)[b];
          ++count;
        }
        if (count == 0) continue;
        for (double& v : sum) v /= count;
        cand.per_feature[j] = RefineThresholds(sum, cand[j], bounds[j], q);
      }
    }

    std::vector<Tree> trees;
    for (auto& b : builders) trees.push_back(b.TakeTree());
    if (ens.kind == EnsembleKind::kBoosted) {
      federation.ApplyUpdate(trees, [](double raw, std::span<const double> w) {
        for (double x : w) raw += x;
        return raw;
      });
    } else if (ens.kind == EnsembleKind::kBatched) {
      const double eta = config.eta;
      const bool centered = config.batch_centering;
      federation.ApplyUpdate(trees, [eta, centered](double raw, std::span<const double> w) {
        return BatchedUpdate(raw, w, eta, centered);
      });
    }
    ens.batch_boundaries.push_back(static_cast<std::size_t>(start));
    for (auto& t : trees) ens.trees.push_back(std::move(t));
  }
  result.final_candidates = cand;
  return result;
}

}  // namespace fedgbdt
