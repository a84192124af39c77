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

#include "fedgbdt/accountant.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fedgbdt/config.h"
#include "fedgbdt/error.h"

namespace fedgbdt {

void RdpCurve::Validate() const {
  Require(!alphas.empty(), ErrorCode::kInvalidParameter, "empty RDP curve");
  Require(alphas.size() == taus.size(), ErrorCode::kShapeMismatch,
          "RDP curve has " + std::to_string(alphas.size()) + " orders but " +
              std::to_string(taus.size()) + " values");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    Require(alphas[i] > 1.0, ErrorCode::kInvalidParameter,
            "Renyi order must be > 1");
    Require(i == 0 || alphas[i] > alphas[i - 1], ErrorCode::kInvalidParameter,
            "Renyi orders must be strictly increasing");
    Require(taus[i] >= 0.0, ErrorCode::kInvalidParameter,
            "RDP tau must be >= 0");
  }
}

void PrivacyBudget::Validate() const {
  Require(epsilon > 0.0, ErrorCode::kInvalidParameter, "epsilon must be > 0");
  Require(delta > 0.0 && delta < 1.0, ErrorCode::kInvalidParameter,
          "delta must be in (0, 1)");
}

std::vector<double> DefaultAlphaGrid() {
  std::vector<double> alphas;
  for (int i = 6; i <= 40; ++i) alphas.push_back(i * 0.25);  // 1.5 .. 10
  for (int a = 11; a <= 64; ++a) alphas.push_back(a);
  alphas.push_back(128);
  alphas.push_back(256);
  return alphas;
}

RdpCurve GaussianRdp(double sigma, std::span<const double> alphas) {
  Require(sigma > 0.0 && std::isfinite(sigma), ErrorCode::kInvalidParameter,
          "sigma must be positive, got " + std::to_string(sigma));
  RdpCurve curve;
  curve.alphas.assign(alphas.begin(), alphas.end());
  curve.taus.reserve(alphas.size());
  for (double a : alphas) curve.taus.push_back(a / (2.0 * sigma * sigma));
  curve.Validate();
  return curve;
}

RdpCurve ComposeSequential(std::span<const RdpCurve> curves,
                           std::span<const double> counts) {
  Require(curves.size() == counts.size(), ErrorCode::kShapeMismatch,
          "one count per curve required");
  if (curves.empty()) {
    RdpCurve zero;
    zero.alphas = DefaultAlphaGrid();
    zero.taus.assign(zero.alphas.size(), 0.0);
    return zero;
  }
  RdpCurve out;
  out.alphas = curves.front().alphas;
  out.taus.assign(out.alphas.size(), 0.0);
  for (std::size_t c = 0; c < curves.size(); ++c) {
    Require(curves[c].alphas == out.alphas, ErrorCode::kGridMismatch,
            "curves must share the same Renyi order grid");
    Require(counts[c] >= 0.0, ErrorCode::kInvalidParameter,
            "composition counts must be >= 0");
    for (std::size_t i = 0; i < out.taus.size(); ++i) {
      out.taus[i] += counts[c] * curves[c].taus[i];
    }
  }
  return out;
}

double RdpToDp(const RdpCurve& curve, double delta, RdpConversion conversion) {
  curve.Validate();
  Require(delta > 0.0 && delta < 1.0, ErrorCode::kInvalidParameter,
          "delta must be in (0, 1)");
  const double log_delta = std::log(delta);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < curve.alphas.size(); ++i) {
    const double a = curve.alphas[i];
    double eps;
    if (conversion == RdpConversion::kStandard) {
      eps = curve.taus[i] - log_delta / (a - 1.0);
    } else {
      eps = curve.taus[i] + std::log((a - 1.0) / a) -
            (log_delta + std::log(a)) / (a - 1.0);
    }
    best = std::min(best, eps);
  }
  return std::max(best, 0.0);
}

double GaussianEpsilon(double sigma, std::int64_t num_queries, double delta,
                       std::span<const double> alphas,
                       RdpConversion conversion) {
  Require(num_queries >= 0, ErrorCode::kInvalidParameter,
          "query count must be >= 0");
  RdpCurve curve = GaussianRdp(sigma, alphas);
  for (double& t : curve.taus) t *= static_cast<double>(num_queries);
  return RdpToDp(curve, delta, conversion);
}

double CalibrateSigma(const PrivacyBudget& budget, const QueryCounter& counter,
                      std::span<const double> alphas,
                      RdpConversion conversion) {
  budget.Validate();
  Require(counter.kappa_c >= 0 && counter.kappa_s >= 0 && counter.kappa_w >= 0,
          ErrorCode::kInvalidParameter, "query counts must be >= 0");
  const std::int64_t k = counter.total();
  Require(k >= 1, ErrorCode::kZeroQuery,
          "no noisy queries to calibrate for; run without noise");
  auto eps_at = [&](double s) {
    return GaussianEpsilon(s, k, budget.delta, alphas, conversion);
  };
  double lo = 1e-3;
  double hi = 1e4;
  if (eps_at(hi) > budget.epsilon) {
    Fail(ErrorCode::kCalibrationFailed,
         "epsilon " + std::to_string(budget.epsilon) +
             " unreachable with sigma <= 1e4 for " + std::to_string(k) +
             " queries");
  }
  if (eps_at(lo) <= budget.epsilon) return lo;
  // Invariant: eps(lo) > epsilon >= eps(hi).
  for (int it = 0; it < 200 && (hi - lo) > 1e-4 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (eps_at(mid) <= budget.epsilon) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

QueryCounter CountQueries(const TrainConfig& config, std::size_t num_features) {
  QueryCounter q;
  if (!config.private_training) return q;
  const std::int64_t trees = config.num_trees;
  if (config.privacy_model == PrivacyModel::kLocal) {
    q.kappa_w = trees;
    return q;
  }
  const auto k = static_cast<std::int64_t>(config.FeatureSubsetSize(num_features));
  switch (config.split_method) {
    case SplitMethod::kHist:
    case SplitMethod::kPartiallyRandom:
      // One query per (level, feature): nodes on a level partition the data.
      // With a single feature the whole tree is read off one root histogram.
      q.kappa_s = k == 1 ? trees : trees * k * config.max_depth;
      break;
    case SplitMethod::kTotallyRandom:
      q.kappa_w = trees;
      break;
  }
  if (config.IhUsesOwnRounds(num_features)) {
    q.kappa_c = static_cast<std::int64_t>(config.EffectiveIhRounds()) *
                static_cast<std::int64_t>(config.IhFeaturesPerRound(num_features));
  }
  return q;
}

}  // namespace fedgbdt
