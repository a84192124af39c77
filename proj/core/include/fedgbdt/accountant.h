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

// Renyi-DP accounting for Gaussian mechanisms and the (kappa_c, kappa_s,
// kappa_w) query ledger of a training configuration.
//
// All functions are pure and thread-safe.

#ifndef FEDGBDT_ACCOUNTANT_H_
#define FEDGBDT_ACCOUNTANT_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fedgbdt {

struct TrainConfig;

// tau(alpha) sampled on a grid of Renyi orders. alphas strictly increasing
// and > 1, taus >= 0, equal length.
struct RdpCurve {
  std::vector<double> alphas;
  std::vector<double> taus;

  void Validate() const;
};

struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 1e-5;

  void Validate() const;
};

struct QueryCounter {
  std::int64_t kappa_c = 0;  // split-candidate queries
  std::int64_t kappa_s = 0;  // inner-node split queries
  std::int64_t kappa_w = 0;  // leaf-weight queries

  std::int64_t total() const { return kappa_c + kappa_s + kappa_w; }
  friend bool operator==(const QueryCounter&, const QueryCounter&) = default;
};

// Noise for one release: Gaussian with stddev sigma * sensitivity.
struct NoiseScale {
  double sigma = 0.0;
  double sensitivity = 1.0;

  double stddev() const { return sigma * sensitivity; }
  bool active() const { return sigma > 0.0; }
};

enum class RdpConversion {
  // eps = tau(alpha) + log(1/delta) / (alpha - 1)
  kStandard,
  // eps = tau(alpha) + log((alpha-1)/alpha) - (log(delta) + log(alpha)) /
  // (alpha - 1). Tighter; opt-in only.
  kImproved,
};

// {1.5, 1.75, ..., 10} u {11, ..., 64} u {128, 256}.
std::vector<double> DefaultAlphaGrid();

// tau(alpha) = alpha / (2 sigma^2).
RdpCurve GaussianRdp(double sigma, std::span<const double> alphas);

// tau_out(alpha) = sum_i counts[i] * tau_i(alpha). An empty list yields the
// all-zero curve on the default grid.
RdpCurve ComposeSequential(std::span<const RdpCurve> curves,
                           std::span<const double> counts);

// Smallest epsilon over the curve's grid for the given delta.
double RdpToDp(const RdpCurve& curve, double delta,
               RdpConversion conversion = RdpConversion::kStandard);

// Epsilon of `num_queries` composed Gaussian mechanisms with multiplier sigma.
double GaussianEpsilon(double sigma, std::int64_t num_queries, double delta,
                       std::span<const double> alphas,
                       RdpConversion conversion = RdpConversion::kStandard);

// Smallest sigma (bisection on [1e-3, 1e4], relative tolerance 1e-4) such
// that counter.total() composed Gaussian queries satisfy the budget.
// Throws kZeroQuery when the counter is empty; kCalibrationFailed when even
// sigma = 1e4 is not enough.
double CalibrateSigma(const PrivacyBudget& budget, const QueryCounter& counter,
                      std::span<const double> alphas,
                      RdpConversion conversion = RdpConversion::kStandard);

// Exact number of noisy queries the trainer issues for `config` on data with
// `num_features` columns.
QueryCounter CountQueries(const TrainConfig& config, std::size_t num_features);

}  // namespace fedgbdt

#endif  // FEDGBDT_ACCOUNTANT_H_
