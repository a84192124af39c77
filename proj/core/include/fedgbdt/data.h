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

#ifndef FEDGBDT_DATA_H_
#define FEDGBDT_DATA_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fedgbdt {

struct FeatureBounds {
  double lo = 0.0;
  double hi = 1.0;

  friend bool operator==(const FeatureBounds&, const FeatureBounds&) = default;
};

enum class FeatureKind { kContinuous, kCategoricalEncoded };

// Binary-labelled tabular data, row-major. Immutable once built.
struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<double> features;  // n * m, row-major
  std::vector<int> labels;
  std::vector<FeatureBounds> bounds;
  std::vector<FeatureKind> feature_kinds;
  // False when bounds were read off the data itself. Such bounds leak
  // information, so private training refuses them.
  bool bounds_declared = true;

  std::size_t num_rows() const { return labels.size(); }
  std::size_t num_features() const { return bounds.size(); }
  double at(std::size_t row, std::size_t feature) const {
    return features[row * num_features() + feature];
  }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * num_features(), num_features()};
  }

  Dataset Subset(std::span<const std::size_t> rows) const;
  // Checks shapes, binary labels and that every value sits inside its bounds.
  void Validate() const;
};

using BoundsMap = std::map<std::string, FeatureBounds>;

// Numeric CSV with a header row. Every column except `label_column` is a
// feature. Without declared bounds, per-column [min, max] is used and the
// dataset is flagged as having data-derived bounds.
Dataset LoadCsv(const std::string& path, const std::string& label_column,
                const std::optional<BoundsMap>& bounds = std::nullopt);

// Shortest round-trip decimal formatting, so LoadCsv(WriteCsv(d)) == d.
void WriteCsv(const Dataset& data, const std::string& path,
              const std::string& label_column = "label");

// {"feature name": [lo, hi], ...}
BoundsMap LoadBoundsJson(const std::string& path);
void WriteBoundsJson(const Dataset& data, const std::string& path);

struct SyntheticSpec {
  std::size_t num_rows = 1000;
  std::size_t num_features = 10;
  double skewed_fraction = 0.0;
  double class_balance = 0.5;
  std::uint64_t seed = 0;
};

// Features are U[0, 1] or, for the first round(skewed_fraction * m) columns,
// log-normal(0, 1) clipped to [0, e^5]. Labels follow a sparse logistic model
// on the standardized latent variables; the intercept is solved so the mean
// positive probability equals class_balance. Bounds are the analytic support.
Dataset Synthesize(const SyntheticSpec& spec);

struct SplitPair {
  Dataset train;
  Dataset test;
  double fraction = 0.7;
};

// Uniform shuffle, then floor(fraction * n) rows to train.
SplitPair TrainTestSplit(const Dataset& data, double fraction,
                         std::uint64_t seed);

}  // namespace fedgbdt

#endif  // FEDGBDT_DATA_H_
