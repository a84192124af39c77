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

#include "fedgbdt/data.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string_view>

#include <nlohmann/json.hpp>

#include "fedgbdt/error.h"
#include "fedgbdt/gradient.h"
#include "fedgbdt/rng.h"

namespace fedgbdt {

Dataset Dataset::Subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.feature_names = feature_names;
  out.bounds = bounds;
  out.feature_kinds = feature_kinds;
  out.bounds_declared = bounds_declared;
  const std::size_t m = num_features();
  out.features.reserve(rows.size() * m);
  out.labels.reserve(rows.size());
  for (std::size_t r : rows) {
    Require(r < num_rows(), ErrorCode::kInvalidParameter, "row index out of range");
    auto x = row(r);
    out.features.insert(out.features.end(), x.begin(), x.end());
    out.labels.push_back(labels[r]);
  }
  return out;
}

void Dataset::Validate() const {
  const std::size_t m = num_features();
  const std::size_t n = num_rows();
  Require(m >= 1, ErrorCode::kShapeMismatch, "dataset has no features");
  Require(features.size() == n * m, ErrorCode::kShapeMismatch,
          "feature matrix size does not match n * m");
  Require(feature_names.size() == m && feature_kinds.size() == m,
          ErrorCode::kShapeMismatch, "per-feature metadata has wrong length");
  for (std::size_t j = 0; j < m; ++j) {
    Require(bounds[j].lo < bounds[j].hi, ErrorCode::kInvalidParameter,
            "degenerate bounds for feature '" + feature_names[j] + "'");
  }
  for (std::size_t i = 0; i < n; ++i) {
    Require(labels[i] == 0 || labels[i] == 1, ErrorCode::kNonBinaryLabel,
            "label of row " + std::to_string(i) + " is not 0/1");
    for (std::size_t j = 0; j < m; ++j) {
      const double v = at(i, j);
      Require(v >= bounds[j].lo && v <= bounds[j].hi, ErrorCode::kOutOfBounds,
              "row " + std::to_string(i) + ", feature '" + feature_names[j] +
                  "': value " + std::to_string(v) + " outside declared bounds");
    }
  }
}

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

std::vector<std::string_view> SplitLine(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(Trim(line.substr(start)));
      break;
    }
    cells.push_back(Trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

std::string FormatDouble(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

Dataset LoadCsv(const std::string& path, const std::string& label_column,
                const std::optional<BoundsMap>& bounds) {
  std::ifstream in(path);
  Require(in.good(), ErrorCode::kIo, "cannot open '" + path + "'");
  std::string line;
  Require(static_cast<bool>(std::getline(in, line)), ErrorCode::kParse,
          path + ": missing header row");
  std::vector<std::string> header;
  for (auto cell : SplitLine(line)) header.emplace_back(cell);
  auto label_it = std::find(header.begin(), header.end(), label_column);
  Require(label_it != header.end(), ErrorCode::kParse,
          path + ": no column named '" + label_column + "'");
  const std::size_t label_idx = label_it - header.begin();

  Dataset d;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_idx) d.feature_names.push_back(header[c]);
  }
  const std::size_t m = d.feature_names.size();
  Require(m >= 1, ErrorCode::kParse, path + ": no feature columns");

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    auto cells = SplitLine(line);
    Require(cells.size() == header.size(), ErrorCode::kParse,
            path + ":" + std::to_string(line_no) + ": expected " +
                std::to_string(header.size()) + " cells, got " +
                std::to_string(cells.size()));
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cells[c].data(),
                                       cells[c].data() + cells[c].size(), v);
      if (ec != std::errc() || ptr != cells[c].data() + cells[c].size() ||
          !std::isfinite(v)) {
        Fail(ErrorCode::kParse, path + ":" + std::to_string(line_no) +
                                    ": column '" + header[c] +
                                    "': not a number: '" + std::string(cells[c]) +
                                    "'");
      }
      if (c == label_idx) {
        if (v != 0.0 && v != 1.0) {
          Fail(ErrorCode::kNonBinaryLabel,
               path + ":" + std::to_string(line_no) + ": label '" +
                   std::string(cells[c]) + "' is not 0 or 1");
        }
        d.labels.push_back(static_cast<int>(v));
      } else {
        d.features.push_back(v);
      }
    }
  }
  const std::size_t n = d.labels.size();
  Require(n >= 1, ErrorCode::kParse, path + ": no data rows");
  d.feature_kinds.assign(m, FeatureKind::kContinuous);

  if (bounds) {
    for (const auto& name : d.feature_names) {
      auto it = bounds->find(name);
      Require(it != bounds->end(), ErrorCode::kInvalidParameter,
              "no declared bounds for feature '" + name + "'");
      d.bounds.push_back(it->second);
    }
    d.bounds_declared = true;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        const double v = d.at(i, j);
        if (v < d.bounds[j].lo || v > d.bounds[j].hi) {
          Fail(ErrorCode::kOutOfBounds,
               path + ":" + std::to_string(i + 2) + ": column '" +
                   d.feature_names[j] + "': value " + FormatDouble(v) +
                   " outside declared bounds [" + FormatDouble(d.bounds[j].lo) +
                   ", " + FormatDouble(d.bounds[j].hi) + "]");
        }
      }
    }
  } else {
    d.bounds_declared = false;
    for (std::size_t j = 0; j < m; ++j) {
      // Row-major with width m; at() needs bounds, which are not set yet.
      FeatureBounds b{d.features[j], d.features[j]};
      for (std::size_t i = 1; i < n; ++i) {
        b.lo = std::min(b.lo, d.features[i * m + j]);
        b.hi = std::max(b.hi, d.features[i * m + j]);
      }
      if (b.hi <= b.lo) b.hi = b.lo + 1.0;  // constant column
      d.bounds.push_back(b);
    }
  }
  d.Validate();
  return d;
}

void WriteCsv(const Dataset& data, const std::string& path,
              const std::string& label_column) {
  std::ofstream out(path);
  Require(out.good(), ErrorCode::kIo, "cannot write '" + path + "'");
  for (const auto& name : data.feature_names) out << name << ',';
  out << label_column << '\n';
  for (std::size_t i = 0; i < data.num_rows(); ++i) {
    for (double v : data.row(i)) out << FormatDouble(v) << ',';
    out << data.labels[i] << '\n';
  }
  Require(out.good(), ErrorCode::kIo, "write to '" + path + "' failed");
}

BoundsMap LoadBoundsJson(const std::string& path) {
  std::ifstream in(path);
  Require(in.good(), ErrorCode::kIo, "cannot open '" + path + "'");
  BoundsMap out;
  try {
    const auto j = nlohmann::json::parse(in);
    Require(j.is_object(), ErrorCode::kParse, path + ": expected a JSON object");
    for (const auto& [name, pair] : j.items()) {
      Require(pair.is_array() && pair.size() == 2, ErrorCode::kParse,
              path + ": bounds for '" + name + "' must be [lo, hi]");
      FeatureBounds b{pair[0].get<double>(), pair[1].get<double>()};
      Require(b.lo < b.hi, ErrorCode::kInvalidParameter,
              path + ": bounds for '" + name + "' need lo < hi");
      out[name] = b;
    }
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kParse, path + ": " + e.what());
  }
  return out;
}

void WriteBoundsJson(const Dataset& data, const std::string& path) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t f = 0; f < data.num_features(); ++f) {
    j[data.feature_names[f]] = {data.bounds[f].lo, data.bounds[f].hi};
  }
  std::ofstream out(path);
  Require(out.good(), ErrorCode::kIo, "cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

Dataset Synthesize(const SyntheticSpec& spec) {
  const std::size_t n = spec.num_rows;
  const std::size_t m = spec.num_features;
  Require(n >= 2 && m >= 1, ErrorCode::kInvalidParameter,
          "synthetic data needs n >= 2 and m >= 1");
  Require(spec.skewed_fraction >= 0.0 && spec.skewed_fraction <= 1.0 &&
              spec.class_balance >= 0.0 && spec.class_balance <= 1.0,
          ErrorCode::kInvalidParameter, "proportions must lie in [0, 1]");

  const Rng root(spec.seed, 0x5EED);
  const auto num_skewed =
      static_cast<std::size_t>(std::lround(spec.skewed_fraction * m));
  const double tail = std::exp(5.0);

  Dataset d;
  d.features.resize(n * m);
  d.labels.resize(n);
  for (std::size_t j = 0; j < m; ++j) {
    d.feature_names.push_back("x" + std::to_string(j));
    d.feature_kinds.push_back(FeatureKind::kContinuous);
    d.bounds.push_back(j < num_skewed ? FeatureBounds{0.0, tail}
                                      : FeatureBounds{0.0, 1.0});
  }

  // Sparse coefficients: about half the features matter, |w| in [1, 2].
  Rng coef_rng = root.Derive(1);
  const std::size_t active = std::max<std::size_t>(1, (m + 1) / 2);
  std::vector<double> weight(m, 0.0);
  for (std::size_t j : SampleWithoutReplacement(m, active, coef_rng)) {
    const double mag = 1.0 + coef_rng.Uniform();
    weight[j] = coef_rng.Uniform() < 0.5 ? -mag : mag;
  }

  Rng feat_rng = root.Derive(2);
  std::vector<double> logit(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double latent;
      double value;
      if (j < num_skewed) {
        latent = feat_rng.Normal();
        value = std::min(std::exp(latent), tail);
      } else {
        value = feat_rng.Uniform();
        latent = (value - 0.5) * std::sqrt(12.0);
      }
      d.features[i * m + j] = value;
      logit[i] += weight[j] * latent;
    }
  }

  // Solve mean(sigmoid(logit + b)) = class_balance for b by bisection.
  double lo = -60.0;
  double hi = 60.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    double mean = 0.0;
    for (double z : logit) mean += Sigmoid(z + mid);
    mean /= static_cast<double>(n);
    if (mean < spec.class_balance) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double intercept = 0.5 * (lo + hi);

  Rng label_rng = root.Derive(3);
  for (std::size_t i = 0; i < n; ++i) {
    d.labels[i] = label_rng.Uniform() < Sigmoid(logit[i] + intercept) ? 1 : 0;
  }
  d.bounds_declared = true;
  return d;
}

SplitPair TrainTestSplit(const Dataset& data, double fraction,
                         std::uint64_t seed) {
  Require(fraction > 0.0 && fraction < 1.0, ErrorCode::kInvalidParameter,
          "train fraction must be in (0, 1)");
  const std::size_t n = data.num_rows();
  const auto n_train =
      static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  Require(n_train >= 1 && n_train < n, ErrorCode::kInvalidParameter,
          "split of " + std::to_string(n) + " rows at fraction " +
              std::to_string(fraction) + " leaves one side empty");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed, 0x5A1D);
  Shuffle(perm, rng);
  SplitPair out;
  out.fraction = fraction;
  out.train = data.Subset(std::span(perm).first(n_train));
  out.test = data.Subset(std::span(perm).subspan(n_train));
  return out;
}

}  // namespace fedgbdt
