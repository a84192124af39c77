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

#include "fedgbdt/gradient.h"

#include <cmath>

namespace fedgbdt {

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double BceLoss(int label, double raw_score) {
  // log(1 + e^r) computed without overflow.
  const double softplus = raw_score > 0
                              ? raw_score + std::log1p(std::exp(-raw_score))
                              : std::log1p(std::exp(raw_score));
  return softplus - label * raw_score;
}

GradientPair BceGradients(int label, double raw_score) {
  const double p = Sigmoid(raw_score);
  return {p - label, p * (1.0 - p)};
}

GradientPair ModeGradients(int label, double raw_score, UpdateMode mode) {
  switch (mode) {
    case UpdateMode::kAveraging:
      return {label == 1 ? 1.0 : 0.0, 1.0};
    case UpdateMode::kGradient:
      return {BceGradients(label, raw_score).g, 1.0};
    case UpdateMode::kNewton:
      return BceGradients(label, raw_score);
  }
  return {};
}

double QuerySensitivity(UpdateMode mode) {
  if (mode == UpdateMode::kNewton) return std::sqrt(17.0) / 4.0;
  return std::sqrt(2.0);
}

double HessianSensitivity(UpdateMode mode) {
  return mode == UpdateMode::kNewton ? 0.25 : 1.0;
}

GradientPair ClipGradient(GradientPair pair, double bound) {
  const double norm = std::hypot(pair.g, pair.h);
  if (norm <= bound || norm == 0.0) return pair;
  const double scale = bound / norm;
  return {pair.g * scale, pair.h * scale};
}

}  // namespace fedgbdt
