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

#ifndef FEDGBDT_GRADIENT_H_
#define FEDGBDT_GRADIENT_H_

#include <cstdint>

namespace fedgbdt {

enum class UpdateMode { kAveraging, kGradient, kNewton };

struct GradientPair {
  double g = 0.0;
  double h = 0.0;
};

double Sigmoid(double x);

// Binary cross-entropy in logit space: loss(y, r) = log(1 + e^r) - y * r.
double BceLoss(int label, double raw_score);

// g = p - y, h = p (1 - p) with p = sigmoid(raw_score).
GradientPair BceGradients(int label, double raw_score);

// Averaging: (1{y=1}, 1). Gradient: (bce g, 1). Newton: BceGradients.
GradientPair ModeGradients(int label, double raw_score, UpdateMode mode);

// L2 sensitivity of one record's (g, h) contribution.
// Newton: sqrt(17)/4. Averaging and Gradient: sqrt(2).
double QuerySensitivity(UpdateMode mode);

// Sensitivity of a Hessian-only release: 1/4 for Newton, 1 otherwise.
double HessianSensitivity(UpdateMode mode);

// Scales (g, h) so its L2 norm is at most `bound`. Bounded classification
// losses never need this; it exists for losses without analytic bounds.
GradientPair ClipGradient(GradientPair pair, double bound);

}  // namespace fedgbdt

#endif  // FEDGBDT_GRADIENT_H_
