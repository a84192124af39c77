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

#ifndef FEDGBDT_TREES_H_
#define FEDGBDT_TREES_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fedgbdt/candidates.h"
#include "fedgbdt/config.h"
#include "fedgbdt/federation.h"
#include "fedgbdt/gradient.h"
#include "fedgbdt/rng.h"
#include "fedgbdt/tree.h"

namespace fedgbdt {

// 1/2 [G_L^2/(H_L+ + l) + G_R^2/(H_R+ + l) - (G_L+G_R)^2/(H_L+ + H_R+ + l)] - g
// with H+ = max(H, 0). Throws when a denominator is zero.
double SplitScore(double g_left, double h_left, double g_right, double h_right,
                  double lambda, double gamma);

// Newton: -G/(H+ + l). Gradient: -G/(count+ + l). Averaging: G/(count+ + l).
// Throws when the denominator is not positive.
double LeafWeight(double g, double h_or_count, double lambda, UpdateMode mode);

// eta * sgn(w) * min(|w|, beta).
double PostprocessWeight(double w, double eta, double beta);

// Cyclical: {t k mod m, ..., (t k + k - 1) mod m}. Random: k distinct
// features from rng. Returned sorted.
std::vector<std::size_t> SelectFeatures(FeatureMode mode, std::size_t k,
                                        std::size_t t, std::size_t m, Rng& rng);

// How a finished leaf turns its (G, H) into a stored weight.
enum class LeafRule {
  kBoosted,   // PostprocessWeight(LeafWeight(...), eta, beta)
  kBatched,   // sgn(w) min(|w|, beta); eta is applied by the batch update
  kAveraged,  // LeafWeight clamped to [0, 1]
};

struct BuildContext {
  SplitMethod method = SplitMethod::kHist;
  UpdateMode mode = UpdateMode::kNewton;
  int max_depth = 4;
  const SplitCandidateSet* candidates = nullptr;
  double lambda = 1.0;
  double gamma = 0.0;
  LeafRule leaf_rule = LeafRule::kBoosted;
  double eta = 0.3;
  double beta = 2.0;
};

// Grows one tree as a sequence of query rounds, so that several trees of a
// batch can share rounds:
//
//   while (!b.done()) b.Consume(federation.Round(b.NextQueries()));
//
// Hist and PR with |F| > 1 take one round per level (one query per feature
// covering all nodes of the level; the last level's answers also give the
// leaf sums). With |F| = 1 a single root histogram answers every node. TR
// draws the whole structure up front and spends one round on leaf sums.
class TreeBuilder {
 public:
  TreeBuilder(const BuildContext& context, std::vector<std::size_t> features,
              int tree_slot, Rng rng);

  bool done() const { return done_; }
  std::vector<Query> NextQueries() const;
  void Consume(std::span<const std::vector<double>> answers);
  const Tree& tree() const { return tree_; }
  Tree TakeTree() { return std::move(tree_); }

  // Noisy root-level Hessian histogram of `feature` (Q + 1 bins), if this
  // tree released one.
  std::optional<std::vector<double>> RootHessian(std::size_t feature) const;

 private:
  struct Sums {
    double g = 0.0;
    double h = 0.0;
  };
  bool SingleHistogram() const;
  void BuildFromRootHistogram(const std::vector<double>& hist);
  void ConsumeLevel(std::span<const std::vector<double>> answers);
  void FinishLeaf(int node, Sums s);

  BuildContext ctx_;
  std::vector<std::size_t> features_;
  int slot_;
  Rng rng_;
  Tree tree_;
  int level_ = 0;
  bool done_ = false;
  // PR: per frontier node, per feature, the drawn threshold.
  std::vector<std::vector<double>> pr_thresholds_;
  std::vector<std::pair<std::size_t, std::vector<double>>> root_histograms_;
};

// Builds a single tree with its own rounds.
Tree BuildTree(const BuildContext& context, std::vector<std::size_t> features,
               Federation& federation, Rng rng, int tree_slot = 0);

}  // namespace fedgbdt

#endif  // FEDGBDT_TREES_H_
