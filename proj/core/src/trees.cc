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

#include "fedgbdt/trees.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fedgbdt/error.h"

namespace fedgbdt {

namespace {

constexpr double kNoScore = -std::numeric_limits<double>::infinity();

double Pos(double h) { return std::max(h, 0.0); }

// SplitScore without the throw: unusable splits score -inf.
double ScoreOrNone(double gl, double hl, double gr, double hr, double lambda,
                   double gamma) {
  const double dl = Pos(hl) + lambda;
  const double dr = Pos(hr) + lambda;
  const double dt = Pos(hl) + Pos(hr) + lambda;
  if (!(dl > 0.0 && dr > 0.0 && dt > 0.0)) return kNoScore;
  const double g = gl + gr;
  return 0.5 * (gl * gl / dl + gr * gr / dr - g * g / dt) - gamma;
}

}  // namespace

double SplitScore(double g_left, double h_left, double g_right, double h_right,
                  double lambda, double gamma) {
  Require(lambda >= 0.0 && gamma >= 0.0, ErrorCode::kInvalidParameter,
          "lambda and gamma must be >= 0");
  const double s = ScoreOrNone(g_left, h_left, g_right, h_right, lambda, gamma);
  Require(s != kNoScore, ErrorCode::kInvalidParameter,
          "split score undefined: zero denominator (lambda = 0 and H+ = 0)");
  return s;
}

double LeafWeight(double g, double h_or_count, double lambda, UpdateMode mode) {
  const double denom = Pos(h_or_count) + lambda;
  Require(denom > 0.0, ErrorCode::kInvalidParameter,
          "leaf weight undefined: max(H, 0) + lambda must be > 0");
  return mode == UpdateMode::kAveraging ? g / denom : -g / denom;
}

double PostprocessWeight(double w, double eta, double beta) {
  Require(eta > 0.0 && beta >= 0.0, ErrorCode::kInvalidParameter,
          "need eta > 0 and beta >= 0");
  if (w == 0.0) return 0.0;
  return eta * std::copysign(std::min(std::fabs(w), beta), w);
}

std::vector<std::size_t> SelectFeatures(FeatureMode mode, std::size_t k,
                                        std::size_t t, std::size_t m, Rng& rng) {
  Require(m >= 1 && k >= 1 && k <= m, ErrorCode::kInvalidParameter,
          "feature subset size " + std::to_string(k) + " outside [1, " +
              std::to_string(m) + "]");
  std::vector<std::size_t> out;
  if (mode == FeatureMode::kCyclical) {
    for (std::size_t i = 0; i < k; ++i) out.push_back((t * k + i) % m);
  } else {
    out = SampleWithoutReplacement(m, k, rng);
  }
  std::sort(out.begin(), out.end());
  return out;
}

TreeBuilder::TreeBuilder(const BuildContext& context,
                         std::vector<std::size_t> features, int tree_slot, Rng rng)
    : ctx_(context),
      features_(std::move(features)),
      slot_(tree_slot),
      rng_(rng),
      tree_(context.max_depth, {}) {
  Require(!features_.empty(), ErrorCode::kInvalidParameter, "empty feature subset");
  Require(ctx_.candidates != nullptr, ErrorCode::kInvalidParameter,
          "tree builder needs split candidates");
  Require(ctx_.max_depth >= 1, ErrorCode::kInvalidParameter, "max_depth must be >= 1");
  std::sort(features_.begin(), features_.end());
  features_.erase(std::unique(features_.begin(), features_.end()), features_.end());
  for (std::size_t j : features_) {
    Require(j < ctx_.candidates->num_features() && !(*ctx_.candidates)[j].empty(),
            ErrorCode::kInvalidParameter,
            "no split candidates for feature " + std::to_string(j));
  }
  tree_ = Tree(ctx_.max_depth, features_);

  if (ctx_.method == SplitMethod::kTotallyRandom) {
    // Structure from randomness alone; no data is read.
    for (int depth = 0; depth < ctx_.max_depth; ++depth) {
      for (int node : tree_.LeavesAtDepth(depth)) {
        const std::size_t j = features_[rng_.UniformInt(features_.size())];
        const auto& s = (*ctx_.candidates)[j];
        tree_.Split(node, static_cast<int>(j), s[rng_.UniformInt(s.size())]);
      }
    }
  } else if (ctx_.method == SplitMethod::kPartiallyRandom && !SingleHistogram()) {
    pr_thresholds_.assign(1, {});
    for (std::size_t j : features_) {
      const auto& s = (*ctx_.candidates)[j];
      pr_thresholds_[0].push_back(s[rng_.UniformInt(s.size())]);
    }
  }
}

bool TreeBuilder::SingleHistogram() const {
  return ctx_.method != SplitMethod::kTotallyRandom && features_.size() == 1;
}

std::vector<Query> TreeBuilder::NextQueries() const {
  std::vector<Query> out;
  if (done_) return out;
  if (ctx_.method == SplitMethod::kTotallyRandom) {
    LeafQuery q;
    q.tree = &tree_;
    q.tree_slot = slot_;
    q.nodes = tree_.Leaves();
    out.emplace_back(std::move(q));
    return out;
  }
  if (SingleHistogram()) {
    HistogramQuery q;
    q.tree = &tree_;
    q.tree_slot = slot_;
    q.nodes = {0};
    q.feature = features_[0];
    q.thresholds = (*ctx_.candidates)[features_[0]];
    out.emplace_back(std::move(q));
    return out;
  }
  const std::vector<int> frontier = tree_.LeavesAtDepth(level_);
  for (std::size_t f = 0; f < features_.size(); ++f) {
    const std::size_t j = features_[f];
    if (ctx_.method == SplitMethod::kHist) {
      HistogramQuery q;
      q.tree = &tree_;
      q.tree_slot = slot_;
      q.nodes = frontier;
      q.feature = j;
      q.thresholds = (*ctx_.candidates)[j];
      out.emplace_back(std::move(q));
    } else {
      SplitQuery q;
      q.tree = &tree_;
      q.tree_slot = slot_;
      q.nodes = frontier;
      q.feature = j;
      for (std::size_t p = 0; p < frontier.size(); ++p) {
        q.thresholds.push_back(pr_thresholds_[p][f]);
      }
      out.emplace_back(std::move(q));
    }
  }
  return out;
}

void TreeBuilder::Consume(std::span<const std::vector<double>> answers) {
  Require(!done_, ErrorCode::kInvalidParameter, "tree already finished");
  if (ctx_.method == SplitMethod::kTotallyRandom) {
    Require(answers.size() == 1, ErrorCode::kShapeMismatch, "expected one leaf answer");
    const auto leaves = tree_.Leaves();
    Require(answers[0].size() == 2 * leaves.size(), ErrorCode::kShapeMismatch,
            "leaf answer has wrong length");
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      FinishLeaf(leaves[i], {answers[0][2 * i], answers[0][2 * i + 1]});
    }
    done_ = true;
    return;
  }
  if (SingleHistogram()) {
    Require(answers.size() == 1, ErrorCode::kShapeMismatch,
            "expected one histogram answer");
    BuildFromRootHistogram(answers[0]);
    done_ = true;
    return;
  }
  ConsumeLevel(answers);
}

void TreeBuilder::ConsumeLevel(std::span<const std::vector<double>> answers) {
  Require(answers.size() == features_.size(), ErrorCode::kShapeMismatch,
          "expected one answer per feature");
  const std::vector<int> frontier = tree_.LeavesAtDepth(level_);
  const bool last = level_ + 1 == ctx_.max_depth;
  const bool hist = ctx_.method == SplitMethod::kHist;

  if (hist && level_ == 0) {
    for (std::size_t f = 0; f < features_.size(); ++f) {
      const auto& a = answers[f];
      std::vector<double> h(a.size() / 2);
      for (std::size_t b = 0; b < h.size(); ++b) h[b] = a[2 * b + 1];
      root_histograms_.emplace_back(features_[f], std::move(h));
    }
  }

  for (std::size_t p = 0; p < frontier.size(); ++p) {
    double best = kNoScore;
    std::size_t best_f = 0;
    double best_threshold = 0.0;
    Sums best_left;
    Sums best_right;
    bool found = false;
    for (std::size_t f = 0; f < features_.size(); ++f) {
      const auto& a = answers[f];
      if (hist) {
        const auto& s = (*ctx_.candidates)[features_[f]];
        const std::size_t bins = s.size() + 1;
        Require(a.size() == 2 * bins * frontier.size(), ErrorCode::kShapeMismatch,
                "histogram answer has wrong length");
        const double* base = a.data() + 2 * bins * p;
        Sums total;
        for (std::size_t b = 0; b < bins; ++b) {
          total.g += base[2 * b];
          total.h += base[2 * b + 1];
        }
        Sums left;
        for (std::size_t c = 1; c <= s.size(); ++c) {
          left.g += base[2 * (c - 1)];
          left.h += base[2 * (c - 1) + 1];
          const Sums right{total.g - left.g, total.h - left.h};
          const double score =
              ScoreOrNone(left.g, left.h, right.g, right.h, ctx_.lambda, ctx_.gamma);
          if (!found || score > best) {
            found = true;
            best = score;
            best_f = f;
            best_threshold = s[c - 1];
            best_left = left;
            best_right = right;
          }
        }
      } else {
        Require(a.size() == 4 * frontier.size(), ErrorCode::kShapeMismatch,
                "split answer has wrong length");
        const Sums left{a[4 * p], a[4 * p + 1]};
        const Sums right{a[4 * p + 2], a[4 * p + 3]};
        const double score =
            ScoreOrNone(left.g, left.h, right.g, right.h, ctx_.lambda, ctx_.gamma);
        if (!found || score > best) {
          found = true;
          best = score;
          best_f = f;
          best_threshold = pr_thresholds_[p][f];
          best_left = left;
          best_right = right;
        }
      }
    }
    const int left_id =
        tree_.Split(frontier[p], static_cast<int>(features_[best_f]), best_threshold);
    if (last) {
      FinishLeaf(left_id, best_left);
      FinishLeaf(left_id + 1, best_right);
    }
  }

  ++level_;
  if (level_ == ctx_.max_depth) {
    done_ = true;
    return;
  }
  if (!hist) {
    const std::size_t width = tree_.LeavesAtDepth(level_).size();
    pr_thresholds_.assign(width, {});
    for (std::size_t p = 0; p < width; ++p) {
      for (std::size_t j : features_) {
        const auto& s = (*ctx_.candidates)[j];
        pr_thresholds_[p].push_back(s[rng_.UniformInt(s.size())]);
      }
    }
  }
}

void TreeBuilder::BuildFromRootHistogram(const std::vector<double>& hist) {
  const std::size_t j = features_[0];
  const auto& s = (*ctx_.candidates)[j];
  const std::size_t bins = s.size() + 1;
  Require(hist.size() == 2 * bins, ErrorCode::kShapeMismatch,
          "root histogram has wrong length");
  std::vector<double> pg(bins + 1, 0.0);
  std::vector<double> ph(bins + 1, 0.0);
  std::vector<double> h(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    pg[b + 1] = pg[b] + hist[2 * b];
    ph[b + 1] = ph[b] + hist[2 * b + 1];
    h[b] = hist[2 * b + 1];
  }
  root_histograms_.emplace_back(j, std::move(h));
  // Sum over bins lo..hi inclusive; empty when lo > hi.
  auto range = [&](long lo, long hi) -> Sums {
    if (lo > hi) return {};
    return {pg[hi + 1] - pg[lo], ph[hi + 1] - ph[lo]};
  };

  struct Item {
    int node;
    long lo;
    long hi;
  };
  std::vector<Item> queue{{0, 0, static_cast<long>(bins) - 1}};
  for (std::size_t i = 0; i < queue.size(); ++i) {
    const Item it = queue[i];
    if (tree_.node(it.node).depth == ctx_.max_depth) {
      FinishLeaf(it.node, range(it.lo, it.hi));
      continue;
    }
    // Candidate c (1-based) sends bins < c left.
    long cut;
    if (ctx_.method == SplitMethod::kHist) {
      cut = 1;
      double best = kNoScore;
      bool found = false;
      for (long c = 1; c <= static_cast<long>(s.size()); ++c) {
        const Sums l = range(it.lo, std::min(it.hi, c - 1));
        const Sums r = range(std::max(it.lo, c), it.hi);
        const double score = ScoreOrNone(l.g, l.h, r.g, r.h, ctx_.lambda, ctx_.gamma);
        if (!found || score > best) {
          found = true;
          best = score;
          cut = c;
        }
      }
    } else {
      cut = 1 + static_cast<long>(rng_.UniformInt(s.size()));
    }
    const int left = tree_.Split(it.node, static_cast<int>(j), s[cut - 1]);
    queue.push_back({left, it.lo, std::min(it.hi, cut - 1)});
    queue.push_back({left + 1, std::max(it.lo, cut), it.hi});
  }
}

void TreeBuilder::FinishLeaf(int node, Sums s) {
  const double denom = Pos(s.h) + ctx_.lambda;
  double w = 0.0;
  if (denom > 0.0) w = ctx_.mode == UpdateMode::kAveraging ? s.g / denom : -s.g / denom;
  switch (ctx_.leaf_rule) {
    case LeafRule::kBoosted:
      w = PostprocessWeight(w, ctx_.eta, ctx_.beta);
      break;
    case LeafRule::kBatched:
      w = w == 0.0 ? 0.0 : std::copysign(std::min(std::fabs(w), ctx_.beta), w);
      break;
    case LeafRule::kAveraged:
      w = std::clamp(w, 0.0, 1.0);
      break;
  }
  tree_.SetWeight(node, w);
}

std::optional<std::vector<double>> TreeBuilder::RootHessian(std::size_t feature) const {
  for (const auto& [j, h] : root_histograms_) {
    if (j == feature) return h;
  }
  return std::nullopt;
}

Tree BuildTree(const BuildContext& context, std::vector<std::size_t> features,
               Federation& federation, Rng rng, int tree_slot) {
  TreeBuilder builder(context, std::move(features), tree_slot, rng);
  while (!builder.done()) {
    const auto queries = builder.NextQueries();
    builder.Consume(federation.Round(queries));
  }
  return builder.TakeTree();
}

}  // namespace fedgbdt
