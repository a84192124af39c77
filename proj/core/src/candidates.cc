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

#include "fedgbdt/candidates.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "fedgbdt/error.h"

namespace fedgbdt {

namespace {

void CheckArgs(FeatureBounds bounds, int q) {
  Require(q >= 2, ErrorCode::kInvalidParameter,
          "need at least 2 split candidates, got " + std::to_string(q));
  Require(std::isfinite(bounds.lo) && std::isfinite(bounds.hi) &&
              bounds.lo < bounds.hi,
          ErrorCode::kInvalidParameter, "feature bounds need a < b");
}

struct Interval {
  double lo;
  double hi;
  double width() const { return hi - lo; }
};

// Spreads `need` points over the intervals: floor(need / I) each, one more
// for the widest (ties: lower interval first). Points sit evenly inside.
std::vector<double> FillIntervals(std::vector<Interval> intervals, int need) {
  std::erase_if(intervals, [](const Interval& iv) { return !(iv.width() > 0.0); });
  std::vector<double> out;
  if (intervals.empty() || need <= 0) return out;
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  const int count = static_cast<int>(intervals.size());
  std::vector<int> per(count, need / count);
  std::vector<int> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return intervals[x].width() > intervals[y].width();
  });
  for (int r = 0; r < need % count; ++r) ++per[order[r]];
  for (int i = 0; i < count; ++i) {
    for (int c = 1; c <= per[i]; ++c) {
      out.push_back(intervals[i].lo +
                    intervals[i].width() * c / static_cast<double>(per[i] + 1));
    }
  }
  return out;
}

void SortUnique(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::vector<double> SubsampleByRank(const std::vector<double>& sorted, int q) {
  std::vector<double> out;
  const std::size_t n = sorted.size();
  for (int i = 0; i < q; ++i) {
    const auto idx = static_cast<std::size_t>(
        std::llround(static_cast<double>(i) * (n - 1) / (q - 1)));
    out.push_back(sorted[idx]);
  }
  SortUnique(out);
  return out;
}

}  // namespace

void SplitCandidateSet::Validate(std::span<const FeatureBounds> bounds, int q) const {
  Require(per_feature.size() == bounds.size(), ErrorCode::kShapeMismatch,
          "candidate set covers " + std::to_string(per_feature.size()) +
              " features, bounds " + std::to_string(bounds.size()));
  for (std::size_t j = 0; j < per_feature.size(); ++j) {
    const auto& s = per_feature[j];
    Require(static_cast<int>(s.size()) == q, ErrorCode::kShapeMismatch,
            "feature " + std::to_string(j) + " has " + std::to_string(s.size()) +
                " candidates, expected " + std::to_string(q));
    for (std::size_t i = 0; i < s.size(); ++i) {
      Require(s[i] >= bounds[j].lo && s[i] <= bounds[j].hi,
              ErrorCode::kOutOfBounds, "candidate outside feature bounds");
      Require(i == 0 || s[i] > s[i - 1], ErrorCode::kInvalidParameter,
              "candidates must be strictly increasing");
    }
  }
}

std::size_t BinIndex(std::span<const double> thresholds, double x) {
  return std::lower_bound(thresholds.begin(), thresholds.end(), x) -
         thresholds.begin();
}

std::vector<double> UniformThresholds(FeatureBounds bounds, int q) {
  CheckArgs(bounds, q);
  std::vector<double> s(q);
  const double step = (bounds.hi - bounds.lo) / (q - 1);
  for (int i = 0; i < q; ++i) s[i] = bounds.lo + i * step;
  s.back() = bounds.hi;
  return s;
}

SplitCandidateSet UniformCandidates(std::span<const FeatureBounds> bounds, int q) {
  SplitCandidateSet out;
  for (const auto& b : bounds) out.per_feature.push_back(UniformThresholds(b, q));
  return out;
}

std::vector<double> LogThresholds(FeatureBounds bounds, int q) {
  CheckArgs(bounds, q);
  const double top = std::log1p(bounds.hi - bounds.lo);
  std::vector<double> s(q);
  for (int i = 0; i < q; ++i) {
    s[i] = bounds.lo + std::expm1(top * i / (q - 1));
  }
  s.front() = bounds.lo;
  s.back() = bounds.hi;
  return s;
}

SplitCandidateSet LogCandidates(std::span<const FeatureBounds> bounds, int q) {
  SplitCandidateSet out;
  for (const auto& b : bounds) out.per_feature.push_back(LogThresholds(b, q));
  return out;
}

std::vector<double> QuantileThresholds(std::span<const double> values,
                                       FeatureBounds bounds, int q) {
  CheckArgs(bounds, q);
  Require(!values.empty(), ErrorCode::kInvalidParameter,
          "quantiles of an empty column");
  std::vector<double> x(values.begin(), values.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  std::vector<double> s;
  for (int i = 1; i <= q; ++i) {
    const double h = (n + 1.0) * i / (q + 1.0);
    double v;
    if (h <= 1.0) {
      v = x.front();
    } else if (h >= n) {
      v = x.back();
    } else {
      const auto lo = static_cast<std::size_t>(std::floor(h));
      v = x[lo - 1] + (h - std::floor(h)) * (x[lo] - x[lo - 1]);
    }
    s.push_back(v);
  }
  return PadOrTrim(std::move(s), bounds, q);
}

SplitCandidateSet QuantileCandidates(const Dataset& data, int q) {
  SplitCandidateSet out;
  std::vector<double> column(data.num_rows());
  for (std::size_t j = 0; j < data.num_features(); ++j) {
    for (std::size_t i = 0; i < data.num_rows(); ++i) column[i] = data.at(i, j);
    out.per_feature.push_back(QuantileThresholds(column, data.bounds[j], q));
  }
  return out;
}

std::vector<double> PadOrTrim(std::vector<double> points, FeatureBounds bounds,
                              int q) {
  CheckArgs(bounds, q);
  for (double& p : points) p = std::clamp(p, bounds.lo, bounds.hi);
  SortUnique(points);
  if (static_cast<int>(points.size()) > q) return SubsampleByRank(points, q);
  if (static_cast<int>(points.size()) < q) {
    std::vector<Interval> gaps;
    double prev = bounds.lo;
    for (double p : points) {
      gaps.push_back({prev, p});
      prev = p;
    }
    gaps.push_back({prev, bounds.hi});
    auto extra = FillIntervals(gaps, q - static_cast<int>(points.size()));
    points.insert(points.end(), extra.begin(), extra.end());
    SortUnique(points);
  }
  // Rounding can collapse fill points; bisect the widest gap until full.
  while (static_cast<int>(points.size()) < q) {
    double best_lo = bounds.lo;
    double best_hi = points.empty() ? bounds.hi : points.front();
    double prev = bounds.lo;
    for (std::size_t i = 0; i <= points.size(); ++i) {
      const double next = i < points.size() ? points[i] : bounds.hi;
      if (next - prev > best_hi - best_lo) {
        best_lo = prev;
        best_hi = next;
      }
      prev = next;
    }
    const double mid = 0.5 * (best_lo + best_hi);
    if (!(mid > best_lo && mid < best_hi)) {
      // Gaps exhausted: only the endpoints themselves remain.
      if (points.empty() || points.front() != bounds.lo) {
        points.push_back(bounds.lo);
      } else if (points.back() != bounds.hi) {
        points.push_back(bounds.hi);
      } else {
        Fail(ErrorCode::kInvalidParameter,
             "feature range too narrow for " + std::to_string(q) + " candidates");
      }
    } else {
      points.push_back(mid);
    }
    SortUnique(points);
  }
  return points;
}

std::vector<double> RefineThresholds(std::span<const double> hessian,
                                     std::span<const double> current,
                                     FeatureBounds bounds, int q) {
  CheckArgs(bounds, q);
  Require(hessian.size() == current.size() + 1, ErrorCode::kShapeMismatch,
          "Hessian histogram has " + std::to_string(hessian.size()) +
              " bins for " + std::to_string(current.size()) + " candidates");
  const std::size_t bins = hessian.size();
  std::vector<double> edges;
  edges.reserve(bins + 1);
  edges.push_back(bounds.lo);
  edges.insert(edges.end(), current.begin(), current.end());
  edges.push_back(bounds.hi);

  double total = 0.0;
  for (double h : hessian) total += std::max(h, 0.0);
  if (!(total > 0.0)) {
    return PadOrTrim(std::vector<double>(current.begin(), current.end()), bounds, q);
  }
  const double theta = total / static_cast<double>(bins);
  // Exact-equality fixpoints should not flip on the last ulp of the mean.
  const double cut = theta * (1.0 - 1e-12);

  struct Mid {
    double value;
    double mass;
  };
  std::vector<double> points;
  std::vector<Mid> mids;
  std::vector<Interval> halves;
  double acc = 0.0;
  for (std::size_t i = 0; i < bins; ++i) {
    acc += std::max(hessian[i], 0.0);
    if (acc < cut) continue;  // merge into the right neighbour
    const double lo = edges[i];
    const double hi = edges[i + 1];
    points.push_back(lo);
    points.push_back(hi);
    const double mid = 0.5 * (lo + hi);
    if (mid > lo && mid < hi) {
      mids.push_back({mid, acc});
      halves.push_back({lo, mid});
      halves.push_back({mid, hi});
    } else {
      halves.push_back({lo, hi});
    }
    acc = 0.0;
  }
  SortUnique(points);
  std::erase_if(mids, [&](const Mid& m) {
    return std::binary_search(points.begin(), points.end(), m.value);
  });
  std::sort(mids.begin(), mids.end(), [](const Mid& x, const Mid& y) {
    return x.mass != y.mass ? x.mass < y.mass : x.value < y.value;
  });
  mids.erase(std::unique(mids.begin(), mids.end(),
                         [](const Mid& x, const Mid& y) { return x.value == y.value; }),
             mids.end());

  const int have = static_cast<int>(points.size() + mids.size());
  if (have > q) {
    // Lightest bins give up their midpoints first.
    const int drop = std::min<int>(have - q, static_cast<int>(mids.size()));
    for (std::size_t i = drop; i < mids.size(); ++i) points.push_back(mids[i].value);
    SortUnique(points);
    return PadOrTrim(std::move(points), bounds, q);
  }
  for (const auto& m : mids) points.push_back(m.value);
  auto extra = FillIntervals(std::move(halves), q - have);
  points.insert(points.end(), extra.begin(), extra.end());
  return PadOrTrim(std::move(points), bounds, q);
}

SplitCandidateSet IterativeHessianRefine(const HessianHistogram& hist,
                                         const SplitCandidateSet& current,
                                         std::span<const FeatureBounds> bounds,
                                         int q) {
  Require(hist.per_feature.size() == current.num_features() &&
              bounds.size() == current.num_features(),
          ErrorCode::kShapeMismatch,
          "histogram, candidates and bounds disagree on feature count");
  SplitCandidateSet out;
  for (std::size_t j = 0; j < current.num_features(); ++j) {
    out.per_feature.push_back(
        RefineThresholds(hist.per_feature[j], current[j], bounds[j], q));
  }
  return out;
}

}  // namespace fedgbdt
