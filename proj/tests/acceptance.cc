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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fedgbdt/accountant.h"
#include "fedgbdt/boosting.h"
#include "fedgbdt/candidates.h"
#include "fedgbdt/config.h"
#include "fedgbdt/data.h"
#include "fedgbdt/federation.h"
#include "fedgbdt/gradient.h"
#include "fedgbdt/harness.h"
#include "fedgbdt/rng.h"
#include "oracles.h"

namespace fedgbdt {
namespace {

// Pinned tolerances and protocol.
constexpr double kAccountingTol = 1e-6;
constexpr double kSigmaRatioLo = 1.30;
constexpr double kSigmaRatioHi = 1.45;
constexpr double kLeafTol = 1e-9;
constexpr double kFdTol = 1e-5;
constexpr double kNoiseStdTol = 0.02;
constexpr double kAucTol = 1e-12;
constexpr int kSeeds = 5;
constexpr std::uint64_t kDataSeed = 7;
constexpr double kTrainFraction = 0.7;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

// Median test AUC over seeds 0..kSeeds-1; each seed picks the split and the
// training randomness.
double MedianAuc(const Dataset& data, TrainConfig config,
                 std::vector<ExperimentResult>* runs = nullptr) {
  std::vector<std::future<ExperimentResult>> jobs;
  for (int s = 0; s < kSeeds; ++s) {
    jobs.push_back(std::async(std::launch::async, [&data, config, s]() mutable {
      const SplitPair split = TrainTestSplit(data, kTrainFraction, s);
      config.seed = static_cast<std::uint64_t>(s);
      return RunExperiment(config, split);
    }));
  }
  std::vector<double> auc;
  for (auto& j : jobs) {
    ExperimentResult r = j.get();
    auc.push_back(r.test_auc);
    if (runs) runs->push_back(r);
  }
  return Median(auc);
}

const Dataset& Benchmark() {
  static const Dataset d = Synthesize({20000, 10, 0.3, 0.5, kDataSeed});
  return d;
}

const Dataset& LogNormalBenchmark() {
  static const Dataset d = Synthesize({20000, 10, 1.0, 0.5, kDataSeed});
  return d;
}

TrainConfig Method(SplitMethod split, UpdateMode mode, int trees, double eps) {
  TrainConfig c;
  c.split_method = split;
  c.update_mode = mode;
  c.num_trees = trees;
  c.max_depth = 4;
  c.epsilon = eps;
  return c;
}

std::vector<double> DenseGrid() {
  std::vector<double> g;
  for (int i = 0; 1.01 + 0.01 * i <= 256.0 + 1e-12; ++i) g.push_back(1.01 + 0.01 * i);
  return g;
}

Outcome Accounting() {
  const auto grid = DenseGrid();
  Rng rng(1001);
  double worst = 0;
  for (int i = 0; i < 200; ++i) {
    const double sigma = std::exp(std::log(0.5) + rng.Uniform() * std::log(400.0));
    const double k = static_cast<double>(1 + rng.UniformInt(2000));
    const double delta = std::pow(10.0, -2.0 - 6.0 * rng.Uniform());
    const RdpCurve one = GaussianRdp(sigma, grid);
    const std::vector<RdpCurve> curves{one};
    const std::vector<double> counts{k};
    const RdpCurve total = ComposeSequential(curves, counts);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < grid.size(); ++a) {
      const double tau = k * grid[a] / (2 * sigma * sigma);
      worst = std::max(worst, std::fabs(one.taus[a] - grid[a] / (2 * sigma * sigma)));
      worst = std::max(worst, std::fabs(total.taus[a] - tau) / std::max(1.0, tau));
      best = std::min(best, tau + std::log(1 / delta) / (grid[a] - 1));
    }
    best = std::max(best, 0.0);
    worst = std::max(worst, std::fabs(RdpToDp(total, delta) - best));
  }
  return {worst <= kAccountingTol, Fmt("max abs error %.3g over 200 cases", worst)};
}

Outcome CalibrationScaling() {
  const auto grid = DefaultAlphaGrid();
  const double s100 = CalibrateSigma({1.0, 1e-5}, {0, 0, 100}, grid);
  const double s200 = CalibrateSigma({1.0, 1e-5}, {0, 0, 200}, grid);
  const double ratio = s200 / s100;
  return {ratio >= kSigmaRatioLo && ratio <= kSigmaRatioHi,
          Fmt("sigma(200)/sigma(100) = %.4f", ratio)};
}

Outcome LedgerConservation() {
  std::map<std::size_t, std::shared_ptr<const Dataset>> data;
  for (std::size_t m = 1; m <= 8; ++m) {
    data[m] = std::make_shared<const Dataset>(Synthesize({200, m, 0.5, 0.5, 30 + m}));
  }
  Rng rng(3003);
  int runs = 0, mismatches = 0;
  std::string first;
  for (const auto& name : PresetNames()) {
    for (int i = 0; i < 50; ++i) {
      TrainConfig c = BaselinePreset(name);
      const std::size_t m = 1 + rng.UniformInt(8);
      c.num_trees = 1 + static_cast<int>(rng.UniformInt(20));
      c.max_depth = 1 + static_cast<int>(rng.UniformInt(4));
      c.num_candidates = 2 + static_cast<int>(rng.UniformInt(7));
      c.ih_rounds = 1 + static_cast<int>(rng.UniformInt(3));
      c.batch_fraction = 0.0;
      c.batch_size = 1 + static_cast<int>(rng.UniformInt(c.num_trees));
      if (c.feature_subset != 1) c.feature_subset = static_cast<int>(rng.UniformInt(m + 1));
      if (rng.Uniform() < 0.5) c.feature_mode = FeatureMode::kRandom;
      c.seed = rng.NextU64();
      Federation fed(Partition(data[m], 0, PartitionPolicy::kOneRecordPerClient, c.seed),
                     {c.fixed_point_bits, c.privacy_model, c.seed});
      const TrainResult r = Train(c, fed);
      const QueryCounter want = CountQueries(c, m);
      ++runs;
      if (!(fed.stats().ledger == want) || !(r.planned == want)) {
        if (mismatches++ == 0) first = name;
      }
    }
  }
  std::string detail = std::to_string(runs) + " runs, " + std::to_string(mismatches) +
                       " mismatches";
  if (mismatches) detail += " (first: " + first + ")";
  return {mismatches == 0, detail};
}

// Walks the trained trees against an exhaustive reference. At every internal
// node the library's split must attain the brute-force maximum of the split
// score over all candidate (feature, threshold) pairs; the walk then follows
// the library's partition.
struct OracleWalk {
  const Dataset* data;
  const SplitCandidateSet* cand;
  std::vector<double> g, h;
  double lambda, gamma, eta, beta;
  int nodes = 0, exact = 0, failures = 0;
  double worst_leaf = 0;

  void Visit(const Tree& t, int id, const std::vector<std::size_t>& rows) {
    const TreeNode& n = t.node(id);
    double gs = 0, hs = 0;
    for (auto r : rows) {
      gs += g[r];
      hs += h[r];
    }
    if (n.is_leaf) {
      const double w = -gs / (std::max(hs, 0.0) + lambda);
      const double want = w == 0 ? 0 : eta * std::copysign(std::min(std::fabs(w), beta), w);
      worst_leaf = std::max(worst_leaf, std::fabs(n.weight - want));
      return;
    }
    ++nodes;
    auto score = [&](std::size_t j, double thr) {
      double gl = 0, hl = 0, gr = 0, hr = 0;
      for (auto r : rows) {
        if (data->at(r, j) <= thr) {
          gl += g[r];
          hl += h[r];
        } else {
          gr += g[r];
          hr += h[r];
        }
      }
      return oracle::RefScore(gl, hl, gr, hr, lambda, gamma);
    };
    double best = -std::numeric_limits<double>::infinity();
    std::size_t bj = 0;
    double bt = 0;
    for (std::size_t j = 0; j < data->num_features(); ++j) {
      for (double thr : (*cand)[j]) {
        const double s = score(j, thr);
        if (s > best) {
          best = s;
          bj = j;
          bt = thr;
        }
      }
    }
    const auto& cj = (*cand)[n.feature];
    const bool is_candidate = std::find(cj.begin(), cj.end(), n.threshold) != cj.end();
    const double mine = score(n.feature, n.threshold);
    if (!is_candidate || mine < best - 1e-9 * (1 + std::fabs(best))) ++failures;
    if (static_cast<std::size_t>(n.feature) == bj && n.threshold == bt) ++exact;
    std::vector<std::size_t> left, right;
    for (auto r : rows) (data->at(r, n.feature) <= n.threshold ? left : right).push_back(r);
    Visit(t, n.left, left);
    Visit(t, n.right, right);
  }
};

Dataset RandomSmall(Rng& rng) {
  Dataset d;
  const std::size_t m = 1 + rng.UniformInt(4);
  const std::size_t n = 8 + rng.UniformInt(57);
  const bool coarse = rng.Uniform() < 0.5;
  for (std::size_t j = 0; j < m; ++j) {
    const double lo = -5 + 10 * rng.Uniform();
    d.bounds.push_back({lo, lo + 0.5 + 5 * rng.Uniform()});
    d.feature_names.push_back("f" + std::to_string(j));
    d.feature_kinds.push_back(FeatureKind::kContinuous);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double u = rng.Uniform();
      if (coarse) u = std::floor(u * 6) / 5;
      u = std::min(u, 1.0);
      d.features.push_back(d.bounds[j].lo + u * (d.bounds[j].hi - d.bounds[j].lo));
    }
    d.labels.push_back(i < 2 ? static_cast<int>(i) : (rng.Uniform() < 0.5 ? 0 : 1));
  }
  return d;
}

Outcome NoiseOffOracle() {
  Rng rng(4004);
  int nodes = 0, exact = 0, failures = 0;
  double worst_leaf = 0;
  for (int trial = 0; trial < 50; ++trial) {
    auto data = std::make_shared<const Dataset>(RandomSmall(rng));
    TrainConfig c;
    c.split_method = SplitMethod::kHist;
    c.update_mode = UpdateMode::kNewton;
    c.candidate_method = CandidateMethod::kQuantile;
    c.num_candidates = 2 + static_cast<int>(rng.UniformInt(4));
    c.num_trees = 3;
    c.max_depth = 1 + static_cast<int>(rng.UniformInt(3));
    c.private_training = false;
    c.fixed_point_bits = 40;
    Federation fed(Partition(data, 0, PartitionPolicy::kOneRecordPerClient, trial),
                   {c.fixed_point_bits, PrivacyModel::kCentral, 0});
    const TrainResult r = Train(c, fed);
    OracleWalk walk{data.get(), &r.final_candidates, {}, {}, c.lambda, c.gamma, c.eta, c.beta};
    std::vector<double> raw(data->num_rows(), 0.0);
    std::vector<std::size_t> all(data->num_rows());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    for (const Tree& t : r.ensemble.trees) {
      walk.g.clear();
      walk.h.clear();
      for (std::size_t i = 0; i < raw.size(); ++i) {
        const double p = 1 / (1 + std::exp(-raw[i]));
        walk.g.push_back(p - data->labels[i]);
        walk.h.push_back(p * (1 - p));
      }
      walk.Visit(t, 0, all);
      for (std::size_t i = 0; i < raw.size(); ++i) raw[i] += t.Predict(data->row(i));
    }
    nodes += walk.nodes;
    exact += walk.exact;
    failures += walk.failures;
    worst_leaf = std::max(worst_leaf, walk.worst_leaf);
  }
  const bool pass = failures == 0 && worst_leaf <= kLeafTol;
  return {pass, std::to_string(nodes) + " split nodes, " + std::to_string(failures) +
                    " non-argmax, " + std::to_string(exact) +
                    " identical to first-best; " + Fmt("max leaf error %.3g", worst_leaf)};
}

Outcome GradientCorrectness() {
  Rng rng(5005);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const double x = -10 + 20 * rng.Uniform();
    const int y = rng.Uniform() < 0.5 ? 0 : 1;
    const double e = 1e-4;
    const double fd_g = (BceLoss(y, x + e) - BceLoss(y, x - e)) / (2 * e);
    const double fd_h = (BceGradients(y, x + e).g - BceGradients(y, x - e).g) / (2 * e);
    const GradientPair gh = BceGradients(y, x);
    worst = std::max({worst, std::fabs(fd_g - gh.g), std::fabs(fd_h - gh.h)});
  }
  double max_norm = 0;
  for (int i = 0; i < 1000000; ++i) {
    const double x = rng.Normal(0, 4);
    const GradientPair gh = BceGradients(rng.Uniform() < 0.5 ? 0 : 1, x);
    max_norm = std::max(max_norm, std::hypot(gh.g, gh.h));
  }
  const double bound = std::sqrt(17.0) / 4;
  return {worst <= kFdTol && max_norm <= bound,
          Fmt("max finite-difference error %.3g", worst) +
              Fmt(", max Newton norm %.6f", max_norm) + Fmt(" (bound %.6f)", bound)};
}

Outcome SecureSumFidelity() {
  Rng rng(6006);
  const FixedPointCodec codec(16);
  bool exact_ok = true;
  double worst_ratio = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n = 1 + rng.UniformInt(300);
    const std::size_t len = 1 + rng.UniformInt(16);
    std::vector<std::vector<double>> v(n, std::vector<double>(len));
    std::vector<double> plain(len, 0.0);
    for (auto& c : v) {
      for (std::size_t k = 0; k < len; ++k) {
        c[k] = rng.Normal(0, 2);
        plain[k] += c[k];
      }
    }
    const auto got = SecureSum(v, len, codec, {}, rng);
    const double limit = static_cast<double>(n) / 131072.0;
    for (std::size_t k = 0; k < len; ++k) {
      const double err = std::fabs(got[k] - plain[k]);
      worst_ratio = std::max(worst_ratio, err / limit);
      if (err > limit) exact_ok = false;
    }
  }
  const NoiseScale noise{1.7, std::sqrt(17.0) / 4};
  const std::vector<std::vector<double>> zero{{0.0}};
  std::vector<double> draws(100000);
  double ss = 0;
  for (double& x : draws) {
    x = SecureSum(zero, 1, codec, noise, rng)[0];
    ss += x * x;
  }
  const double sd = std::sqrt(ss / draws.size());
  const double rel = std::fabs(sd / noise.stddev() - 1);
  const double ks = oracle::KsStatistic(draws, noise.stddev());
  const double crit = oracle::KsCritical01(draws.size());
  return {exact_ok && rel <= kNoiseStdTol && ks < crit,
          Fmt("worst codec error %.3g of bound", worst_ratio) +
              Fmt(", noise std off by %.4f", rel) + Fmt(", KS D = %.5f", ks) +
              Fmt(" (critical %.5f)", crit)};
}

Outcome RandomVsHistogram() {
  const Dataset& d = Benchmark();
  const double tr = MedianAuc(d, Method(SplitMethod::kTotallyRandom, UpdateMode::kNewton, 300, 1.0));
  const double hist = MedianAuc(d, Method(SplitMethod::kHist, UpdateMode::kNewton, 25, 1.0));
  return {tr - hist >= 0.02,
          Fmt("TR+Newton %.4f", tr) + Fmt(" vs Hist+Newton %.4f", hist) +
              Fmt(" (gap %.4f, need >= 0.02)", tr - hist)};
}

Outcome UpdateModes() {
  const Dataset& d = Benchmark();
  const double trn = MedianAuc(d, Method(SplitMethod::kTotallyRandom, UpdateMode::kNewton, 300, 0.5));
  const double tra = MedianAuc(d, Method(SplitMethod::kTotallyRandom, UpdateMode::kAveraging, 300, 0.5));
  const double prn = MedianAuc(d, Method(SplitMethod::kPartiallyRandom, UpdateMode::kNewton, 25, 0.5));
  const double prg = MedianAuc(d, Method(SplitMethod::kPartiallyRandom, UpdateMode::kGradient, 25, 0.5));
  const bool a = trn >= tra - 0.01;
  const bool b = prn > prg;
  return {a && b, std::string(a ? "" : "[TR part fails] ") + Fmt("TR Newton %.4f", trn) +
                      Fmt(" vs Averaging %.4f", tra) + Fmt("; PR Newton %.4f", prn) +
                      Fmt(" vs Gradient %.4f", prg) + (b ? "" : " [PR part fails]")};
}

Outcome IterativeHessian() {
  const Dataset& d = LogNormalBenchmark();
  TrainConfig ih = BaselinePreset("DP-TR-Newton-IH");
  TrainConfig uni = BaselinePreset("DP-TR-Newton");
  ih.num_trees = uni.num_trees = 100;
  ih.ih_rounds = 5;
  ih.epsilon = uni.epsilon = 1.0;
  const double a = MedianAuc(d, ih);
  const double b = MedianAuc(d, uni);

  // Noiseless refinement on the training split: every round must lower the
  // heaviest bin of every feature.
  const SplitPair split = TrainTestSplit(d, kTrainFraction, 0);
  auto shared = std::make_shared<const Dataset>(split.train);
  Federation fed(Partition(shared, 0, PartitionPolicy::kOneRecordPerClient, 0));
  fed.BeginBatch(UpdateMode::kNewton, 1);
  const int q = ih.num_candidates;
  int violations = 0;
  double first = 0, last = 0;
  for (std::size_t j = 0; j < d.num_features(); ++j) {
    std::vector<double> s = UniformThresholds(d.bounds[j], q);
    double prev = std::numeric_limits<double>::infinity();
    for (int round = 0; round <= 5; ++round) {
      HistogramQuery hq;
      hq.feature = j;
      hq.thresholds = s;
      hq.hessian_only = true;
      const auto h = fed.Ask(hq);
      const double peak = *std::max_element(h.begin(), h.end());
      if (j == 0 && round == 0) first = peak;
      if (j == 0) last = peak;
      if (!(peak < prev)) ++violations;
      prev = peak;
      s = RefineThresholds(h, s, d.bounds[j], q);
    }
  }
  const bool pass = a - b >= 0.02 && violations == 0;
  return {pass, Fmt("IH %.4f", a) + Fmt(" vs uniform %.4f", b) + Fmt(" (gap %.4f)", a - b) +
                    "; " + std::to_string(violations) + " non-decreasing rounds" +
                    Fmt(", feature 0 peak %.1f", first) + Fmt(" -> %.1f", last)};
}

Outcome BatchedUpdates() {
  const Dataset& d = Benchmark();
  std::map<int, double> auc;
  bool rounds_ok = true;
  std::string rounds;
  for (int b : {1, 20, 50}) {
    TrainConfig c = BaselinePreset("DP-TR-Batch-Newton-IH-EBM");
    c.batch_fraction = 0.0;
    c.batch_size = b;
    c.num_trees = 200;
    c.epsilon = 0.1;
    std::vector<ExperimentResult> runs;
    auc[b] = MedianAuc(d, c, &runs);
    const std::int64_t want =
        (c.num_trees + b - 1) / b + std::min(c.ih_rounds, c.num_trees);
    const CommLedger planned = CommAccounting(c, d.num_features());
    if (planned.rounds != want) rounds_ok = false;
    for (const auto& r : runs) {
      if (r.comm.rounds != want || r.gradient_barriers != (c.num_trees + b - 1) / b) {
        rounds_ok = false;
      }
    }
    rounds += " B=" + std::to_string(b) + ":" + std::to_string(planned.rounds);
  }
  const double best = std::max(auc[20], auc[50]);
  const bool pass = best >= auc[1] - 0.005 && rounds_ok;
  return {pass, Fmt("B=1 %.4f", auc[1]) + Fmt(", B=20 %.4f", auc[20]) +
                    Fmt(", B=50 %.4f", auc[50]) + "; rounds" + rounds +
                    (rounds_ok ? " (exact)" : " (MISMATCH)")};
}

Outcome LocalGap() {
  const Dataset& d = Benchmark();
  TrainConfig ldp = BaselinePreset("LDP");
  TrainConfig central = BaselinePreset("DP-TR-Newton");
  ldp.epsilon = central.epsilon = 1.0;
  const double a = MedianAuc(d, central);
  const double b = MedianAuc(d, ldp);
  return {a - b >= 0.03,
          Fmt("central %.4f", a) + Fmt(" vs LDP %.4f", b) + Fmt(" (gap %.4f)", a - b)};
}

Outcome AucKernel() {
  Rng rng(1212);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 2 + rng.UniformInt(800);
    std::vector<int> y(n);
    std::vector<double> s(n);
    for (std::size_t k = 0; k < n; ++k) {
      y[k] = k < 2 ? static_cast<int>(k) : (rng.Uniform() < 0.4 ? 1 : 0);
      s[k] = i % 2 ? std::floor(rng.Uniform() * 8) : rng.Normal() + y[k];
    }
    worst = std::max(worst, std::fabs(AucRoc(y, s) - oracle::PairwiseAuc(y, s)));
  }
  return {worst <= kAucTol, Fmt("max error %.3g over 100 inputs", worst)};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;  // 0: no runtime bound
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace fedgbdt

int main() {
  using namespace fedgbdt;
  const std::vector<Criterion> criteria{
      {1, "accounting arithmetic", 10, Accounting},
      {2, "calibration scaling", 5, CalibrationScaling},
      {3, "ledger conservation", 120, LedgerConservation},
      {4, "noise-off oracle equivalence", 60, NoiseOffOracle},
      {5, "gradient correctness", 0, GradientCorrectness},
      {6, "secure-sum fidelity", 0, SecureSumFidelity},
      {7, "totally random beats histogram", 600, RandomVsHistogram},
      {8, "update modes", 600, UpdateModes},
      {9, "iterative Hessian candidates", 600, IterativeHessian},
      {10, "batched updates", 600, BatchedUpdates},
      {11, "local DP gap", 600, LocalGap},
      {12, "AUC kernel", 0, AucKernel},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0 && secs >= c.limit_s) {
      o.pass = false;
      o.detail += " [over time limit]";
    }
    if (!o.pass) ++failed;
    std::printf("%s %d: %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
