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

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "fedgbdt/config.h"
#include "fedgbdt/rng.h"
#include "test_util.h"

namespace fedgbdt {
namespace {

std::vector<double> DenseGrid(double lo, double hi, double step) {
  std::vector<double> g;
  for (int i = 0;; ++i) {
    const double a = lo + step * i;
    if (a > hi + 1e-12) break;
    g.push_back(a);
  }
  return g;
}

// Closed form, written without touching the library.
double OracleEpsilon(double sigma, double k, double delta,
                     const std::vector<double>& alphas) {
  double best = std::numeric_limits<double>::infinity();
  for (double a : alphas) {
    best = std::min(best, k * a / (2 * sigma * sigma) + std::log(1 / delta) / (a - 1));
  }
  return std::max(best, 0.0);
}

TEST(AccountantTest, GaussianRdpExamples) {
  const std::vector<double> a2{2.0}, a4{4.0}, a8{8.0};
  EXPECT_DOUBLE_EQ(GaussianRdp(1.0, a2).taus[0], 1.0);
  EXPECT_DOUBLE_EQ(GaussianRdp(2.0, a4).taus[0], 0.5);
  EXPECT_DOUBLE_EQ(GaussianRdp(0.5, a8).taus[0], 16.0);
}

TEST(AccountantTest, ComposeExamples) {
  const std::vector<double> a{2.0};
  const RdpCurve c = GaussianRdp(1.0, a);
  const std::vector<RdpCurve> two{c, c};
  const std::vector<double> ones{1, 1};
  EXPECT_DOUBLE_EQ(ComposeSequential(two, ones).taus[0], 2.0);
  const std::vector<RdpCurve> one{c};
  const std::vector<double> hundred{100};
  EXPECT_DOUBLE_EQ(ComposeSequential(one, hundred).taus[0], 100.0);
  const RdpCurve empty = ComposeSequential({}, {});
  EXPECT_EQ(empty.alphas, DefaultAlphaGrid());
  for (double t : empty.taus) EXPECT_EQ(t, 0.0);
}

TEST(AccountantTest, ComposeRejectsMismatchedGrids) {
  const std::vector<double> a{2.0}, b{3.0};
  const std::vector<RdpCurve> curves{GaussianRdp(1, a), GaussianRdp(1, b)};
  const std::vector<double> ones{1, 1};
  EXPECT_ERROR_CODE(ComposeSequential(curves, ones), ErrorCode::kGridMismatch);
}

TEST(AccountantTest, RdpToDpExamples) {
  RdpCurve single{{2.0}, {1.0}};
  EXPECT_NEAR(RdpToDp(single, std::exp(-1.0)), 2.0, 1e-12);

  const auto grid = DefaultAlphaGrid();
  RdpCurve zero{grid, std::vector<double>(grid.size(), 0.0)};
  EXPECT_NEAR(RdpToDp(zero, 1e-5), std::log(1e5) / (grid.back() - 1), 1e-12);
}

TEST(AccountantTest, DefaultGridShape) {
  const auto g = DefaultAlphaGrid();
  EXPECT_EQ(g.front(), 1.5);
  EXPECT_EQ(g.back(), 256.0);
  EXPECT_EQ(g.size(), 35u + 54u + 2u);
  EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
}

TEST(AccountantTest, DenseGridOracleExample) {
  const auto grid = DenseGrid(1.5, 64, 0.01);
  const double eps = GaussianEpsilon(3.0, 150, 1e-5, grid);
  EXPECT_NEAR(eps, OracleEpsilon(3.0, 150, 1e-5, grid), 1e-6);
}

TEST(AccountantTest, DenseGridOracleRandomCases) {
  Rng rng(101);
  const auto grid = DenseGrid(1.01, 256, 0.01);
  for (int i = 0; i < 200; ++i) {
    const double sigma = std::exp(std::log(0.5) + rng.Uniform() * std::log(400.0));
    const auto k = static_cast<std::int64_t>(1 + rng.UniformInt(2000));
    const double delta = std::pow(10.0, -2.0 - 6.0 * rng.Uniform());
    const std::vector<RdpCurve> curves{GaussianRdp(sigma, grid)};
    const std::vector<double> counts{static_cast<double>(k)};
    const double eps = RdpToDp(ComposeSequential(curves, counts), delta);
    ASSERT_NEAR(eps, OracleEpsilon(sigma, k, delta, grid), 1e-6)
        << "sigma=" << sigma << " k=" << k << " delta=" << delta;
    // A finite grid can only overshoot the continuous optimum.
    const double rho = k / (2 * sigma * sigma);
    const double a_star = 1 + std::sqrt(std::log(1 / delta) / rho);
    if (a_star > 1.01 && a_star < 256) {
      const double cont = rho + 2 * std::sqrt(rho * std::log(1 / delta));
      ASSERT_GE(eps, cont - 1e-9);
      ASSERT_LE(eps, cont + 1e-3 * (1 + cont));
    }
  }
}

TEST(AccountantTest, Homogeneity) {
  const auto grid = DefaultAlphaGrid();
  const auto base = GaussianRdp(1.7, grid);
  const auto scaled = GaussianRdp(1.7 * 3.0, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(scaled.taus[i], base.taus[i] / 9.0, 1e-12 * base.taus[i]);
  }
}

TEST(AccountantTest, CompositionCommutesAndAssociates) {
  const auto grid = DefaultAlphaGrid();
  const auto a = GaussianRdp(1.0, grid), b = GaussianRdp(2.0, grid),
             c = GaussianRdp(5.0, grid);
  const std::vector<RdpCurve> abc{a, b, c}, cba{c, b, a};
  const std::vector<double> w1{2, 3, 4}, w2{4, 3, 2};
  const auto x = ComposeSequential(abc, w1);
  const auto y = ComposeSequential(cba, w2);
  const std::vector<RdpCurve> ab{a, b};
  const std::vector<double> w3{2, 3};
  const std::vector<RdpCurve> nested{ComposeSequential(ab, w3), c};
  const std::vector<double> w4{1, 4};
  const auto z = ComposeSequential(nested, w4);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(x.taus[i], y.taus[i], 1e-12 * x.taus[i]);
    EXPECT_NEAR(x.taus[i], z.taus[i], 1e-12 * x.taus[i]);
  }
}

TEST(AccountantTest, EpsilonMonotonicity) {
  const auto grid = DefaultAlphaGrid();
  double prev = std::numeric_limits<double>::infinity();
  for (double sigma = 0.5; sigma < 200; sigma *= 1.3) {
    const double e = GaussianEpsilon(sigma, 50, 1e-5, grid);
    EXPECT_LE(e, prev);
    prev = e;
  }
  prev = 0;
  for (std::int64_t k = 1; k < 5000; k *= 2) {
    const double e = GaussianEpsilon(10.0, k, 1e-5, grid);
    EXPECT_GE(e, prev);
    prev = e;
  }
}

TEST(AccountantTest, ImprovedConversionNeverWorse) {
  const auto grid = DefaultAlphaGrid();
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    const double sigma = 0.5 + 50 * rng.Uniform();
    const auto k = static_cast<std::int64_t>(1 + rng.UniformInt(500));
    EXPECT_LE(GaussianEpsilon(sigma, k, 1e-5, grid, RdpConversion::kImproved),
              GaussianEpsilon(sigma, k, 1e-5, grid));
  }
}

TEST(AccountantTest, CalibrationScaling) {
  const auto grid = DefaultAlphaGrid();
  const double s100 = CalibrateSigma({1.0, 1e-5}, {0, 0, 100}, grid);
  const double s200 = CalibrateSigma({1.0, 1e-5}, {0, 0, 200}, grid);
  EXPECT_GE(s200 / s100, 1.30);
  EXPECT_LE(s200 / s100, 1.45);
}

TEST(AccountantTest, CalibrationExamples) {
  const auto grid = DefaultAlphaGrid();
  EXPECT_LT(CalibrateSigma({100.0, 1e-5}, {0, 0, 1}, grid), 0.5);
  const double loose = CalibrateSigma({2.0, 1e-5}, {0, 10, 0}, grid);
  const double tight = CalibrateSigma({1.0, 1e-5}, {0, 10, 0}, grid);
  EXPECT_GT(tight, loose);
}

TEST(AccountantTest, CalibrationRoundTrip) {
  const auto grid = DefaultAlphaGrid();
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const double eps = 0.05 + 5 * rng.Uniform();
    const double delta = std::pow(10.0, -3.0 - 4.0 * rng.Uniform());
    const auto k = static_cast<std::int64_t>(1 + rng.UniformInt(3000));
    const double sigma = CalibrateSigma({eps, delta}, {k, 0, 0}, grid);
    EXPECT_LE(GaussianEpsilon(sigma, k, delta, grid), eps);
    EXPECT_GT(GaussianEpsilon((1 - 1e-3) * sigma, k, delta, grid), eps);
  }
}

TEST(AccountantTest, CalibrationErrors) {
  const auto grid = DefaultAlphaGrid();
  EXPECT_ERROR_CODE(CalibrateSigma({1.0, 1e-5}, {0, 0, 0}, grid), ErrorCode::kZeroQuery);
  EXPECT_ERROR_CODE(CalibrateSigma({1e-9, 1e-5}, {0, 0, 1000000}, grid),
                    ErrorCode::kCalibrationFailed);
  EXPECT_ERROR_CODE(CalibrateSigma({-1.0, 1e-5}, {0, 0, 1}, grid),
                    ErrorCode::kInvalidParameter);
  EXPECT_ERROR_CODE(CalibrateSigma({1.0, 1.5}, {0, 0, 1}, grid),
                    ErrorCode::kInvalidParameter);
}

TrainConfig Base(SplitMethod method, int t) {
  TrainConfig c;
  c.split_method = method;
  c.num_trees = t;
  return c;
}

TEST(CountQueriesTest, Examples) {
  TrainConfig hist = Base(SplitMethod::kHist, 25);
  EXPECT_EQ(CountQueries(hist, 10), (QueryCounter{0, 1000, 0}));
  EXPECT_EQ(CountQueries(Base(SplitMethod::kTotallyRandom, 300), 10),
            (QueryCounter{0, 0, 300}));
  TrainConfig ih = Base(SplitMethod::kTotallyRandom, 100);
  ih.candidate_method = CandidateMethod::kIterativeHessian;
  ih.ih_rounds = 5;
  EXPECT_EQ(CountQueries(ih, 10), (QueryCounter{50, 0, 100}));
}

TEST(CountQueriesTest, FeatureSubsetsAndIh) {
  TrainConfig pr = Base(SplitMethod::kPartiallyRandom, 10);
  pr.feature_mode = FeatureMode::kRandom;
  pr.feature_subset = 3;
  EXPECT_EQ(CountQueries(pr, 8), (QueryCounter{0, 10 * 3 * 4, 0}));
  pr.candidate_method = CandidateMethod::kIterativeHessian;
  pr.ih_rounds = 2;
  EXPECT_EQ(CountQueries(pr, 8), (QueryCounter{2 * 3, 10 * 3 * 4, 0}));

  TrainConfig ebm = Base(SplitMethod::kHist, 10);
  ebm.feature_subset = 1;
  EXPECT_EQ(CountQueries(ebm, 8), (QueryCounter{0, 10, 0}));
  // Hist with k = 1 refines from its own root histograms.
  ebm.candidate_method = CandidateMethod::kIterativeHessian;
  EXPECT_EQ(CountQueries(ebm, 8), (QueryCounter{0, 10, 0}));

  TrainConfig cyc = Base(SplitMethod::kTotallyRandom, 10);
  cyc.feature_subset = 1;
  cyc.candidate_method = CandidateMethod::kIterativeHessian;
  cyc.ih_rounds = 20;  // capped at T
  EXPECT_EQ(CountQueries(cyc, 8), (QueryCounter{10 * 8, 0, 10}));
}

TEST(CountQueriesTest, LocalAndNonPrivate) {
  TrainConfig c = Base(SplitMethod::kTotallyRandom, 40);
  c.privacy_model = PrivacyModel::kLocal;
  EXPECT_EQ(CountQueries(c, 5), (QueryCounter{0, 0, 40}));
  c.privacy_model = PrivacyModel::kCentral;
  c.private_training = false;
  EXPECT_EQ(CountQueries(c, 5), (QueryCounter{0, 0, 0}));
}

}  // namespace
}  // namespace fedgbdt
