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

#ifndef FEDGBDT_HARNESS_H_
#define FEDGBDT_HARNESS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fedgbdt/accountant.h"
#include "fedgbdt/config.h"
#include "fedgbdt/config_io.h"
#include "fedgbdt/data.h"
#include "fedgbdt/federation.h"

namespace fedgbdt {

// Probability that a random positive outscores a random negative, ties 1/2.
// O(n log n). Throws kUndefinedAuc unless both classes are present.
double AucRoc(std::span<const int> labels, std::span<const double> scores);

const std::vector<std::string>& PresetNames();
// Accepts the names from PresetNames(); the batched preset also takes its
// fraction, e.g. "DP-TR-Batch-Newton-IH-EBM(p=0.1)". Throws kUnknownName.
TrainConfig BaselinePreset(const std::string& name);

struct ExperimentResult {
  double test_auc = 0.0;
  double train_auc = 0.0;
  double sigma = 0.0;
  QueryCounter planned;
  QueryCounter observed;
  CommLedger comm;  // instrumented on the live run
  std::int64_t gradient_barriers = 0;
  bool partially_non_private = false;
  double wall_seconds = 0.0;
};

// Partitions the train side into clients, trains, and scores both sides.
ExperimentResult RunExperiment(const TrainConfig& config, const SplitPair& split);

struct DatasetSpec {
  std::string name = "synthetic";
  std::optional<SyntheticSpec> synthetic;
  std::string csv_path;
  std::string label_column = "label";
  std::string bounds_path;  // optional declared bounds JSON
};

Dataset MaterializeDataset(const DatasetSpec& spec);

struct GridConfig {
  std::string name;
  std::string preset;  // empty: start from TrainConfig defaults
  KeyValues overrides;
};

struct GridSpec {
  DatasetSpec dataset;
  std::vector<GridConfig> configs;
  std::vector<double> epsilons{1.0};
  std::vector<std::uint64_t> split_seeds{0};
  std::vector<std::uint64_t> repeat_seeds{0};
  double train_fraction = 0.7;
  int jobs = 1;
};

// JSON grid description; see README.md.
GridSpec LoadGridSpec(const std::string& path);
GridSpec ParseGridSpec(const std::string& json_text);
TrainConfig ResolveGridConfig(const GridConfig& config);

struct GridRow {
  std::string dataset;
  std::string config;
  double epsilon = 0.0;
  std::uint64_t split_seed = 0;
  std::uint64_t repeat_seed = 0;
  std::string status;  // "ok" or "error"
  std::string error;
  ExperimentResult result;
};

// Fixed column order of the results CSV.
const std::vector<std::string>& GridColumns();

struct SummaryRow {
  std::string dataset;
  std::string config;
  double epsilon = 0.0;
  int runs = 0;
  int errors = 0;
  double mean_auc = 0.0;
  double std_auc = 0.0;
};

// Runs every (config, epsilon, split seed, repeat seed) cell. Rows are
// appended to `out_csv` in cell order; cells already present in the file are
// skipped, so an interrupted grid resumes where it stopped. Also writes
// `<out_csv>.summary.csv` and `<out_csv>.configs.json`. Returns all rows.
std::vector<GridRow> RunGrid(const GridSpec& spec, const std::string& out_csv);

std::vector<GridRow> ReadGridCsv(const std::string& path);
std::vector<SummaryRow> Summarize(std::span<const GridRow> rows);

struct RankRow {
  double epsilon = 0.0;
  std::string method;
  double average_rank = 0.0;
};

// Per (dataset, epsilon) cell, methods are ranked by mean AUC (1 = best, ties
// share the mean rank); ranks are then averaged over datasets. Throws
// kMissingCells naming every absent (dataset, epsilon, method).
std::vector<RankRow> RankTable(std::span<const SummaryRow> summary);

}  // namespace fedgbdt

#endif  // FEDGBDT_HARNESS_H_
