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

// fedgbdt train | grid | presets | account

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "fedgbdt/accountant.h"
#include "fedgbdt/boosting.h"
#include "fedgbdt/config_io.h"
#include "fedgbdt/error.h"
#include "fedgbdt/federation.h"
#include "fedgbdt/harness.h"
#include "fedgbdt/model_io.h"

namespace {

using nlohmann::json;
using namespace fedgbdt;

int ReportError(const std::string& code, const std::string& message, int status) {
  std::cerr << "error: " << json{{"code", code}, {"message", message}}.dump() << '\n';
  return status;
}

// Preset, then config file, then one flag per config key.
struct ConfigOptions {
  std::string preset;
  std::string config_path;
  std::map<std::string, std::string> flags;

  void Register(CLI::App* app) {
    app->add_option("--preset", preset, "Start from a baseline preset");
    app->add_option("--config", config_path, "Key/value config file");
    for (const auto& key : ConfigKeys()) {
      app->add_option("--" + key, flags[key], "Override config key " + key);
    }
  }

  TrainConfig Resolve() const {
    TrainConfig c = preset.empty() ? TrainConfig{} : BaselinePreset(preset);
    if (!config_path.empty()) ApplyKeyValues(c, ReadKeyValueFile(config_path));
    for (const auto& key : ConfigKeys()) {
      const auto& v = flags.at(key);
      if (!v.empty()) SetConfigValue(c, key, v);
    }
    return c;
  }
};

struct DataOptions {
  std::string csv;
  std::string label = "label";
  std::string bounds;
  SyntheticSpec synthetic;
  bool use_synthetic = false;
  double train_fraction = 0.7;
  std::uint64_t split_seed = 0;

  void Register(CLI::App* app) {
    app->add_option("--csv", csv, "Numeric CSV with a header row");
    app->add_option("--label", label, "Label column name");
    app->add_option("--bounds", bounds, "Declared feature bounds JSON");
    auto* n = app->add_option("--synthetic-rows", synthetic.num_rows,
                              "Generate a synthetic dataset with this many rows");
    app->add_option("--synthetic-features", synthetic.num_features)->needs(n);
    app->add_option("--synthetic-skew", synthetic.skewed_fraction)->needs(n);
    app->add_option("--synthetic-balance", synthetic.class_balance)->needs(n);
    app->add_option("--synthetic-seed", synthetic.seed)->needs(n);
    n->excludes(app->get_option("--csv"));
    app->add_option("--train-fraction", train_fraction);
    app->add_option("--split-seed", split_seed);
    app->callback([this, n] { use_synthetic = n->count() > 0; });
  }

  DatasetSpec Spec() const {
    DatasetSpec spec;
    if (use_synthetic) {
      spec.synthetic = synthetic;
    } else {
      Require(!csv.empty(), ErrorCode::kInvalidParameter,
              "pass --csv or --synthetic-rows");
      spec.name = csv;
      spec.csv_path = csv;
      spec.label_column = label;
      spec.bounds_path = bounds;
    }
    return spec;
  }
};

json LedgerJson(const QueryCounter& q) {
  return {{"kappa_c", q.kappa_c}, {"kappa_s", q.kappa_s}, {"kappa_w", q.kappa_w},
          {"total", q.total()}};
}

json CommJson(const CommLedger& c) {
  return {{"rounds", c.rounds},
          {"uplink_values", c.uplink_values},
          {"per_round_payload", c.per_round_payload},
          {"uplink_bytes", c.uplink_bytes()},
          {"per_round_bytes", c.per_round_bytes()},
          {"secure_agg_multiplier", c.secure_agg_multiplier}};
}

int RunTrain(const ConfigOptions& co, const DataOptions& dopt, const std::string& model) {
  const TrainConfig config = co.Resolve();
  const Dataset data = MaterializeDataset(dopt.Spec());
  const SplitPair split = TrainTestSplit(data, dopt.train_fraction, dopt.split_seed);

  auto train = std::make_shared<const Dataset>(split.train);
  const std::size_t clients = config.num_clients > 0
                                  ? static_cast<std::size_t>(config.num_clients)
                                  : train->num_rows();
  Federation federation(Partition(train, clients, config.partition, config.seed),
                        {config.fixed_point_bits, config.privacy_model, config.seed});
  const TrainResult result = Train(config, federation);
  if (!model.empty()) SaveEnsemble(result.ensemble, model);

  const auto& stats = federation.stats();
  json out = {
      {"test_auc", AucRoc(split.test.labels, result.ensemble.PredictAll(split.test))},
      {"train_auc", AucRoc(split.train.labels, result.ensemble.PredictAll(split.train))},
      {"sigma", result.sigma},
      {"delta", result.delta},
      {"planned", LedgerJson(result.planned)},
      {"observed", LedgerJson(stats.ledger)},
      {"comm", CommJson(CommAccounting(config, data.num_features()))},
      {"gradient_barriers", stats.gradient_barriers},
      {"partially_non_private", !result.uses_private_candidates},
  };
  std::cout << out.dump(2) << '\n';
  return 0;
}

int RunAccount(const ConfigOptions& co, std::size_t n, std::size_t m) {
  const TrainConfig config = co.Resolve();
  config.Validate(m);
  const QueryCounter q = CountQueries(config, m);
  json out = {{"kappa", LedgerJson(q)}, {"comm", CommJson(CommAccounting(config, m))}};
  if (config.private_training) {
    const double delta = config.delta > 0.0 ? config.delta : 1.0 / static_cast<double>(n);
    out["epsilon"] = config.epsilon;
    out["delta"] = delta;
    out["sigma"] = CalibrateSigma({config.epsilon, delta}, q, DefaultAlphaGrid());
  } else {
    out["sigma"] = 0.0;
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int RunGridCommand(const std::string& spec_path, const std::string& out_csv,
                   std::optional<int> jobs) {
  GridSpec spec = LoadGridSpec(spec_path);
  if (jobs) spec.jobs = *jobs;
  const auto rows = RunGrid(spec, out_csv);
  int errors = 0;
  for (const auto& r : rows) errors += r.status != "ok";
  std::cout << json{{"rows", rows.size()}, {"errors", errors}, {"results", out_csv}}.dump()
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated gradient-boosted trees under differential privacy"};
  app.require_subcommand(1);

  ConfigOptions train_config;
  DataOptions train_data;
  std::string model_path;
  auto* train = app.add_subcommand("train", "Train one config and print metrics");
  train_config.Register(train);
  train_data.Register(train);
  train->add_option("--model", model_path, "Write the ensemble JSON here");

  std::string grid_spec;
  std::string grid_out = "results.csv";
  std::optional<int> grid_jobs;
  auto* grid = app.add_subcommand("grid", "Run an experiment grid");
  grid->add_option("--spec", grid_spec, "Grid spec JSON")->required();
  grid->add_option("--out", grid_out, "Results CSV (appended, resumable)");
  grid->add_option("--jobs", grid_jobs, "Worker threads");

  auto* presets = app.add_subcommand("presets", "List baseline presets");
  bool show_configs = false;
  presets->add_flag("--show", show_configs, "Print each preset's full config");

  ConfigOptions account_config;
  std::size_t num_records = 0;
  std::size_t num_features = 0;
  auto* account = app.add_subcommand("account", "Query ledger, sigma and comm cost");
  account_config.Register(account);
  account->add_option("--num-records", num_records)->required()->check(CLI::PositiveNumber);
  account->add_option("--num-features", num_features)->required()->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return ReportError("usage", e.what(), 2);
  }

  try {
    if (*train) return RunTrain(train_config, train_data, model_path);
    if (*grid) return RunGridCommand(grid_spec, grid_out, grid_jobs);
    if (*account) return RunAccount(account_config, num_records, num_features);
    if (*presets) {
      for (const auto& name : PresetNames()) {
        if (show_configs) {
          std::cout << "[" << name << "]\n" << ConfigToText(BaselinePreset(name)) << '\n';
        } else {
          std::cout << name << '\n';
        }
      }
      return 0;
    }
  } catch (const Error& e) {
    return ReportError(std::string(ErrorCodeName(e.code())), e.what(), 1);
  } catch (const std::exception& e) {
    return ReportError("internal", e.what(), 1);
  }
  return 0;
}
