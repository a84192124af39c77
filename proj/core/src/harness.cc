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

#include "fedgbdt/harness.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

#include "fedgbdt/boosting.h"
#include "fedgbdt/error.h"
#include "fedgbdt/rng.h"

namespace fedgbdt {

namespace {

using nlohmann::json;

std::string FormatDouble(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

double ParseDouble(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  Require(ec == std::errc() && ptr == s.data() + s.size(), ErrorCode::kParse,
          "not a number: '" + s + "'");
  return v;
}

template <typename T>
T ParseInt(const std::string& s) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  Require(ec == std::errc() && ptr == s.data() + s.size(), ErrorCode::kParse,
          "not an integer: '" + s + "'");
  return v;
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string Sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

}  // namespace

double AucRoc(std::span<const int> labels, std::span<const double> scores) {
  Require(labels.size() == scores.size(), ErrorCode::kShapeMismatch,
          "labels and scores differ in length");
  const std::size_t n = labels.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  double positives = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // Ranks i+1 .. j share their mean.
    const double mean_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        rank_sum += mean_rank;
        positives += 1.0;
      }
    }
    i = j;
  }
  const double negatives = static_cast<double>(n) - positives;
  Require(positives > 0 && negatives > 0, ErrorCode::kUndefinedAuc,
          "AUC needs both classes present");
  return (rank_sum - positives * (positives + 1.0) / 2.0) / (positives * negatives);
}

const std::vector<std::string>& PresetNames() {
  static const std::vector<std::string> names = {
      "DP-EBM",          "DP-EBM-Newton",   "DP-GBM",
      "DP-RF",           "FEVERLESS",       "LDP",
      "DP-TR-Newton",    "DP-TR-Newton-IH", "DP-TR-Newton-IH-EBM",
      "DP-TR-Batch-Newton-IH-EBM",
  };
  return names;
}

TrainConfig BaselinePreset(const std::string& name) {
  TrainConfig c;
  c.candidate_method = CandidateMethod::kUniform;
  c.feature_mode = FeatureMode::kCyclical;
  c.feature_subset = 0;
  c.batch_size = 1;
  auto tr_newton = [&] {
    c.split_method = SplitMethod::kTotallyRandom;
    c.update_mode = UpdateMode::kNewton;
  };
  auto ebm = [&] {
    c.feature_mode = FeatureMode::kCyclical;
    c.feature_subset = 1;
  };
  const std::string batch_prefix = "DP-TR-Batch-Newton-IH-EBM";
  if (name == "DP-EBM") {
    c.split_method = SplitMethod::kTotallyRandom;
    c.update_mode = UpdateMode::kGradient;
    ebm();
  } else if (name == "DP-EBM-Newton") {
    tr_newton();
    ebm();
  } else if (name == "DP-GBM") {
    c.split_method = SplitMethod::kHist;
    c.update_mode = UpdateMode::kGradient;
  } else if (name == "DP-RF") {
    c.split_method = SplitMethod::kTotallyRandom;
    c.update_mode = UpdateMode::kAveraging;
  } else if (name == "FEVERLESS") {
    c.split_method = SplitMethod::kHist;
    c.update_mode = UpdateMode::kNewton;
  } else if (name == "LDP") {
    tr_newton();
    c.privacy_model = PrivacyModel::kLocal;
  } else if (name == "DP-TR-Newton") {
    tr_newton();
  } else if (name == "DP-TR-Newton-IH") {
    tr_newton();
    c.candidate_method = CandidateMethod::kIterativeHessian;
  } else if (name == "DP-TR-Newton-IH-EBM") {
    tr_newton();
    ebm();
    c.candidate_method = CandidateMethod::kIterativeHessian;
  } else if (name.rfind(batch_prefix, 0) == 0) {
    std::string rest = name.substr(batch_prefix.size());
    double p = 0.25;
    if (!rest.empty()) {
      Require(rest.size() >= 3 && rest.front() == '(' && rest.back() == ')',
              ErrorCode::kUnknownName, "unknown preset '" + name + "'");
      rest = rest.substr(1, rest.size() - 2);
      if (rest.rfind("p=", 0) == 0) rest = rest.substr(2);
      p = ParseDouble(rest);
      Require(p > 0.0 && p <= 1.0, ErrorCode::kInvalidParameter,
              "batch fraction must be in (0, 1]");
    }
    tr_newton();
    ebm();
    c.candidate_method = CandidateMethod::kIterativeHessian;
    c.batch_fraction = p;
  } else {
    Fail(ErrorCode::kUnknownName, "unknown preset '" + name + "'");
  }
  return c;
}

ExperimentResult RunExperiment(const TrainConfig& config, const SplitPair& split) {
  const auto start = std::chrono::steady_clock::now();
  auto train = std::make_shared<const Dataset>(split.train);
  const std::size_t clients =
      config.num_clients > 0 ? static_cast<std::size_t>(config.num_clients)
                             : train->num_rows();
  Federation federation(Partition(train, clients, config.partition, config.seed),
                        {config.fixed_point_bits, config.privacy_model, config.seed});
  const TrainResult trained = Train(config, federation);

  ExperimentResult r;
  r.sigma = trained.sigma;
  r.planned = trained.planned;
  r.partially_non_private = !trained.uses_private_candidates;
  const auto& stats = federation.stats();
  r.observed = stats.ledger;
  r.comm.rounds = stats.rounds;
  r.comm.uplink_values = stats.uplink_values;
  r.comm.per_round_payload = stats.max_round_payload;
  r.gradient_barriers = stats.gradient_barriers;
  r.test_auc = AucRoc(split.test.labels, trained.ensemble.PredictAll(split.test));
  r.train_auc = AucRoc(split.train.labels, trained.ensemble.PredictAll(split.train));
  r.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

Dataset MaterializeDataset(const DatasetSpec& spec) {
  if (spec.synthetic) return Synthesize(*spec.synthetic);
  Require(!spec.csv_path.empty(), ErrorCode::kInvalidParameter,
          "dataset needs either synthetic parameters or a CSV path");
  std::optional<BoundsMap> bounds;
  if (!spec.bounds_path.empty()) bounds = LoadBoundsJson(spec.bounds_path);
  return LoadCsv(spec.csv_path, spec.label_column, bounds);
}

GridSpec ParseGridSpec(const std::string& json_text) {
  GridSpec spec;
  try {
    const json j = json::parse(json_text);
    const json& d = j.at("dataset");
    spec.dataset.name = d.value("name", "synthetic");
    if (d.contains("synthetic")) {
      const json& s = d.at("synthetic");
      SyntheticSpec syn;
      syn.num_rows = s.value("n", syn.num_rows);
      syn.num_features = s.value("m", syn.num_features);
      syn.skewed_fraction = s.value("skewed_fraction", syn.skewed_fraction);
      syn.class_balance = s.value("class_balance", syn.class_balance);
      syn.seed = s.value("seed", syn.seed);
      spec.dataset.synthetic = syn;
    } else {
      spec.dataset.csv_path = d.at("csv").get<std::string>();
      spec.dataset.label_column = d.value("label", "label");
      spec.dataset.bounds_path = d.value("bounds", "");
      if (!d.contains("name")) spec.dataset.name = spec.dataset.csv_path;
    }
    for (const json& c : j.at("configs")) {
      GridConfig gc;
      gc.preset = c.value("preset", "");
      gc.name = c.value("name", gc.preset);
      Require(!gc.name.empty(), ErrorCode::kParse, "grid config without a name");
      Require(gc.name.find_first_of(",\n") == std::string::npos, ErrorCode::kParse,
              "config names may not contain commas");
      if (c.contains("overrides")) {
        for (const auto& [k, v] : c.at("overrides").items()) {
          gc.overrides.emplace_back(k, v.is_string() ? v.get<std::string>() : v.dump());
        }
      }
      spec.configs.push_back(std::move(gc));
    }
    if (j.contains("epsilons")) spec.epsilons = j.at("epsilons").get<std::vector<double>>();
    if (j.contains("split_seeds")) {
      spec.split_seeds = j.at("split_seeds").get<std::vector<std::uint64_t>>();
    }
    if (j.contains("repeat_seeds")) {
      spec.repeat_seeds = j.at("repeat_seeds").get<std::vector<std::uint64_t>>();
    }
    spec.train_fraction = j.value("train_fraction", spec.train_fraction);
    spec.jobs = j.value("jobs", spec.jobs);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string("grid spec: ") + e.what());
  }
  Require(!spec.configs.empty(), ErrorCode::kParse, "grid spec has no configs");
  std::set<std::string> names;
  for (const auto& c : spec.configs) {
    Require(names.insert(c.name).second, ErrorCode::kParse,
            "duplicate config name '" + c.name + "'");
  }
  return spec;
}

GridSpec LoadGridSpec(const std::string& path) {
  std::ifstream in(path);
  Require(in.good(), ErrorCode::kIo, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseGridSpec(buf.str());
}

TrainConfig ResolveGridConfig(const GridConfig& config) {
  TrainConfig c = config.preset.empty() ? TrainConfig{} : BaselinePreset(config.preset);
  ApplyKeyValues(c, config.overrides);
  return c;
}

const std::vector<std::string>& GridColumns() {
  static const std::vector<std::string> cols = {
      "dataset",         "config",          "epsilon",
      "split_seed",      "repeat_seed",     "status",
      "test_auc",        "train_auc",       "sigma",
      "planned_kappa_c", "planned_kappa_s", "planned_kappa_w",
      "kappa_c",         "kappa_s",         "kappa_w",
      "rounds",          "uplink_values",   "per_round_payload",
      "gradient_barriers", "partially_non_private", "wall_time_s",
      "error",
  };
  return cols;
}

namespace {

std::string HeaderLine() {
  std::string out;
  for (const auto& c : GridColumns()) out += (out.empty() ? "" : ",") + c;
  return out;
}

std::string RowLine(const GridRow& row) {
  const auto& r = row.result;
  std::vector<std::string> cells = {
      row.dataset,
      row.config,
      FormatDouble(row.epsilon),
      std::to_string(row.split_seed),
      std::to_string(row.repeat_seed),
      row.status,
      FormatDouble(r.test_auc),
      FormatDouble(r.train_auc),
      FormatDouble(r.sigma),
      std::to_string(r.planned.kappa_c),
      std::to_string(r.planned.kappa_s),
      std::to_string(r.planned.kappa_w),
      std::to_string(r.observed.kappa_c),
      std::to_string(r.observed.kappa_s),
      std::to_string(r.observed.kappa_w),
      std::to_string(r.comm.rounds),
      std::to_string(r.comm.uplink_values),
      std::to_string(r.comm.per_round_payload),
      std::to_string(r.gradient_barriers),
      r.partially_non_private ? "1" : "0",
      FormatDouble(r.wall_seconds),
      Sanitize(row.error),
  };
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
  return out;
}

GridRow ParseRow(const std::vector<std::string>& c) {
  Require(c.size() == GridColumns().size(), ErrorCode::kParse,
          "results row has " + std::to_string(c.size()) + " cells");
  GridRow row;
  row.dataset = c[0];
  row.config = c[1];
  row.epsilon = ParseDouble(c[2]);
  row.split_seed = ParseInt<std::uint64_t>(c[3]);
  row.repeat_seed = ParseInt<std::uint64_t>(c[4]);
  row.status = c[5];
  auto& r = row.result;
  r.test_auc = ParseDouble(c[6]);
  r.train_auc = ParseDouble(c[7]);
  r.sigma = ParseDouble(c[8]);
  r.planned = {ParseInt<std::int64_t>(c[9]), ParseInt<std::int64_t>(c[10]),
               ParseInt<std::int64_t>(c[11])};
  r.observed = {ParseInt<std::int64_t>(c[12]), ParseInt<std::int64_t>(c[13]),
                ParseInt<std::int64_t>(c[14])};
  r.comm.rounds = ParseInt<std::int64_t>(c[15]);
  r.comm.uplink_values = ParseInt<std::int64_t>(c[16]);
  r.comm.per_round_payload = ParseInt<std::int64_t>(c[17]);
  r.gradient_barriers = ParseInt<std::int64_t>(c[18]);
  r.partially_non_private = c[19] == "1";
  r.wall_seconds = ParseDouble(c[20]);
  row.error = c[21];
  return row;
}

using CellKey = std::tuple<std::string, std::string, std::string, std::uint64_t,
                           std::uint64_t>;

CellKey KeyOf(const GridRow& r) {
  return {r.dataset, r.config, FormatDouble(r.epsilon), r.split_seed, r.repeat_seed};
}

// Drops an unterminated trailing line left by an interrupted writer.
void TruncatePartialLine(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  in.close();
  if (content.empty() || content.back() == '\n') return;
  const auto last = content.rfind('\n');
  std::filesystem::resize_file(path, last == std::string::npos ? 0 : last + 1);
}

}  // namespace

std::vector<GridRow> ReadGridCsv(const std::string& path) {
  std::ifstream in(path);
  Require(in.good(), ErrorCode::kIo, "cannot open '" + path + "'");
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  std::vector<GridRow> rows;
  std::size_t pos = 0;
  bool header = true;
  while (pos < content.size()) {
    const auto end = content.find('\n', pos);
    if (end == std::string::npos) break;  // partial line
    const std::string line = content.substr(pos, end - pos);
    pos = end + 1;
    if (header) {
      Require(line == HeaderLine(), ErrorCode::kParse,
              path + ": header does not match the results format");
      header = false;
      continue;
    }
    if (!line.empty()) rows.push_back(ParseRow(SplitCsvLine(line)));
  }
  return rows;
}

std::vector<GridRow> RunGrid(const GridSpec& spec, const std::string& out_csv) {
  Require(spec.jobs >= 1, ErrorCode::kInvalidParameter, "jobs must be >= 1");
  const Dataset data = MaterializeDataset(spec.dataset);

  std::vector<TrainConfig> configs;
  for (const auto& c : spec.configs) configs.push_back(ResolveGridConfig(c));

  struct Cell {
    std::size_t config;
    double epsilon;
    std::uint64_t split_seed;
    std::uint64_t repeat_seed;
  };
  std::vector<Cell> cells;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    for (double eps : spec.epsilons) {
      for (auto ss : spec.split_seeds) {
        for (auto rs : spec.repeat_seeds) cells.push_back({c, eps, ss, rs});
      }
    }
  }

  std::set<CellKey> done;
  const bool exists = std::filesystem::exists(out_csv) &&
                      std::filesystem::file_size(out_csv) > 0;
  if (exists) {
    TruncatePartialLine(out_csv);
    if (std::filesystem::file_size(out_csv) > 0) {
      for (const auto& r : ReadGridCsv(out_csv)) done.insert(KeyOf(r));
    }
  }
  const bool need_header =
      !std::filesystem::exists(out_csv) || std::filesystem::file_size(out_csv) == 0;
  std::ofstream out(out_csv, std::ios::app);
  Require(out.good(), ErrorCode::kIo, "cannot write '" + out_csv + "'");
  if (need_header) out << HeaderLine() << '\n' << std::flush;

  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    GridRow probe;
    probe.dataset = spec.dataset.name;
    probe.config = spec.configs[cells[i].config].name;
    probe.epsilon = cells[i].epsilon;
    probe.split_seed = cells[i].split_seed;
    probe.repeat_seed = cells[i].repeat_seed;
    if (!done.contains(KeyOf(probe))) todo.push_back(i);
  }

  auto run_cell = [&](const Cell& cell) {
    GridRow row;
    row.dataset = spec.dataset.name;
    row.config = spec.configs[cell.config].name;
    row.epsilon = cell.epsilon;
    row.split_seed = cell.split_seed;
    row.repeat_seed = cell.repeat_seed;
    try {
      TrainConfig cfg = configs[cell.config];
      cfg.epsilon = cell.epsilon;
      cfg.seed = MixSeed(cell.split_seed, cell.repeat_seed);
      const SplitPair split =
          TrainTestSplit(data, spec.train_fraction, cell.split_seed);
      row.result = RunExperiment(cfg, split);
      row.status = "ok";
    } catch (const Error& e) {
      row.status = "error";
      row.error = std::string(ErrorCodeName(e.code())) + ": " + e.what();
    } catch (const std::exception& e) {
      row.status = "error";
      row.error = e.what();
    }
    return row;
  };

  // Workers fill slots; this thread writes them strictly in cell order.
  std::vector<std::optional<GridRow>> results(todo.size());
  std::mutex mu;
  std::condition_variable cv;
  std::size_t next = 0;
  auto worker = [&] {
    while (true) {
      std::size_t i;
      {
        std::lock_guard lock(mu);
        if (next >= todo.size()) return;
        i = next++;
      }
      GridRow row = run_cell(cells[todo[i]]);
      {
        std::lock_guard lock(mu);
        results[i] = std::move(row);
      }
      cv.notify_all();
    }
  };
  std::vector<std::thread> pool;
  const int threads = std::min<int>(spec.jobs, static_cast<int>(todo.size()));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (std::size_t i = 0; i < todo.size(); ++i) {
    std::unique_lock lock(mu);
    cv.wait(lock, [&] { return results[i].has_value(); });
    const GridRow row = *results[i];
    lock.unlock();
    out << RowLine(row) << '\n' << std::flush;
  }
  for (auto& t : pool) t.join();
  out.close();

  std::vector<GridRow> all = ReadGridCsv(out_csv);
  const auto summary = Summarize(all);
  {
    std::ofstream s(out_csv + ".summary.csv");
    Require(s.good(), ErrorCode::kIo, "cannot write summary");
    s << "dataset,config,epsilon,runs,errors,mean_auc,std_auc\n";
    for (const auto& r : summary) {
      s << r.dataset << ',' << r.config << ',' << FormatDouble(r.epsilon) << ','
        << r.runs << ',' << r.errors << ',' << FormatDouble(r.mean_auc) << ','
        << FormatDouble(r.std_auc) << '\n';
    }
  }
  {
    json sidecar = json::object();
    for (std::size_t c = 0; c < configs.size(); ++c) {
      json fields = json::object();
      for (const auto& [k, v] : ConfigToKeyValues(configs[c])) fields[k] = v;
      sidecar[spec.configs[c].name] = {{"preset", spec.configs[c].preset},
                                       {"config", fields}};
    }
    std::ofstream s(out_csv + ".configs.json");
    Require(s.good(), ErrorCode::kIo, "cannot write config sidecar");
    s << sidecar.dump(2) << '\n';
  }
  return all;
}

std::vector<SummaryRow> Summarize(std::span<const GridRow> rows) {
  std::vector<SummaryRow> out;
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> index;
  std::vector<std::vector<double>> aucs;
  for (const auto& r : rows) {
    const auto key = std::make_tuple(r.dataset, r.config, FormatDouble(r.epsilon));
    auto [it, inserted] = index.emplace(key, out.size());
    if (inserted) {
      SummaryRow s;
      s.dataset = r.dataset;
      s.config = r.config;
      s.epsilon = r.epsilon;
      out.push_back(s);
      aucs.emplace_back();
    }
    if (r.status == "ok") {
      aucs[it->second].push_back(r.result.test_auc);
    } else {
      ++out[it->second].errors;
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& a = aucs[i];
    out[i].runs = static_cast<int>(a.size());
    if (a.empty()) continue;
    const double mean = std::accumulate(a.begin(), a.end(), 0.0) / a.size();
    double var = 0.0;
    for (double x : a) var += (x - mean) * (x - mean);
    out[i].mean_auc = mean;
    out[i].std_auc = a.size() > 1 ? std::sqrt(var / (a.size() - 1)) : 0.0;
  }
  return out;
}

std::vector<RankRow> RankTable(std::span<const SummaryRow> summary) {
  // epsilon -> dataset -> method -> mean AUC
  std::map<double, std::map<std::string, std::map<std::string, double>>> cells;
  std::map<double, std::set<std::string>> methods;
  for (const auto& s : summary) {
    methods[s.epsilon].insert(s.config);
    auto& datasets = cells[s.epsilon];
    auto& row = datasets[s.dataset];
    if (s.runs > 0) row[s.config] = s.mean_auc;
  }
  std::string missing;
  for (const auto& [eps, datasets] : cells) {
    for (const auto& [dataset, row] : datasets) {
      for (const auto& m : methods[eps]) {
        if (!row.contains(m)) {
          missing += (missing.empty() ? "" : "; ") + dataset + " / eps=" +
                     FormatDouble(eps) + " / " + m;
        }
      }
    }
  }
  Require(missing.empty(), ErrorCode::kMissingCells, "missing results: " + missing);

  std::vector<RankRow> out;
  for (const auto& [eps, datasets] : cells) {
    std::map<std::string, double> total;
    for (const auto& [dataset, row] : datasets) {
      std::vector<std::pair<std::string, double>> v(row.begin(), row.end());
      std::stable_sort(v.begin(), v.end(),
                       [](const auto& a, const auto& b) { return a.second > b.second; });
      std::size_t i = 0;
      while (i < v.size()) {
        std::size_t j = i;
        while (j < v.size() && v[j].second == v[i].second) ++j;
        const double rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) total[v[k].first] += rank;
        i = j;
      }
    }
    std::vector<RankRow> rows;
    for (const auto& [m, sum] : total) {
      rows.push_back({eps, m, sum / static_cast<double>(datasets.size())});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const RankRow& a, const RankRow& b) {
      return a.average_rank < b.average_rank;
    });
    out.insert(out.end(), rows.begin(), rows.end());
  }
  return out;
}

}  // namespace fedgbdt
