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

// Simulated horizontal federation.
//
// The server-side trainer never sees client records. It talks to clients in
// rounds: each round carries a list of queries, every client answers all of
// them from its own rows, the answers are summed in a fixed-point ring and the
// decoded sum is released with Gaussian noise (one draw per coordinate). Each
// query is one entry in the privacy ledger.

#ifndef FEDGBDT_FEDERATION_H_
#define FEDGBDT_FEDERATION_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "fedgbdt/accountant.h"
#include "fedgbdt/candidates.h"
#include "fedgbdt/config.h"
#include "fedgbdt/data.h"
#include "fedgbdt/gradient.h"
#include "fedgbdt/rng.h"
#include "fedgbdt/tree.h"

namespace fedgbdt {

// Disjoint cover of the rows of `data` by clients.
struct ClientPopulation {
  std::shared_ptr<const Dataset> data;
  std::vector<std::vector<std::size_t>> members;

  std::size_t num_clients() const { return members.size(); }
  std::vector<std::size_t> sizes() const;
};

// kOneRecordPerClient ignores num_clients (one client per row, shuffled);
// kEqualShards deals shuffled rows into num_clients shards whose sizes differ
// by at most one, larger shards first.
ClientPopulation Partition(std::shared_ptr<const Dataset> data,
                           std::size_t num_clients, PartitionPolicy policy,
                           std::uint64_t seed);

// Reals as signed fixed point with `fractional_bits` bits after the point,
// summed modulo 2^64.
class FixedPointCodec {
 public:
  explicit FixedPointCodec(int fractional_bits = 16);

  int fractional_bits() const { return bits_; }
  double scale() const { return scale_; }
  // Throws kCodecOverflow when |v| * scale does not fit in 62 bits.
  std::int64_t Encode(double v) const;
  double Decode(std::uint64_t ring_value) const;

 private:
  int bits_;
  double scale_;
};

// Sums equal-length client vectors through the codec and adds N(0,
// noise.stddev()^2) to every decoded coordinate when noise is active. Throws
// kCodecOverflow if the sum of magnitudes could wrap the ring.
std::vector<double> SecureSum(std::span<const std::vector<double>> contributions,
                              std::size_t length, const FixedPointCodec& codec,
                              NoiseScale noise, Rng& rng);

// One user's locally noised (g, h).
GradientPair LdpRelease(GradientPair pair, NoiseScale noise, Rng& rng);

// Ledger category of a query.
enum class QueryRole { kCandidate, kSplit, kWeight };

// Per-bin (G, H) sums (or H alone) of the records sitting in each of `nodes`.
// tree == nullptr means "all records, one node".
struct HistogramQuery {
  const Tree* tree = nullptr;
  int tree_slot = 0;
  std::vector<int> nodes;
  std::size_t feature = 0;
  std::vector<double> thresholds;
  bool hessian_only = false;
  QueryRole role = QueryRole::kSplit;
};

// For every node, (G_left, H_left, G_right, H_right) at that node's
// threshold on `feature`.
struct SplitQuery {
  const Tree* tree = nullptr;
  int tree_slot = 0;
  std::vector<int> nodes;
  std::size_t feature = 0;
  std::vector<double> thresholds;  // one per node
};

// (G, H) per listed leaf.
struct LeafQuery {
  const Tree* tree = nullptr;
  int tree_slot = 0;
  std::vector<int> nodes;
};

using Query = std::variant<HistogramQuery, SplitQuery, LeafQuery>;

// Number of released coordinates of a query.
std::size_t QueryLength(const Query& query);

// Live counters. `ledger` only moves under privacy.
struct FederationStats {
  QueryCounter ledger;
  std::int64_t queries = 0;
  std::int64_t rounds = 0;
  std::int64_t uplink_values = 0;
  std::int64_t max_round_payload = 0;
  std::int64_t gradient_barriers = 0;
  std::int64_t noise_draws = 0;
  std::int64_t released_values = 0;
};

struct CommLedger {
  std::int64_t rounds = 0;
  std::int64_t uplink_values = 0;      // scalars one client sends in total
  std::int64_t per_round_payload = 0;  // largest single message, scalars
  int secure_agg_multiplier = 3;       // rounds per secure sum, not simulated

  std::int64_t uplink_bytes() const { return 8 * uplink_values; }
  std::int64_t per_round_bytes() const { return 8 * per_round_payload; }
  friend bool operator==(const CommLedger&, const CommLedger&) = default;
};

// Exact rounds and payloads the trainer will use for `config`.
CommLedger CommAccounting(const TrainConfig& config, std::size_t num_features);

struct FederationOptions {
  int fixed_point_bits = 16;
  PrivacyModel privacy_model = PrivacyModel::kCentral;
  std::uint64_t seed = 0;
};

// new_raw = f(old_raw, weights of the leaves the record reaches).
using ScoreUpdate =
    std::function<double(double raw, std::span<const double> leaf_weights)>;

class Federation {
 public:
  Federation(ClientPopulation population, FederationOptions options = {});

  // Public metadata.
  std::size_t num_records() const { return raw_.size(); }
  std::size_t num_clients() const { return population_.num_clients(); }
  std::size_t num_features() const { return population_.data->num_features(); }
  std::span<const FeatureBounds> bounds() const { return population_.data->bounds; }
  bool bounds_declared() const { return population_.data->bounds_declared; }
  const FixedPointCodec& codec() const { return codec_; }
  PrivacyModel privacy_model() const { return options_.privacy_model; }

  // Enables the ledger and noise with multiplier sigma (0 keeps releases
  // exact but still counts them).
  void EnablePrivacy(double sigma);
  void DisablePrivacy();
  bool private_mode() const { return private_; }
  double sigma() const { return sigma_; }

  // Gradient barrier: every client recomputes (g, h) from its current raw
  // score. Under local privacy each of the `num_trees` upcoming trees gets a
  // fresh locally noised copy (tree_slot 0 .. num_trees - 1).
  void BeginBatch(UpdateMode mode, int num_trees);

  std::vector<std::vector<double>> Round(std::span<const Query> queries);
  std::vector<double> Ask(const Query& query);

  // Broadcast of finished trees; clients update their own raw scores.
  void ApplyUpdate(std::span<const Tree> trees, const ScoreUpdate& update);

  // Exact per-feature quantile candidates from pooled client values. Not
  // private.
  SplitCandidateSet QuantileCandidates(int q) const;

  const FederationStats& stats() const { return stats_; }
  void ResetStats() { stats_ = {}; }

 private:
  GradientPair Contribution(std::size_t row, int slot) const;
  std::vector<double> Answer(const Query& query);

  ClientPopulation population_;
  FederationOptions options_;
  FixedPointCodec codec_;
  bool private_ = false;
  double sigma_ = 0.0;
  UpdateMode mode_ = UpdateMode::kNewton;
  Rng noise_rng_;
  Rng local_rng_;
  std::vector<double> raw_;
  std::vector<GradientPair> grads_;
  std::vector<std::vector<GradientPair>> local_;
  FederationStats stats_;
};

}  // namespace fedgbdt

#endif  // FEDGBDT_FEDERATION_H_
