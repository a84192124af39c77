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

#include "fedgbdt/federation.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "fedgbdt/error.h"

namespace fedgbdt {

namespace {

constexpr std::uint64_t kNoiseStream = 0x401;
constexpr std::uint64_t kLocalStream = 0x402;
constexpr std::uint64_t kPartitionStream = 0x403;
constexpr std::uint64_t kRingHalf = std::uint64_t{1} << 63;

// Ring accumulator that also tracks the sum of magnitudes per coordinate, so
// a decode can never be silently wrong.
class RingSum {
 public:
  explicit RingSum(std::size_t length) : sum_(length, 0), magnitude_(length, 0) {}

  void Add(std::size_t index, std::int64_t encoded) {
    sum_[index] += static_cast<std::uint64_t>(encoded);
    magnitude_[index] += encoded < 0 ? static_cast<std::uint64_t>(-encoded)
                                     : static_cast<std::uint64_t>(encoded);
    if (magnitude_[index] >= kRingHalf) {
      Fail(ErrorCode::kCodecOverflow,
           "fixed-point sum could wrap the 64-bit ring; lower fixed_point_bits");
    }
  }

  std::vector<double> Decode(const FixedPointCodec& codec) const {
    std::vector<double> out(sum_.size());
    for (std::size_t i = 0; i < sum_.size(); ++i) out[i] = codec.Decode(sum_[i]);
    return out;
  }

 private:
  std::vector<std::uint64_t> sum_;
  std::vector<std::uint64_t> magnitude_;
};

const Tree* TreeOf(const Query& q) {
  return std::visit([](const auto& v) { return v.tree; }, q);
}

int SlotOf(const Query& q) {
  return std::visit([](const auto& v) { return v.tree_slot; }, q);
}

const std::vector<int>& NodesOf(const Query& q) {
  return std::visit([](const auto& v) -> const std::vector<int>& { return v.nodes; }, q);
}

}  // namespace

std::vector<std::size_t> ClientPopulation::sizes() const {
  std::vector<std::size_t> out;
  for (const auto& m : members) out.push_back(m.size());
  return out;
}

ClientPopulation Partition(std::shared_ptr<const Dataset> data,
                           std::size_t num_clients, PartitionPolicy policy,
                           std::uint64_t seed) {
  Require(data != nullptr, ErrorCode::kInvalidParameter, "no dataset");
  const std::size_t n = data->num_rows();
  Require(n >= 1, ErrorCode::kInvalidParameter, "cannot partition an empty dataset");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed, kPartitionStream);
  Shuffle(perm, rng);

  ClientPopulation pop;
  pop.data = std::move(data);
  if (policy == PartitionPolicy::kOneRecordPerClient) {
    for (std::size_t r : perm) pop.members.push_back({r});
    return pop;
  }
  Require(num_clients >= 1 && num_clients <= n, ErrorCode::kInvalidParameter,
          "cannot split " + std::to_string(n) + " rows into " +
              std::to_string(num_clients) + " non-empty shards");
  const std::size_t base = n / num_clients;
  const std::size_t extra = n % num_clients;
  std::size_t pos = 0;
  for (std::size_t c = 0; c < num_clients; ++c) {
    const std::size_t size = base + (c < extra ? 1 : 0);
    pop.members.emplace_back(perm.begin() + pos, perm.begin() + pos + size);
    pos += size;
  }
  return pop;
}

FixedPointCodec::FixedPointCodec(int fractional_bits)
    : bits_(fractional_bits), scale_(std::ldexp(1.0, fractional_bits)) {
  Require(fractional_bits >= 1 && fractional_bits <= 48,
          ErrorCode::kInvalidParameter, "fixed-point precision must be 1..48 bits");
}

std::int64_t FixedPointCodec::Encode(double v) const {
  const double scaled = std::nearbyint(v * scale_);
  if (!std::isfinite(scaled) || std::fabs(scaled) >= 0x1p62) {
    Fail(ErrorCode::kCodecOverflow,
         "value " + std::to_string(v) + " does not fit the fixed-point codec");
  }
  return static_cast<std::int64_t>(scaled);
}

double FixedPointCodec::Decode(std::uint64_t ring_value) const {
  return static_cast<double>(static_cast<std::int64_t>(ring_value)) / scale_;
}

std::vector<double> SecureSum(std::span<const std::vector<double>> contributions,
                              std::size_t length, const FixedPointCodec& codec,
                              NoiseScale noise, Rng& rng) {
  RingSum ring(length);
  for (const auto& v : contributions) {
    Require(v.size() == length, ErrorCode::kShapeMismatch,
            "client vector of length " + std::to_string(v.size()) +
                ", expected " + std::to_string(length));
    for (std::size_t i = 0; i < length; ++i) ring.Add(i, codec.Encode(v[i]));
  }
  std::vector<double> out = ring.Decode(codec);
  if (noise.active()) {
    for (double& x : out) x += noise.stddev() * rng.Normal();
  }
  return out;
}

GradientPair LdpRelease(GradientPair pair, NoiseScale noise, Rng& rng) {
  if (!noise.active()) return pair;
  const double s = noise.stddev();
  const double g = pair.g + s * rng.Normal();
  const double h = pair.h + s * rng.Normal();
  return {g, h};
}

std::size_t QueryLength(const Query& query) {
  struct Visitor {
    std::size_t operator()(const HistogramQuery& q) const {
      const std::size_t nodes = q.tree ? q.nodes.size() : 1;
      return nodes * (q.thresholds.size() + 1) * (q.hessian_only ? 1 : 2);
    }
    std::size_t operator()(const SplitQuery& q) const { return 4 * q.nodes.size(); }
    std::size_t operator()(const LeafQuery& q) const { return 2 * q.nodes.size(); }
  };
  return std::visit(Visitor{}, query);
}

CommLedger CommAccounting(const TrainConfig& config, std::size_t num_features) {
  CommLedger c;
  const int t_total = config.num_trees;
  const int b = config.EffectiveBatchSize();
  const auto k = static_cast<std::int64_t>(config.FeatureSubsetSize(num_features));
  const std::int64_t bins = config.num_candidates + 1;
  const int d = config.max_depth;
  auto add_round = [&](std::int64_t payload) {
    ++c.rounds;
    c.uplink_values += payload;
    c.per_round_payload = std::max(c.per_round_payload, payload);
  };
  const bool ih_rounds = config.IhUsesOwnRounds(num_features);
  const int s = config.EffectiveIhRounds();
  const auto ih_features =
      static_cast<std::int64_t>(config.IhFeaturesPerRound(num_features));
  for (int start = 0; start < t_total; start += b) {
    const std::int64_t trees = std::min(b, t_total - start);
    if (ih_rounds) {
      for (int t = start; t < start + trees && t < s; ++t) add_round(bins * ih_features);
    }
    switch (config.split_method) {
      case SplitMethod::kTotallyRandom:
        add_round(trees * 2 * (std::int64_t{1} << d));
        break;
      case SplitMethod::kHist:
      case SplitMethod::kPartiallyRandom:
        if (k == 1) {
          add_round(trees * 2 * bins);
          break;
        }
        for (int level = 0; level < d; ++level) {
          const std::int64_t per_node =
              config.split_method == SplitMethod::kHist ? 2 * bins : 4;
          add_round(trees * k * per_node * (std::int64_t{1} << level));
        }
        break;
    }
  }
  return c;
}

Federation::Federation(ClientPopulation population, FederationOptions options)
    : population_(std::move(population)),
      options_(options),
      codec_(options.fixed_point_bits),
      noise_rng_(options.seed, kNoiseStream),
      local_rng_(options.seed, kLocalStream) {
  Require(population_.data != nullptr, ErrorCode::kInvalidParameter,
          "federation without data");
  std::vector<char> seen(population_.data->num_rows(), 0);
  for (const auto& client : population_.members) {
    for (std::size_t r : client) {
      Require(r < seen.size() && !seen[r], ErrorCode::kInvalidParameter,
              "client partition is not disjoint");
      seen[r] = 1;
    }
  }
  Require(std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; }),
          ErrorCode::kInvalidParameter, "client partition does not cover the data");
  raw_.assign(population_.data->num_rows(), 0.0);
  grads_.assign(raw_.size(), {});
}

void Federation::EnablePrivacy(double sigma) {
  Require(sigma >= 0.0 && std::isfinite(sigma), ErrorCode::kInvalidParameter,
          "noise multiplier must be >= 0");
  private_ = true;
  sigma_ = sigma;
}

void Federation::DisablePrivacy() {
  private_ = false;
  sigma_ = 0.0;
}

void Federation::BeginBatch(UpdateMode mode, int num_trees) {
  Require(num_trees >= 1, ErrorCode::kInvalidParameter, "empty batch");
  mode_ = mode;
  ++stats_.gradient_barriers;
  const Dataset& data = *population_.data;
  for (std::size_t i = 0; i < raw_.size(); ++i) {
    grads_[i] = ModeGradients(data.labels[i], raw_[i], mode);
  }
  local_.clear();
  if (options_.privacy_model != PrivacyModel::kLocal) return;
  const NoiseScale noise{private_ ? sigma_ : 0.0, QuerySensitivity(mode)};
  local_.resize(num_trees);
  for (int t = 0; t < num_trees; ++t) {
    // Each client noises its own rows; one release per tree.
    local_[t].resize(raw_.size());
    for (const auto& client : population_.members) {
      for (std::size_t r : client) local_[t][r] = LdpRelease(grads_[r], noise, local_rng_);
    }
    if (private_) {
      ++stats_.ledger.kappa_w;
      if (noise.active()) stats_.noise_draws += 2 * static_cast<std::int64_t>(raw_.size());
    }
  }
}

GradientPair Federation::Contribution(std::size_t row, int slot) const {
  if (options_.privacy_model == PrivacyModel::kLocal) {
    Require(slot >= 0 && slot < static_cast<int>(local_.size()),
            ErrorCode::kInvalidParameter, "no local release for this tree slot");
    return local_[slot][row];
  }
  return grads_[row];
}

std::vector<double> Federation::Answer(const Query& query) {
  const std::size_t length = QueryLength(query);
  const Tree* tree = TreeOf(query);
  const int slot = SlotOf(query);
  std::vector<int> pos;
  if (tree != nullptr) {
    pos.assign(tree->size(), -1);
    const auto& nodes = NodesOf(query);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      Require(nodes[i] >= 0 && nodes[i] < static_cast<int>(tree->size()) &&
                  tree->node(nodes[i]).is_leaf,
              ErrorCode::kInvalidParameter, "query names a node that is not a leaf");
      pos[nodes[i]] = static_cast<int>(i);
    }
  }
  const Dataset& data = *population_.data;
  bool hessian_only = false;
  if (const auto* h = std::get_if<HistogramQuery>(&query)) {
    hessian_only = h->hessian_only;
    Require(h->feature < data.num_features(), ErrorCode::kInvalidParameter,
            "histogram feature out of range");
  }
  if (const auto* s = std::get_if<SplitQuery>(&query)) {
    Require(s->thresholds.size() == s->nodes.size(), ErrorCode::kShapeMismatch,
            "split query needs one threshold per node");
  }

  RingSum ring(length);
  std::vector<std::pair<std::size_t, double>> local;
  for (const auto& client : population_.members) {
    // Client side: route own rows, accumulate locally, encode, send.
    local.clear();
    for (std::size_t r : client) {
      int p = 0;
      auto x = data.row(r);
      if (tree != nullptr) {
        p = pos[tree->Route(x)];
        if (p < 0) continue;
      }
      const GradientPair gh = Contribution(r, slot);
      if (const auto* h = std::get_if<HistogramQuery>(&query)) {
        const std::size_t bins = h->thresholds.size() + 1;
        const std::size_t bin = BinIndex(h->thresholds, x[h->feature]);
        if (hessian_only) {
          local.emplace_back(p * bins + bin, gh.h);
        } else {
          local.emplace_back(2 * (p * bins + bin), gh.g);
          local.emplace_back(2 * (p * bins + bin) + 1, gh.h);
        }
      } else if (const auto* s = std::get_if<SplitQuery>(&query)) {
        const std::size_t side = x[s->feature] <= s->thresholds[p] ? 0 : 2;
        local.emplace_back(4 * p + side, gh.g);
        local.emplace_back(4 * p + side + 1, gh.h);
      } else {
        local.emplace_back(2 * p, gh.g);
        local.emplace_back(2 * p + 1, gh.h);
      }
    }
    if (local.empty()) continue;
    std::sort(local.begin(), local.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::size_t i = 0;
    while (i < local.size()) {
      double v = 0.0;
      const std::size_t idx = local[i].first;
      for (; i < local.size() && local[i].first == idx; ++i) v += local[i].second;
      ring.Add(idx, codec_.Encode(v));
    }
  }
  std::vector<double> out = ring.Decode(codec_);

  ++stats_.queries;
  stats_.released_values += static_cast<std::int64_t>(length);
  if (private_ && options_.privacy_model == PrivacyModel::kCentral) {
    QueryRole role = QueryRole::kSplit;
    if (const auto* h = std::get_if<HistogramQuery>(&query)) role = h->role;
    if (std::holds_alternative<LeafQuery>(query)) role = QueryRole::kWeight;
    switch (role) {
      case QueryRole::kCandidate: ++stats_.ledger.kappa_c; break;
      case QueryRole::kSplit: ++stats_.ledger.kappa_s; break;
      case QueryRole::kWeight: ++stats_.ledger.kappa_w; break;
    }
    const double sensitivity =
        hessian_only ? HessianSensitivity(mode_) : QuerySensitivity(mode_);
    const NoiseScale noise{sigma_, sensitivity};
    if (noise.active()) {
      for (double& v : out) v += noise.stddev() * noise_rng_.Normal();
      stats_.noise_draws += static_cast<std::int64_t>(length);
    }
  }
  return out;
}

std::vector<std::vector<double>> Federation::Round(std::span<const Query> queries) {
  std::vector<std::vector<double>> out;
  out.reserve(queries.size());
  std::int64_t payload = 0;
  for (const auto& q : queries) {
    out.push_back(Answer(q));
    payload += static_cast<std::int64_t>(out.back().size());
  }
  ++stats_.rounds;
  stats_.uplink_values += payload;
  stats_.max_round_payload = std::max(stats_.max_round_payload, payload);
  return out;
}

std::vector<double> Federation::Ask(const Query& query) {
  return std::move(Round(std::span(&query, 1)).front());
}

void Federation::ApplyUpdate(std::span<const Tree> trees, const ScoreUpdate& update) {
  const Dataset& data = *population_.data;
  std::vector<double> weights(trees.size());
  for (std::size_t i = 0; i < raw_.size(); ++i) {
    auto x = data.row(i);
    for (std::size_t t = 0; t < trees.size(); ++t) weights[t] = trees[t].Predict(x);
    raw_[i] = update(raw_[i], weights);
  }
}

SplitCandidateSet Federation::QuantileCandidates(int q) const {
  return fedgbdt::QuantileCandidates(*population_.data, q);
}

}  // namespace fedgbdt
