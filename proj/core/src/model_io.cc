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

#include "fedgbdt/model_io.h"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fedgbdt/config.h"
#include "fedgbdt/error.h"

namespace fedgbdt {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "fedgbdt-model";
constexpr int kVersion = 1;

const char* KindName(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::kBoosted: return "boosted";
    case EnsembleKind::kBatched: return "batched";
    case EnsembleKind::kAveraged: return "averaged";
  }
  return "";
}

EnsembleKind ParseKind(const std::string& s) {
  if (s == "boosted") return EnsembleKind::kBoosted;
  if (s == "batched") return EnsembleKind::kBatched;
  if (s == "averaged") return EnsembleKind::kAveraged;
  Fail(ErrorCode::kParse, "unknown ensemble kind '" + s + "'");
}

}  // namespace

std::string EnsembleToJson(const Ensemble& e, int indent) {
  json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["kind"] = KindName(e.kind);
  j["update_mode"] = std::string(ToString(e.update_mode));
  j["eta"] = e.eta;
  j["centered"] = e.centered;
  j["num_features"] = e.num_features;
  j["batch_boundaries"] = e.batch_boundaries;
  json bounds = json::array();
  for (const auto& b : e.bounds) bounds.push_back({b.lo, b.hi});
  j["bounds"] = bounds;
  json trees = json::array();
  for (const Tree& t : e.trees) {
    json nodes = json::array();
    for (const TreeNode& n : t.nodes()) {
      if (n.is_leaf) {
        nodes.push_back({{"kind", "leaf"}, {"weight", n.weight}});
      } else {
        nodes.push_back({{"kind", "internal"},
                         {"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right}});
      }
    }
    trees.push_back({{"max_depth", t.max_depth()},
                     {"features", t.features()},
                     {"nodes", nodes}});
  }
  j["trees"] = trees;
  return j.dump(indent);
}

Ensemble EnsembleFromJson(const std::string& text) {
  try {
    const json j = json::parse(text);
    Require(j.value("format", "") == kFormat, ErrorCode::kParse,
            "not a fedgbdt model");
    Require(j.at("version").get<int>() == kVersion, ErrorCode::kParse,
            "unsupported model version");
    Ensemble e;
    e.kind = ParseKind(j.at("kind").get<std::string>());
    e.update_mode = ParseUpdateMode(j.at("update_mode").get<std::string>());
    e.eta = j.at("eta").get<double>();
    e.centered = j.at("centered").get<bool>();
    e.num_features = j.at("num_features").get<std::size_t>();
    e.batch_boundaries = j.at("batch_boundaries").get<std::vector<std::size_t>>();
    for (const auto& b : j.at("bounds")) {
      e.bounds.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
    }
    Require(e.bounds.size() == e.num_features, ErrorCode::kParse,
            "bounds do not match num_features");
    for (const auto& t : j.at("trees")) {
      std::vector<TreeNode> nodes;
      for (const auto& n : t.at("nodes")) {
        TreeNode node;
        const std::string kind = n.at("kind").get<std::string>();
        if (kind == "leaf") {
          node.weight = n.at("weight").get<double>();
        } else if (kind == "internal") {
          node.is_leaf = false;
          node.feature = n.at("feature").get<int>();
          node.threshold = n.at("threshold").get<double>();
          node.left = n.at("left").get<int>();
          node.right = n.at("right").get<int>();
          Require(node.feature >= 0 &&
                      static_cast<std::size_t>(node.feature) < e.num_features,
                  ErrorCode::kParse, "split feature out of range");
        } else {
          Fail(ErrorCode::kParse, "unknown node kind '" + kind + "'");
        }
        nodes.push_back(node);
      }
      e.trees.push_back(Tree::FromNodes(t.at("max_depth").get<int>(),
                                        t.at("features").get<std::vector<std::size_t>>(),
                                        std::move(nodes)));
    }
    for (std::size_t i = 0; i < e.batch_boundaries.size(); ++i) {
      Require(e.batch_boundaries[i] < e.trees.size() &&
                  (i == 0 || e.batch_boundaries[i] > e.batch_boundaries[i - 1]),
              ErrorCode::kParse, "bad batch boundaries");
    }
    return e;
  } catch (const json::exception& ex) {
    Fail(ErrorCode::kParse, std::string("model JSON: ") + ex.what());
  }
}

void SaveEnsemble(const Ensemble& ensemble, const std::string& path) {
  std::ofstream out(path);
  Require(out.good(), ErrorCode::kIo, "cannot write '" + path + "'");
  out << EnsembleToJson(ensemble, 1) << '\n';
  Require(out.good(), ErrorCode::kIo, "write to '" + path + "' failed");
}

Ensemble LoadEnsemble(const std::string& path) {
  std::ifstream in(path);
  Require(in.good(), ErrorCode::kIo, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return EnsembleFromJson(buf.str());
}

}  // namespace fedgbdt
