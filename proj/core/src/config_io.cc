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

#include "fedgbdt/config_io.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "fedgbdt/error.h"

namespace fedgbdt {

namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void BadValue(std::string_view key, std::string_view value,
                           std::string_view want) {
  Fail(ErrorCode::kParse, "bad value '" + std::string(value) + "' for '" +
                              std::string(key) + "': expected " +
                              std::string(want));
}

template <typename T>
T ParseNumber(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    BadValue(key, value, "a number");
  }
  return out;
}

bool ParseBool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  BadValue(key, value, "true or false");
}

std::string FormatDouble(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

struct Field {
  std::string name;
  std::function<void(TrainConfig&, std::string_view)> set;
  std::function<std::string(const TrainConfig&)> get;
};

#define FEDGBDT_INT_FIELD(member)                                              \
  Field {                                                                      \
    #member,                                                                   \
        [](TrainConfig& c, std::string_view v) {                               \
          c.member = ParseNumber<decltype(c.member)>(#member, v);              \
        },                                                                     \
        [](const TrainConfig& c) { return std::to_string(c.member); }          \
  }
#define FEDGBDT_REAL_FIELD(member)                                             \
  Field {                                                                      \
    #member,                                                                   \
        [](TrainConfig& c, std::string_view v) {                               \
          c.member = ParseNumber<double>(#member, v);                          \
        },                                                                     \
        [](const TrainConfig& c) { return FormatDouble(c.member); }            \
  }
#define FEDGBDT_ENUM_FIELD(member, parse)                                      \
  Field {                                                                      \
    #member, [](TrainConfig& c, std::string_view v) { c.member = parse(v); },  \
        [](const TrainConfig& c) { return std::string(ToString(c.member)); }   \
  }

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      FEDGBDT_INT_FIELD(num_trees),
      FEDGBDT_INT_FIELD(max_depth),
      FEDGBDT_INT_FIELD(num_candidates),
      FEDGBDT_ENUM_FIELD(split_method, ParseSplitMethod),
      FEDGBDT_ENUM_FIELD(update_mode, ParseUpdateMode),
      FEDGBDT_ENUM_FIELD(candidate_method, ParseCandidateMethod),
      FEDGBDT_INT_FIELD(ih_rounds),
      FEDGBDT_ENUM_FIELD(feature_mode, ParseFeatureMode),
      FEDGBDT_INT_FIELD(feature_subset),
      FEDGBDT_INT_FIELD(batch_size),
      FEDGBDT_REAL_FIELD(batch_fraction),
      FEDGBDT_REAL_FIELD(eta),
      FEDGBDT_REAL_FIELD(beta),
      FEDGBDT_REAL_FIELD(lambda),
      FEDGBDT_REAL_FIELD(gamma),
      Field{"private",
            [](TrainConfig& c, std::string_view v) {
              c.private_training = ParseBool("private", v);
            },
            [](const TrainConfig& c) {
              return std::string(c.private_training ? "true" : "false");
            }},
      FEDGBDT_REAL_FIELD(epsilon),
      FEDGBDT_REAL_FIELD(delta),
      FEDGBDT_ENUM_FIELD(privacy_model, ParsePrivacyModel),
      Field{"batch_centering",
            [](TrainConfig& c, std::string_view v) {
              c.batch_centering = ParseBool("batch_centering", v);
            },
            [](const TrainConfig& c) {
              return std::string(c.batch_centering ? "true" : "false");
            }},
      FEDGBDT_INT_FIELD(fixed_point_bits),
      FEDGBDT_ENUM_FIELD(partition, ParsePartitionPolicy),
      FEDGBDT_INT_FIELD(num_clients),
      FEDGBDT_INT_FIELD(seed),
  };
  return fields;
}

#undef FEDGBDT_INT_FIELD
#undef FEDGBDT_REAL_FIELD
#undef FEDGBDT_ENUM_FIELD

const Field& Find(std::string_view key) {
  for (const auto& f : Fields()) {
    if (f.name == key) return f;
  }
  Fail(ErrorCode::kUnknownName, "unknown config key '" + std::string(key) + "'");
}

}  // namespace

const std::vector<std::string>& ConfigKeys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& f : Fields()) out.push_back(f.name);
    return out;
  }();
  return keys;
}

void SetConfigValue(TrainConfig& config, std::string_view key,
                    std::string_view value) {
  Find(key).set(config, Trim(value));
}

std::string GetConfigValue(const TrainConfig& config, std::string_view key) {
  return Find(key).get(config);
}

KeyValues ParseKeyValues(std::string_view text, std::string_view origin) {
  KeyValues out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      Fail(ErrorCode::kParse, std::string(origin) + ":" + std::to_string(line_no) +
                                  ": expected 'key = value'");
    }
    const auto key = Trim(line.substr(0, eq));
    const auto value = Trim(line.substr(eq + 1));
    if (key.empty()) {
      Fail(ErrorCode::kParse,
           std::string(origin) + ":" + std::to_string(line_no) + ": empty key");
    }
    out.emplace_back(std::string(key), std::string(value));
  }
  return out;
}

KeyValues ReadKeyValueFile(const std::string& path) {
  std::ifstream in(path);
  Require(in.good(), ErrorCode::kIo, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseKeyValues(buf.str(), path);
}

void ApplyKeyValues(TrainConfig& config, const KeyValues& values) {
  for (const auto& [k, v] : values) SetConfigValue(config, k, v);
}

KeyValues ConfigToKeyValues(const TrainConfig& config) {
  KeyValues out;
  for (const auto& f : Fields()) out.emplace_back(f.name, f.get(config));
  return out;
}

std::string ConfigToText(const TrainConfig& config) {
  std::string out;
  for (const auto& [k, v] : ConfigToKeyValues(config)) out += k + " = " + v + "\n";
  return out;
}

}  // namespace fedgbdt
