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

// Key/value text form of TrainConfig:
//
//   # comment
//   split_method = tr
//   num_trees = 300
//
// Keys are the TrainConfig field names (private_training is spelled
// "private"). Later assignments win.

#ifndef FEDGBDT_CONFIG_IO_H_
#define FEDGBDT_CONFIG_IO_H_

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fedgbdt/config.h"

namespace fedgbdt {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Every recognised key, in canonical order.
const std::vector<std::string>& ConfigKeys();

// Throws kUnknownName for an unknown key and kParse for a malformed value.
void SetConfigValue(TrainConfig& config, std::string_view key,
                    std::string_view value);
std::string GetConfigValue(const TrainConfig& config, std::string_view key);

KeyValues ParseKeyValues(std::string_view text, std::string_view origin = "config");
KeyValues ReadKeyValueFile(const std::string& path);

void ApplyKeyValues(TrainConfig& config, const KeyValues& values);
KeyValues ConfigToKeyValues(const TrainConfig& config);
std::string ConfigToText(const TrainConfig& config);

}  // namespace fedgbdt

#endif  // FEDGBDT_CONFIG_IO_H_
