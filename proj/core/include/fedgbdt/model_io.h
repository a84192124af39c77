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

// Model export and import. The JSON layout is documented in README.md.

#ifndef FEDGBDT_MODEL_IO_H_
#define FEDGBDT_MODEL_IO_H_

#include <string>

#include "fedgbdt/boosting.h"

namespace fedgbdt {

std::string EnsembleToJson(const Ensemble& ensemble, int indent = -1);
Ensemble EnsembleFromJson(const std::string& text);

void SaveEnsemble(const Ensemble& ensemble, const std::string& path);
Ensemble LoadEnsemble(const std::string& path);

}  // namespace fedgbdt

#endif  // FEDGBDT_MODEL_IO_H_
