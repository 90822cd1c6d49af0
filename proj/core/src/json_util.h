// Copyright 2026 The agesim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AGESIM_SRC_JSON_UTIL_H_
#define AGESIM_SRC_JSON_UTIL_H_

#include <cmath>

#include <nlohmann/json.hpp>

#include "agesim/scenario.h"

namespace agesim::internal {

using Json = nlohmann::ordered_json;

// Reals in machine documents carry at most nine decimals.
inline double Round9(double x) {
  if (!std::isfinite(x)) return x;
  const double r = std::round(x * 1e9) / 1e9;
  return r == 0.0 ? 0.0 : r;
}

Json ConfigToJsonValue(const ScenarioConfig& config);

}  // namespace agesim::internal

#endif  // AGESIM_SRC_JSON_UTIL_H_
