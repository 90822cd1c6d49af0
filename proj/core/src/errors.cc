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

#include "agesim/errors.h"

#include <utility>

#include <fmt/format.h>

namespace agesim {

MissingPhaseBinError::MissingPhaseBinError(std::string bin)
    : Error(fmt::format("missing hourly bin: {}", bin)), bin_(std::move(bin)) {}

ParseError::ParseError(std::size_t line, const std::string& message)
    : Error(line == 0 ? message : fmt::format("line {}: {}", line, message)),
      line_(line) {}

DuplicateTimestampError::DuplicateTimestampError(std::string metric,
                                                 double timestamp)
    : Error(fmt::format("duplicate timestamp {} for metric '{}'", timestamp,
                        metric)),
      metric_(std::move(metric)),
      timestamp_(timestamp) {}

}  // namespace agesim
