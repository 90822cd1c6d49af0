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

#ifndef AGESIM_CONFIG_H_
#define AGESIM_CONFIG_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "agesim/scenario.h"
#include "agesim/workload.h"

namespace agesim {

// JSON scenario documents. Every key is optional; absent keys keep the
// defaults of DefaultConfig(topology, concurrency). Unknown keys, wrong
// types and invalid values throw ConfigError.
//
//   {
//     "scenario_id": 3, "topology": "multi-node", "concurrency": 4,
//     "stress_hours": 24, "post_rejuvenation_hours": 1, "seed": 7,
//     "policy": "wait", "phases": "stress:24,rejuvenation,post:1",
//     "faults": {"probabilities": {"boot server": {"ServerErrorStatus": 0.01}},
//                "deploy_failure_probability": 0},
//     "resources": {"leak_per_workload_gb": 0.0005, ...},
//     "service": {"ageing_rate": 2e-5, "contention": "linear-sharing", ...},
//     "nodes": [{"name": "aio", "role": "all-in-one", ...}],
//     "quotas": {"Server": 10, "Network": null},
//     "workload": {"steps": [{"name": "create user", "module": "keystone",
//                             "action": "create", "kind": "User",
//                             "undo": "delete user"}, ...]}
//   }
ScenarioConfig ParseScenarioConfig(std::string_view json_text);

// Throws IoError when the file cannot be read.
ScenarioConfig LoadScenarioConfig(const std::filesystem::path& path);

// A complete document that parses back to an equivalent config.
std::string ScenarioConfigToJson(const ScenarioConfig& config);

// {"steps": [...]} as in the "workload" key above.
WorkloadDefinition ParseWorkloadDefinition(std::string_view json_text);

}  // namespace agesim

#endif  // AGESIM_CONFIG_H_
