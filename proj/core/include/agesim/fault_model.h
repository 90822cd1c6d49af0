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

#ifndef AGESIM_FAULT_MODEL_H_
#define AGESIM_FAULT_MODEL_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agesim/cloud.h"
#include "agesim/rng.h"

namespace agesim {

// How an injected error relates to leftover entities.
enum class AgeingRule {
  // Never leaves anything behind (e.g. a failed rebuild).
  kNonAgeing,
  // The failing step's own entity is created in ERROR state and stays.
  kLeavesStepEntity,
  // Connection-class errors: harmless before the workload has created
  // anything, otherwise the most recent live entity can no longer be
  // cleaned up.
  kContextDependent,
};

struct ErrorSpec {
  std::string name;
  AgeingRule rule = AgeingRule::kNonAgeing;
  // Required for kLeavesStepEntity; must match the step's created kind.
  std::optional<EntityKind> leftover_kind;
  // Marks errors that signal overload rather than ageing.
  bool overload_indicator = false;
};

// Errors the engine raises itself rather than sampling.
inline constexpr std::string_view kQuotaExceededPrefix = "QuotaExceeded:";
inline constexpr std::string_view kNoValidHostError = "NoValidHost";
inline constexpr std::string_view kCloudFailedError = "CloudFailed";

std::string QuotaExceededName(EntityKind kind);
// True for the security-group quota error, which reports overload only.
bool IsOverloadError(std::string_view error_name);

// The injectable catalog: ServerErrorStatus, VolumeErrorStatus,
// NodeUnreachable, RebuildServerError, ExternalNetworkUnreachable.
std::vector<ErrorSpec> DefaultErrorCatalog();

// What the workload knows about itself when a step is attempted.
struct FaultContext {
  std::optional<EntityKind> step_kind;  // kind the step creates or deletes
  bool is_delete = false;
  // Most recently created entity of this workload that is still live,
  // including the one a delete step is about to remove.
  std::optional<EntityKind> nearest_live_kind;
};

struct InjectedFault {
  std::string name;
  bool ageing = false;
  std::optional<EntityKind> leftover_kind;
  // The leftover is the entity the failing step itself created or was
  // deleting, rather than an earlier one.
  bool own_entity = false;
  bool overload = false;

  friend bool operator==(const InjectedFault&, const InjectedFault&) = default;
};

// Per-step error probabilities over a fixed catalog, sampled from a seeded
// stream with one draw per step attempt that has any configured error.
class FaultModel {
 public:
  explicit FaultModel(uint64_t seed,
                      std::vector<ErrorSpec> catalog = DefaultErrorCatalog());

  // Throws ConfigError for unknown errors or probabilities outside [0,1],
  // or when a step's probabilities sum past 1.
  void SetProbability(const std::string& step, const std::string& error,
                      double probability);
  double Probability(const std::string& step, const std::string& error) const;

  // Registers the step names sampling may be asked about. Throws
  // ConfigError if a configured probability names an unknown step.
  void BindSteps(std::span<const std::string> step_names);

  // At most one error per attempt. Throws ConfigError for unbound steps.
  std::optional<InjectedFault> Sample(const std::string& step,
                                      const FaultContext& context);

  // Probability that a (re)deployment comes up broken. Default 0.
  void set_deploy_failure_probability(double p);
  double deploy_failure_probability() const { return deploy_failure_p_; }
  bool SampleDeployFailure();

  const std::vector<ErrorSpec>& catalog() const { return catalog_; }
  const ErrorSpec* FindError(std::string_view name) const;
  const std::map<std::string, std::map<std::string, double>>& probabilities()
      const {
    return probabilities_;
  }
  uint64_t draws() const { return faults_.draws(); }

 private:
  std::vector<ErrorSpec> catalog_;
  // step -> error -> probability; ordered maps keep sampling order stable.
  std::map<std::string, std::map<std::string, double>> probabilities_;
  std::set<std::string, std::less<>> known_steps_;
  RandomStream faults_;
  RandomStream deploy_;
  double deploy_failure_p_ = 0.0;
};

}  // namespace agesim

#endif  // AGESIM_FAULT_MODEL_H_
