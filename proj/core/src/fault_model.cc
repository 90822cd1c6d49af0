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

#include "agesim/fault_model.h"

#include <utility>

#include <fmt/format.h>

#include "agesim/errors.h"

namespace agesim {

std::string QuotaExceededName(EntityKind kind) {
  return fmt::format("{}{}", kQuotaExceededPrefix, EntityKindName(kind));
}

bool IsOverloadError(std::string_view error_name) {
  return error_name == QuotaExceededName(EntityKind::kSecurityGroup);
}

std::vector<ErrorSpec> DefaultErrorCatalog() {
  return {
      {"ServerErrorStatus", AgeingRule::kLeavesStepEntity, EntityKind::kServer,
       false},
      {"VolumeErrorStatus", AgeingRule::kLeavesStepEntity, EntityKind::kVolume,
       false},
      {"NodeUnreachable", AgeingRule::kContextDependent, std::nullopt, false},
      {"RebuildServerError", AgeingRule::kNonAgeing, std::nullopt, false},
      {"ExternalNetworkUnreachable", AgeingRule::kNonAgeing, std::nullopt,
       false},
  };
}

FaultModel::FaultModel(uint64_t seed, std::vector<ErrorSpec> catalog)
    : catalog_(std::move(catalog)),
      faults_(seed, "faults"),
      deploy_(seed, "deploy") {
  std::set<std::string, std::less<>> names;
  for (const ErrorSpec& spec : catalog_) {
    if (spec.name.empty()) throw ConfigError("error catalog entry without name");
    if (!names.insert(spec.name).second) {
      throw ConfigError(fmt::format("duplicate error name '{}'", spec.name));
    }
    if (spec.rule == AgeingRule::kLeavesStepEntity && !spec.leftover_kind) {
      throw ConfigError(
          fmt::format("error '{}' leaves an entity but names no kind",
                      spec.name));
    }
  }
}

const ErrorSpec* FaultModel::FindError(std::string_view name) const {
  for (const ErrorSpec& spec : catalog_) {
    if (spec.name == name) return &spec;
  }
  return nullptr;
}

void FaultModel::SetProbability(const std::string& step,
                                const std::string& error, double probability) {
  if (FindError(error) == nullptr) {
    throw ConfigError(fmt::format("unknown error '{}'", error));
  }
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw ConfigError(fmt::format("probability {} for {}/{} outside [0,1]",
                                  probability, step, error));
  }
  if (!known_steps_.empty() && !known_steps_.contains(step)) {
    throw ConfigError(fmt::format("unknown step '{}'", step));
  }
  auto& per_step = probabilities_[step];
  per_step[error] = probability;
  double total = 0.0;
  for (const auto& [name, p] : per_step) total += p;
  if (total > 1.0 + 1e-12) {
    throw ConfigError(
        fmt::format("error probabilities for step '{}' sum to {}", step, total));
  }
}

double FaultModel::Probability(const std::string& step,
                               const std::string& error) const {
  auto it = probabilities_.find(step);
  if (it == probabilities_.end()) return 0.0;
  auto jt = it->second.find(error);
  return jt == it->second.end() ? 0.0 : jt->second;
}

void FaultModel::BindSteps(std::span<const std::string> step_names) {
  known_steps_.clear();
  known_steps_.insert(step_names.begin(), step_names.end());
  for (const auto& [step, errors] : probabilities_) {
    if (!known_steps_.contains(step)) {
      throw ConfigError(fmt::format("unknown step '{}'", step));
    }
  }
}

std::optional<InjectedFault> FaultModel::Sample(const std::string& step,
                                                const FaultContext& context) {
  if (!known_steps_.contains(step)) {
    throw ConfigError(fmt::format("unknown step '{}'", step));
  }
  auto it = probabilities_.find(step);
  if (it == probabilities_.end()) return std::nullopt;

  const double u = faults_.Uniform();
  double cumulative = 0.0;
  const ErrorSpec* hit = nullptr;
  for (const auto& [name, p] : it->second) {
    cumulative += p;
    if (u < cumulative) {
      hit = FindError(name);
      break;
    }
  }
  if (hit == nullptr) return std::nullopt;

  InjectedFault fault;
  fault.name = hit->name;
  fault.overload = hit->overload_indicator;
  switch (hit->rule) {
    case AgeingRule::kNonAgeing:
      break;
    case AgeingRule::kLeavesStepEntity:
      if (context.is_delete || context.step_kind != hit->leftover_kind) {
        throw ConfigError(fmt::format(
            "error '{}' leaves a {} but step '{}' does not create one",
            hit->name, EntityKindName(*hit->leftover_kind), step));
      }
      fault.ageing = true;
      fault.leftover_kind = hit->leftover_kind;
      fault.own_entity = true;
      break;
    case AgeingRule::kContextDependent:
      if (context.is_delete && context.step_kind) {
        fault.leftover_kind = context.step_kind;
        fault.own_entity = true;
      } else {
        fault.leftover_kind = context.nearest_live_kind;
      }
      fault.ageing = fault.leftover_kind.has_value();
      break;
  }
  return fault;
}

void FaultModel::set_deploy_failure_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError(
        fmt::format("deploy failure probability {} outside [0,1]", p));
  }
  deploy_failure_p_ = p;
}

bool FaultModel::SampleDeployFailure() {
  if (deploy_failure_p_ <= 0.0) return false;
  return deploy_.Uniform() < deploy_failure_p_;
}

}  // namespace agesim
