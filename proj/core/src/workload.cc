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

#include "agesim/workload.h"

#include <algorithm>
#include <limits>
#include <map>
#include <memory>
#include <queue>
#include <set>
#include <utility>

#include <fmt/format.h>

#include "agesim/errors.h"

namespace agesim {
namespace {

StepSpec Create(std::string name, ServiceModule module, EntityKind kind,
                std::string undo, std::vector<std::string> deps = {},
                double base = 2.0) {
  return {std::move(name), module,      ActionType::kCreate, kind,
          std::move(deps), std::move(undo), base};
}

StepSpec Operate(std::string name, ServiceModule module,
                 std::vector<std::string> deps,
                 std::optional<std::string> undo = std::nullopt) {
  return {std::move(name), module,          ActionType::kOperate, std::nullopt,
          std::move(deps), std::move(undo), 2.0};
}

StepSpec Delete(std::string name, ServiceModule module, EntityKind kind,
                std::vector<std::string> deps) {
  return {std::move(name), module,      ActionType::kDelete, kind,
          std::move(deps), std::nullopt, 2.0};
}

bool IsQuotaLimited(const Cloud& cloud, std::optional<EntityKind> kind) {
  return kind && cloud.quotas().Get(*kind).has_value();
}

}  // namespace

std::string_view ServiceModuleName(ServiceModule module) {
  switch (module) {
    case ServiceModule::kKeystone:
      return "keystone";
    case ServiceModule::kNeutron:
      return "neutron";
    case ServiceModule::kGlance:
      return "glance";
    case ServiceModule::kCinder:
      return "cinder";
    case ServiceModule::kNova:
      return "nova";
  }
  return "unknown";
}

std::optional<ServiceModule> ParseServiceModule(std::string_view name) {
  for (ServiceModule m :
       {ServiceModule::kKeystone, ServiceModule::kNeutron,
        ServiceModule::kGlance, ServiceModule::kCinder, ServiceModule::kNova}) {
    if (ServiceModuleName(m) == name) return m;
  }
  return std::nullopt;
}

std::string_view ActionTypeName(ActionType action) {
  switch (action) {
    case ActionType::kCreate:
      return "create";
    case ActionType::kOperate:
      return "operate";
    case ActionType::kDelete:
      return "delete";
  }
  return "unknown";
}

std::optional<ActionType> ParseActionType(std::string_view name) {
  for (ActionType a :
       {ActionType::kCreate, ActionType::kOperate, ActionType::kDelete}) {
    if (ActionTypeName(a) == name) return a;
  }
  return std::nullopt;
}

std::string_view ClassificationName(Classification c) {
  switch (c) {
    case Classification::kSuccess:
      return "success";
    case Classification::kNonAgeingFailure:
      return "non-ageing-failure";
    case Classification::kAgeingFailure:
      return "ageing-failure";
  }
  return "unknown";
}

WorkloadDefinition::WorkloadDefinition(std::vector<StepSpec> steps)
    : steps_(std::move(steps)) {
  if (steps_.empty()) throw ConfigError("workload has no steps");
  if (steps_.size() > std::numeric_limits<uint16_t>::max()) {
    throw ConfigError("workload has too many steps");
  }
  std::map<std::string, size_t, std::less<>> index;
  for (size_t i = 0; i < steps_.size(); ++i) {
    const StepSpec& s = steps_[i];
    if (s.name.empty()) throw ConfigError("workload step without a name");
    if (!index.emplace(s.name, i).second) {
      throw ConfigError(fmt::format("duplicate step '{}'", s.name));
    }
    if (!(s.base_time_s > 0)) {
      throw ConfigError(fmt::format("step '{}': base time must be > 0", s.name));
    }
    if (s.action != ActionType::kOperate && !s.kind) {
      throw ConfigError(fmt::format("step '{}' needs an entity kind", s.name));
    }
    if (s.action == ActionType::kOperate && s.kind) {
      throw ConfigError(
          fmt::format("operate step '{}' cannot carry a kind", s.name));
    }
    for (const std::string& dep : s.depends_on) {
      auto it = index.find(dep);
      if (it == index.end() || it->second >= i) {
        throw ConfigError(fmt::format(
            "step '{}' depends on '{}', which does not precede it", s.name,
            dep));
      }
    }
  }

  undo_.assign(steps_.size(), std::nullopt);
  std::vector<bool> is_undo(steps_.size(), false);
  for (size_t i = 0; i < steps_.size(); ++i) {
    const StepSpec& s = steps_[i];
    if (s.action == ActionType::kCreate && !s.undo) {
      throw ConfigError(fmt::format("create step '{}' has no cleanup", s.name));
    }
    if (s.action == ActionType::kDelete && s.undo) {
      throw ConfigError(
          fmt::format("delete step '{}' cannot have a cleanup", s.name));
    }
    if (!s.undo) continue;
    auto it = index.find(*s.undo);
    if (it == index.end()) {
      throw ConfigError(
          fmt::format("step '{}': unknown cleanup '{}'", s.name, *s.undo));
    }
    const StepSpec& u = steps_[it->second];
    if (is_undo[it->second]) {
      throw ConfigError(fmt::format("'{}' cleans up more than one step", u.name));
    }
    if (s.action == ActionType::kCreate &&
        (u.action != ActionType::kDelete || u.kind != s.kind)) {
      throw ConfigError(fmt::format(
          "cleanup of '{}' must delete the same kind", s.name));
    }
    if (s.action == ActionType::kOperate && u.action == ActionType::kCreate) {
      throw ConfigError(
          fmt::format("cleanup of '{}' cannot create entities", s.name));
    }
    is_undo[it->second] = true;
    undo_[i] = it->second;
  }

  // Forward steps first, then cleanups in reverse order of their owners.
  std::vector<size_t> owners;
  size_t first_undo = steps_.size();
  for (size_t i = 0; i < steps_.size(); ++i) {
    if (is_undo[i]) {
      first_undo = std::min(first_undo, i);
      continue;
    }
    if (i > first_undo) {
      throw ConfigError(fmt::format(
          "forward step '{}' follows the cleanup sequence", steps_[i].name));
    }
    if (steps_[i].action == ActionType::kDelete) {
      throw ConfigError(fmt::format(
          "delete step '{}' is not the cleanup of any step", steps_[i].name));
    }
    forward_.push_back(i);
    if (undo_[i]) owners.push_back(i);
  }
  size_t pos = first_undo;
  for (auto it = owners.rbegin(); it != owners.rend(); ++it, ++pos) {
    if (*undo_[*it] != pos) {
      throw ConfigError(fmt::format(
          "cleanup '{}' is out of LIFO order", steps_[*undo_[*it]].name));
    }
  }
}

WorkloadDefinition WorkloadDefinition::Default() {
  using M = ServiceModule;
  using K = EntityKind;
  std::vector<StepSpec> steps = {
      Create("create user", M::kKeystone, K::kUser, "delete user"),
      Create("create role", M::kKeystone, K::kRole, "delete role"),
      Operate("add role", M::kKeystone, {"create role", "create user"},
              "revoke role"),
      Create("create security group", M::kNeutron, K::kSecurityGroup,
             "delete security group"),
      Create("create flavor", M::kNova, K::kFlavor, "delete flavor"),
      Create("create image", M::kGlance, K::kImage, "delete image"),
      Create("create network", M::kNeutron, K::kNetwork, "delete network"),
      Create("create subnet", M::kNeutron, K::kSubnet, "delete subnet",
             {"create network"}),
      Create("create port", M::kNeutron, K::kPort, "delete port",
             {"create network"}),
      Create("create router", M::kNeutron, K::kRouter, "delete router"),
      Create("boot server", M::kNova, K::kServer, "delete server",
             {"create flavor", "create image", "create network"}, 10.0),
      Create("create volume", M::kCinder, K::kVolume, "delete volume", {},
             5.0),
      Operate("attach volume", M::kNova, {"boot server", "create volume"}),
      Operate("rebuild server", M::kNova, {"boot server", "create image"}),
      Operate("pause server", M::kNova, {"boot server"}),
      Operate("unpause server", M::kNova, {"pause server"}),
      Operate("detach volume", M::kNova, {"attach volume"}),
      Delete("delete volume", M::kCinder, K::kVolume, {"detach volume"}),
      Delete("delete server", M::kNova, K::kServer, {"boot server"}),
      Delete("delete router", M::kNeutron, K::kRouter, {"create router"}),
      Delete("delete port", M::kNeutron, K::kPort, {"create port"}),
      Delete("delete subnet", M::kNeutron, K::kSubnet, {"create subnet"}),
      Delete("delete network", M::kNeutron, K::kNetwork,
             {"create network", "delete subnet", "delete port"}),
      Delete("delete image", M::kGlance, K::kImage, {"create image"}),
      Delete("delete flavor", M::kNova, K::kFlavor, {"create flavor"}),
      Delete("delete security group", M::kNeutron, K::kSecurityGroup,
             {"create security group"}),
      Operate("revoke role", M::kKeystone, {"add role"}),
      Delete("delete role", M::kKeystone, K::kRole,
             {"create role", "revoke role"}),
      Delete("delete user", M::kKeystone, K::kUser, {"create user"}),
  };
  return WorkloadDefinition(std::move(steps));
}

std::optional<size_t> WorkloadDefinition::undo_of(size_t index) const {
  return undo_.at(index);
}

std::optional<size_t> WorkloadDefinition::Find(std::string_view name) const {
  for (size_t i = 0; i < steps_.size(); ++i) {
    if (steps_[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<std::string> WorkloadDefinition::StepNames() const {
  std::vector<std::string> names;
  names.reserve(steps_.size());
  for (const StepSpec& s : steps_) names.push_back(s.name);
  return names;
}

double WorkloadDefinition::BaseDuration() const {
  double total = 0.0;
  for (const StepSpec& s : steps_) total += s.base_time_s;
  return total;
}

void ValidateFaults(const WorkloadDefinition& defn, const FaultModel& faults) {
  for (const auto& [step, errors] : faults.probabilities()) {
    auto index = defn.Find(step);
    if (!index) throw ConfigError(fmt::format("unknown step '{}'", step));
    const StepSpec& spec = defn.step(*index);
    for (const auto& [error, p] : errors) {
      const ErrorSpec* e = faults.FindError(error);
      if (e == nullptr) throw ConfigError(fmt::format("unknown error '{}'", error));
      if (e->rule == AgeingRule::kLeavesStepEntity &&
          (spec.action != ActionType::kCreate || spec.kind != e->leftover_kind)) {
        throw ConfigError(fmt::format(
            "error '{}' leaves a {} but step '{}' does not create one", error,
            EntityKindName(*e->leftover_kind), step));
      }
    }
  }
}

void ServiceParams::Validate() const {
  if (!(ageing_rate >= 0)) throw ConfigError("ageing_rate must be >= 0");
  if (!(service_slots > 0)) throw ConfigError("service_slots must be > 0");
  if (!(failed_attempt_s > 0)) throw ConfigError("failed_attempt_s must be > 0");
  if (!(waiting_load_weight >= 0 && waiting_load_weight <= 1)) {
    throw ConfigError("waiting_load_weight must be in [0, 1]");
  }
}

double ServiceTime(const StepSpec& step, const Cloud& cloud, double load,
                   const ServiceParams& params) {
  const double ageing = 1.0 + params.ageing_rate * cloud.AgeingUnits();
  double contention = 1.0;
  if (params.contention == Contention::kLinearSharing) {
    contention = std::max(1.0, load / params.service_slots);
  }
  return step.base_time_s * ageing * contention;
}

int64_t WorkloadResult::TotalLeftovers() const {
  int64_t total = 0;
  for (int64_t n : leftovers_created) total += n;
  return total;
}

WorkloadExecution::WorkloadExecution(const WorkloadDefinition& defn,
                                     double start, int stream)
    : defn_(&defn), stream_(stream), start_(start) {
  steps_.reserve(defn.steps().size());
}

std::optional<size_t> WorkloadExecution::ExecuteNextStep(Cloud& cloud,
                                                         FaultModel& faults) {
  if (done_) return std::nullopt;
  if (!unwinding_) {
    if (next_forward_ < defn_->forward().size()) {
      const size_t index = defn_->forward()[next_forward_++];
      ExecuteForward(index, cloud, faults);
      return index;
    }
    unwinding_ = true;
  }
  while (!stack_.empty() && stack_.back().abandoned) stack_.pop_back();
  if (stack_.empty()) {
    done_ = true;
    return std::nullopt;
  }
  const UndoEntry entry = stack_.back();
  stack_.pop_back();
  ExecuteUndo(entry, cloud, faults);
  return entry.step;
}

void WorkloadExecution::ExecuteForward(size_t index, Cloud& cloud,
                                       FaultModel& faults) {
  const StepSpec& step = defn_->step(index);
  if (step.action == ActionType::kCreate) {
    const EntityKind kind = *step.kind;
    if (cloud.TryCreate(kind) == CreateResult::kQuotaExceeded) {
      const std::string name = QuotaExceededName(kind);
      Fail(index, name, false, IsOverloadError(name));
      return;
    }
    if (kind == EntityKind::kServer && !cloud.CanHostImage()) {
      cloud.TryDelete(kind);
      Fail(index, std::string(kNoValidHostError), false, false);
      return;
    }
    auto fault = faults.Sample(step.name, {kind, false, NearestLiveKind()});
    if (!fault) {
      Push({*defn_->undo_of(index), kind, false}, cloud);
      cloud.ApplyResourceEffects(StepCompleted{kind});
      steps_.push_back({static_cast<uint16_t>(index), StepOutcome::kOk});
      return;
    }
    if (fault->own_entity) {
      RecordLeftover(kind, cloud);
    } else {
      cloud.TryDelete(kind);
      if (fault->leftover_kind) AbandonTop(*fault->leftover_kind, cloud);
    }
    Fail(index, fault->name, fault->ageing, fault->overload);
    return;
  }

  auto fault = faults.Sample(step.name, {std::nullopt, false, NearestLiveKind()});
  if (fault) {
    if (fault->leftover_kind) AbandonTop(*fault->leftover_kind, cloud);
    Fail(index, fault->name, fault->ageing, fault->overload);
    return;
  }
  if (auto undo = defn_->undo_of(index)) Push({*undo, std::nullopt, false}, cloud);
  steps_.push_back({static_cast<uint16_t>(index), StepOutcome::kOk});
}

void WorkloadExecution::ExecuteUndo(const UndoEntry& entry, Cloud& cloud,
                                    FaultModel& faults) {
  const StepSpec& step = defn_->step(entry.step);
  const bool is_delete = step.action == ActionType::kDelete;
  std::optional<InjectedFault> fault;
  if (!error_) {
    const std::optional<EntityKind> nearest =
        is_delete ? entry.kind : NearestLiveKind();
    fault = faults.Sample(step.name, {entry.kind, is_delete, nearest});
  }
  if (is_delete) {
    if (fault) {
      // The entity this step was meant to remove stays behind.
      Release(entry, cloud);
      RecordLeftover(*entry.kind, cloud);
      Fail(entry.step, fault->name, true, fault->overload);
      return;
    }
    Release(entry, cloud);
    cloud.TryDelete(*entry.kind);
  } else if (fault) {
    if (fault->leftover_kind) AbandonTop(*fault->leftover_kind, cloud);
    Fail(entry.step, fault->name, fault->ageing, fault->overload);
    return;
  }
  steps_.push_back({static_cast<uint16_t>(entry.step), StepOutcome::kOk});
}

void WorkloadExecution::Fail(size_t index, std::string name, bool ageing,
                             bool overload) {
  steps_.push_back({static_cast<uint16_t>(index), StepOutcome::kFailed});
  error_ = WorkloadError{defn_->step(index).name, std::move(name), ageing,
                         overload};
  unwinding_ = true;
}

std::optional<EntityKind> WorkloadExecution::NearestLiveKind() const {
  for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
    if (!it->abandoned && it->kind) return it->kind;
  }
  return std::nullopt;
}

void WorkloadExecution::AbandonTop(EntityKind kind, Cloud& cloud) {
  for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
    if (!it->abandoned && it->kind == kind) {
      it->abandoned = true;
      Release(*it, cloud);
      RecordLeftover(kind, cloud);
      return;
    }
  }
}

void WorkloadExecution::RecordLeftover(EntityKind kind, Cloud& cloud) {
  cloud.MarkLeftover(kind);
  ++leftovers_[Index(kind)];
}

void WorkloadExecution::Push(UndoEntry entry, const Cloud& cloud) {
  if (IsQuotaLimited(cloud, entry.kind)) {
    ++quota_held_;
    ever_admitted_ = true;
  }
  stack_.push_back(entry);
}

void WorkloadExecution::Release(const UndoEntry& entry, const Cloud& cloud) {
  if (IsQuotaLimited(cloud, entry.kind)) --quota_held_;
}

WorkloadResult WorkloadExecution::Finish(Cloud& cloud) {
  WorkloadResult result;
  result.stream = stream_;
  result.start = start_;
  result.duration = duration_;
  result.end = start_ + duration_;
  result.steps = std::move(steps_);
  result.leftovers_created = leftovers_;
  result.error = std::move(error_);
  if (result.TotalLeftovers() > 0) {
    result.classification = Classification::kAgeingFailure;
  } else if (result.error) {
    result.classification = Classification::kNonAgeingFailure;
  } else {
    result.classification = Classification::kSuccess;
  }
  if (result.error) result.error->ageing = result.TotalLeftovers() > 0;
  cloud.ApplyResourceEffects(WorkloadFinished{ever_admitted_});
  done_ = true;
  return result;
}

void WorkloadExecution::Abort(Cloud& cloud) {
  for (const UndoEntry& entry : stack_) {
    if (!entry.abandoned && entry.kind) cloud.TryDelete(*entry.kind);
  }
  stack_.clear();
  quota_held_ = 0;
  done_ = true;
}

namespace {

WorkloadResult RejectedLaunch(double start, double cost, int stream) {
  WorkloadResult result;
  result.stream = stream;
  result.start = start;
  result.duration = cost;
  result.end = start + cost;
  result.launched = false;
  result.error = WorkloadError{"-", std::string(kCloudFailedError), false,
                               false};
  result.classification = Classification::kNonAgeingFailure;
  return result;
}

}  // namespace

WorkloadResult RunWorkload(const WorkloadDefinition& defn, Cloud& cloud,
                           FaultModel& faults, const ServiceParams& service) {
  const std::vector<std::string> names = defn.StepNames();
  faults.BindSteps(names);
  if (cloud.CheckFailed()) return RejectedLaunch(cloud.clock(), 0.0, 0);
  WorkloadExecution exec(defn, cloud.clock());
  while (auto index = exec.ExecuteNextStep(cloud, faults)) {
    const double dt = ServiceTime(defn.step(*index), cloud, 1, service);
    exec.AddTime(dt);
    cloud.AdvanceTo(cloud.clock() + dt);
  }
  return exec.Finish(cloud);
}

StreamOutcome RunStream(const WorkloadDefinition& defn, Cloud& cloud,
                        FaultModel& faults, const ServiceParams& service,
                        double until, int concurrency,
                        const StreamHooks& hooks) {
  if (concurrency < 1) {
    throw ConfigError(fmt::format("concurrency must be >= 1, got {}",
                                  concurrency));
  }
  service.Validate();
  const std::vector<std::string> names = defn.StepNames();
  faults.BindSteps(names);

  struct Event {
    double time;
    int stream;
    bool operator>(const Event& o) const {
      return time != o.time ? time > o.time : stream > o.stream;
    }
  };
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue;
  std::vector<std::unique_ptr<WorkloadExecution>> running(concurrency);
  int64_t admitted = 0;
  int64_t active = 0;

  const double start = cloud.clock();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  int64_t sample_index = 0;
  int64_t hour_index = 1;
  auto next_sample = [&] {
    if (!hooks.on_sample || hooks.sample_interval_s <= 0) return kInf;
    const double t =
        start + static_cast<double>(sample_index) * hooks.sample_interval_s;
    return t < until ? t : kInf;
  };
  auto next_hour = [&] {
    if (!hooks.on_hour) return kInf;
    const double t = start + static_cast<double>(hour_index) * 3600.0;
    return t < until ? t : kInf;
  };

  StreamOutcome outcome;
  for (int s = 0; s < concurrency; ++s) queue.push({start, s});

  while (true) {
    const double t_wl = queue.empty() ? kInf : queue.top().time;
    const double t_sample = next_sample();
    const double t_hour = next_hour();
    const double t_workload = t_wl < until ? t_wl : kInf;
    const double t = std::min({t_sample, t_hour, t_workload});
    if (t == kInf) {
      outcome.ended_at = until;
      break;
    }
    cloud.AdvanceTo(t);
    if (t_sample == t) {
      cloud.CheckFailed();
      hooks.on_sample(t);
      ++sample_index;
      continue;
    }
    if (t_hour == t) {
      ++hour_index;
      if (hooks.on_hour(t)) {
        outcome.ended_at = t;
        break;
      }
      continue;
    }

    const Event ev = queue.top();
    queue.pop();
    auto& exec = running[ev.stream];
    if (!exec) {
      if (cloud.CheckFailed()) {
        outcome.results.push_back(
            RejectedLaunch(t, service.failed_attempt_s, ev.stream));
        queue.push({t + service.failed_attempt_s, ev.stream});
        continue;
      }
      exec = std::make_unique<WorkloadExecution>(defn, t, ev.stream);
      ++active;
    }

    const bool was_admitted = exec->admitted();
    const std::optional<size_t> index = exec->ExecuteNextStep(cloud, faults);
    admitted += static_cast<int64_t>(exec->admitted()) -
                static_cast<int64_t>(was_admitted);
    if (index) {
      const double load =
          static_cast<double>(admitted) +
          service.waiting_load_weight * static_cast<double>(active - admitted);
      const double dt = ServiceTime(defn.step(*index), cloud, load, service);
      exec->AddTime(dt);
      queue.push({t + dt, ev.stream});
      continue;
    }
    outcome.results.push_back(exec->Finish(cloud));
    exec.reset();
    --active;
    // Back to back: the next workload on this stream starts right away.
    queue.push({t, ev.stream});
  }

  for (auto& exec : running) {
    if (!exec) continue;
    exec->Abort(cloud);
    ++outcome.interrupted;
  }
  std::stable_sort(outcome.results.begin(), outcome.results.end(),
                   [](const WorkloadResult& a, const WorkloadResult& b) {
                     return a.start != b.start ? a.start < b.start
                                               : a.stream < b.stream;
                   });
  return outcome;
}

}  // namespace agesim
