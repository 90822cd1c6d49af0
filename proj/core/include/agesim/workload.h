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

#ifndef AGESIM_WORKLOAD_H_
#define AGESIM_WORKLOAD_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agesim/cloud.h"
#include "agesim/fault_model.h"

namespace agesim {

enum class ServiceModule { kKeystone, kNeutron, kGlance, kCinder, kNova };

std::string_view ServiceModuleName(ServiceModule module);
std::optional<ServiceModule> ParseServiceModule(std::string_view name);

enum class ActionType { kCreate, kOperate, kDelete };

std::string_view ActionTypeName(ActionType action);
std::optional<ActionType> ParseActionType(std::string_view name);

struct StepSpec {
  std::string name;
  ServiceModule module = ServiceModule::kKeystone;
  ActionType action = ActionType::kOperate;
  // Created by kCreate steps, removed by kDelete steps.
  std::optional<EntityKind> kind;
  std::vector<std::string> depends_on;
  // Step that reverses this one during cleanup. Required for kCreate steps.
  std::optional<std::string> undo;
  double base_time_s = 2.0;
};

// An ordered workload: forward steps (creations and operations) followed by
// their cleanup counterparts in LIFO order. Construction validates the
// structure and throws ConfigError on violations.
class WorkloadDefinition {
 public:
  explicit WorkloadDefinition(std::vector<StepSpec> steps);

  // The 29-step create/operate/delete sequence over keystone, neutron,
  // glance, cinder and nova.
  static WorkloadDefinition Default();

  const std::vector<StepSpec>& steps() const { return steps_; }
  const StepSpec& step(size_t index) const { return steps_[index]; }
  // Indices of steps executed front to back.
  const std::vector<size_t>& forward() const { return forward_; }
  // Index of the cleanup step for steps_[index], if any.
  std::optional<size_t> undo_of(size_t index) const;
  std::optional<size_t> Find(std::string_view name) const;
  std::vector<std::string> StepNames() const;
  // Sum of base step times.
  double BaseDuration() const;

 private:
  std::vector<StepSpec> steps_;
  std::vector<size_t> forward_;
  std::vector<std::optional<size_t>> undo_;
};

// Checks that every configured (step, error) pair can actually fire on that
// step. Throws ConfigError.
void ValidateFaults(const WorkloadDefinition& defn, const FaultModel& faults);

enum class Contention {
  kLinearSharing,  // f(x) = max(1, x)
  kNone,           // f(x) = 1
};

struct ServiceParams {
  // Relative slowdown per ageing unit (one workload since deployment).
  double ageing_rate = 2e-5;
  // Workloads the hardware serves in parallel without slowing down.
  double service_slots = 6.0;
  Contention contention = Contention::kLinearSharing;
  // Load a workload adds while it holds no quota-limited entity, relative
  // to one that does.
  double waiting_load_weight = 0.2;
  // Time a launch attempt against a failed cloud takes to be rejected.
  double failed_attempt_s = 60.0;

  void Validate() const;
};

// base * (1 + ageing_rate * ageing units) * f(load / service_slots).
// `load` is the number of in-flight workloads holding quota-limited entities
// plus waiting_load_weight for every other in-flight workload, the caller
// included. A single workload passes 1.
double ServiceTime(const StepSpec& step, const Cloud& cloud, double load,
                   const ServiceParams& params);

enum class Classification { kSuccess, kNonAgeingFailure, kAgeingFailure };

std::string_view ClassificationName(Classification c);

enum class StepOutcome : uint8_t { kOk, kFailed };

struct StepRecord {
  uint16_t step = 0;  // index into WorkloadDefinition::steps()
  StepOutcome outcome = StepOutcome::kOk;
};

struct WorkloadError {
  std::string step;  // "-" when no step ran
  std::string name;
  bool ageing = false;
  bool overload = false;
};

struct WorkloadResult {
  int stream = 0;
  double start = 0.0;
  double end = 0.0;
  double duration = 0.0;
  // False when the cloud was already failed at launch.
  bool launched = true;
  std::vector<StepRecord> steps;
  std::optional<WorkloadError> error;
  Classification classification = Classification::kSuccess;
  KindCounts leftovers_created{};

  int64_t TotalLeftovers() const;
};

// One workload in progress. Forward steps run in order, each pushing its
// cleanup onto a LIFO stack; the first error skips the remaining forward
// steps and unwinds the stack. Entities left in ERROR state or out of reach
// of cleanup are moved to the cloud's leftover ledger. Only the first error
// of a workload is sampled, so a workload leaves at most one leftover.
class WorkloadExecution {
 public:
  WorkloadExecution(const WorkloadDefinition& defn, double start,
                    int stream = 0);

  // Executes the next step against `cloud` at its current clock. Returns the
  // index of the executed step, or nullopt once nothing is left to run.
  std::optional<size_t> ExecuteNextStep(Cloud& cloud, FaultModel& faults);
  void AddTime(double seconds) { duration_ += seconds; }

  // Emits the WorkloadFinished resource event and returns the record.
  WorkloadResult Finish(Cloud& cloud);
  // Deletes the live entities of an interrupted workload without recording
  // a result.
  void Abort(Cloud& cloud);

  bool done() const { return done_; }
  // Whether this workload currently holds quota-limited entities.
  bool admitted() const { return quota_held_ > 0; }
  double duration() const { return duration_; }

 private:
  struct UndoEntry {
    size_t step = 0;
    std::optional<EntityKind> kind;
    bool abandoned = false;
  };

  void ExecuteForward(size_t index, Cloud& cloud, FaultModel& faults);
  void ExecuteUndo(const UndoEntry& entry, Cloud& cloud, FaultModel& faults);
  void Fail(size_t index, std::string name, bool ageing, bool overload);
  std::optional<EntityKind> NearestLiveKind() const;
  // Marks the topmost live entity of `kind` as a leftover.
  void AbandonTop(EntityKind kind, Cloud& cloud);
  void RecordLeftover(EntityKind kind, Cloud& cloud);
  void Push(UndoEntry entry, const Cloud& cloud);
  void Release(const UndoEntry& entry, const Cloud& cloud);

  const WorkloadDefinition* defn_;
  int stream_;
  double start_;
  double duration_ = 0.0;
  size_t next_forward_ = 0;
  bool unwinding_ = false;
  bool done_ = false;
  int quota_held_ = 0;
  bool ever_admitted_ = false;
  std::vector<UndoEntry> stack_;
  std::vector<StepRecord> steps_;
  std::optional<WorkloadError> error_;
  KindCounts leftovers_{};
};

// Runs one workload to completion on its own (no concurrency). A cloud that
// is already failed yields an immediate, unlaunched failure record.
WorkloadResult RunWorkload(const WorkloadDefinition& defn, Cloud& cloud,
                           FaultModel& faults,
                           const ServiceParams& service = {});

struct StreamHooks {
  double sample_interval_s = 30.0;
  // Called at start + k * sample_interval_s for every such time < until.
  std::function<void(double t)> on_sample;
  // Called at every whole hour after the start, before `until`. Returning
  // true ends the stream at that instant.
  std::function<bool(double t)> on_hour;
};

struct StreamOutcome {
  std::vector<WorkloadResult> results;  // ordered by start, then stream
  double ended_at = 0.0;
  // Workloads still running when the stream ended. They are rolled back and
  // not recorded.
  int64_t interrupted = 0;
};

// Keeps `concurrency` workloads in flight back to back on a single virtual
// clock until `until`. Events at equal times run samples first, then hour
// checks, then workload steps by stream index.
StreamOutcome RunStream(const WorkloadDefinition& defn, Cloud& cloud,
                        FaultModel& faults, const ServiceParams& service,
                        double until, int concurrency,
                        const StreamHooks& hooks = {});

}  // namespace agesim

#endif  // AGESIM_WORKLOAD_H_
