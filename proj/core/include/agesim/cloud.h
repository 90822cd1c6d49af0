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

#ifndef AGESIM_CLOUD_H_
#define AGESIM_CLOUD_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace agesim {

class RandomStream;

enum class EntityKind : uint8_t {
  kUser,
  kRole,
  kSecurityGroup,
  kFlavor,
  kImage,
  kNetwork,
  kSubnet,
  kPort,
  kRouter,
  kServer,
  kVolume,
};

inline constexpr size_t kEntityKindCount = 11;

inline constexpr std::array<EntityKind, kEntityKindCount> kAllEntityKinds = {
    EntityKind::kUser,    EntityKind::kRole,   EntityKind::kSecurityGroup,
    EntityKind::kFlavor,  EntityKind::kImage,  EntityKind::kNetwork,
    EntityKind::kSubnet,  EntityKind::kPort,   EntityKind::kRouter,
    EntityKind::kServer,  EntityKind::kVolume,
};

std::string_view EntityKindName(EntityKind kind);
std::optional<EntityKind> ParseEntityKind(std::string_view name);

using KindCounts = std::array<int64_t, kEntityKindCount>;

inline constexpr size_t Index(EntityKind kind) {
  return static_cast<size_t>(kind);
}

// Per-kind limit on simultaneously existing entities. Kinds without a quota
// are unbounded.
class QuotaTable {
 public:
  // 10 each for SecurityGroup, Router, Server and Volume; nothing else.
  static QuotaTable Default();

  std::optional<int64_t> Get(EntityKind kind) const {
    return limits_[Index(kind)];
  }
  // Throws ConfigError for limits below 1.
  void Set(EntityKind kind, std::optional<int64_t> limit);

 private:
  std::array<std::optional<int64_t>, kEntityKindCount> limits_{};
};

enum class Topology { kAllInOne, kMultiNode };

std::string_view TopologyName(Topology topology);
std::optional<Topology> ParseTopology(std::string_view name);

enum class NodeRole { kControl, kMonitoring, kCompute, kAllInOne };

std::string_view NodeRoleName(NodeRole role);

struct NodeSpec {
  std::string name;
  NodeRole role = NodeRole::kAllInOne;
  double memory_available_gb = 0.0;  // right after deployment
  double swap_capacity_gb = 0.0;
  double disk_base_gb = 0.0;         // used by the OS and services
  double disk_capacity_gb = 0.0;
};

// control, monitoring, compute1, compute2 for multi-node; one node otherwise.
std::vector<NodeSpec> DefaultNodes(Topology topology);

// Memory, disk and rejuvenation parameters. All rates are tunable defaults.
struct ResourceParams {
  double image_size_gb = 0.040;
  double cache_max_age_s = 24 * 3600.0;
  double leak_per_workload_gb = 0.0005;
  double retention_per_leftover_gb = 0.01;
  // Below this much available memory the kernel starts swapping.
  double swap_threshold_gb = 1.0;
  // Share of memory pressure below the threshold that lands in swap while
  // physical memory is not yet exhausted.
  double swap_share = 0.5;
  // Lazily initialised services claim this much during the first hour after
  // a deployment, ramping linearly.
  double warmup_allocation_gb = 0.2;
  double warmup_noise_gb = 0.3;
  bool warmup_after_rejuvenation = true;
  // Fraction of cloud-level ageing that survives a redeployment at host
  // level (Docker, OS). No measured default exists.
  double host_retention_fraction = 0.1;
  double rejuvenation_duration_s = 3600.0;

  // Throws ConfigError.
  void Validate() const;
};

struct NodeGauges {
  std::string name;
  NodeRole role = NodeRole::kAllInOne;
  double memory_available_gb = 0.0;
  double swap_used_gb = 0.0;
  double disk_used_gb = 0.0;
  double disk_capacity_gb = 0.0;
};

struct CacheImage {
  double size_gb = 0.0;
  double created_at = 0.0;
  size_t node = 0;
};

enum class CreateResult { kCreated, kQuotaExceeded };

// Resource events fed to Cloud::ApplyResourceEffects.
struct StepCompleted {
  std::optional<EntityKind> created_kind;  // kServer deposits a cache image
};
struct WorkloadFinished {
  // False for workloads turned away at a quota gate before creating any
  // quota-limited entity; they neither leak nor age the services.
  bool ageing_work = true;
};
struct LeftoverRecorded {
  EntityKind kind = EntityKind::kUser;
};
struct TimeElapsed {
  double seconds = 3600.0;
};
using ResourceEvent =
    std::variant<StepCompleted, WorkloadFinished, LeftoverRecorded, TimeElapsed>;

// Deterministic model of a quota-limited cloud: the entity ledger, node
// resource gauges, the compute image cache and the virtual clock.
//
// Memory ageing accrues on the service node (the control node, or the single
// all-in-one node); compute nodes host the image cache.
class Cloud {
 public:
  Cloud(Topology topology, std::vector<NodeSpec> nodes, ResourceParams params,
        QuotaTable quotas);

  // Default nodes, parameters and quotas for `topology`.
  static Cloud Fresh(Topology topology);

  // min over quota-limited kinds of (quota - leftovers), floored at 0.
  int64_t Capacity() const;

  CreateResult TryCreate(EntityKind kind);
  // Throws LedgerUnderflowError when no live entity of `kind` exists.
  void TryDelete(EntityKind kind);
  // Moves one live entity to the leftover ledger (ERROR state, or an
  // entity cleanup could not reach).
  void MarkLeftover(EntityKind kind);

  void ApplyResourceEffects(const ResourceEvent& event);
  // Moves the clock forward to `t` (never backwards) and evicts expired
  // cache images.
  void AdvanceTo(double t);
  // Removes cache images older than cache_max_age_s. Returns freed GB.
  double CacheCleanup();
  // Whether a cache-hosting node has room for the next image.
  bool CanHostImage() const;

  // Redeploys: clears entities, cache and swap, keeps a host-level residue
  // and advances the clock by the rejuvenation duration.
  void Rejuvenate();
  // Deployment failed; the cloud stays failed until the next Rejuvenate.
  void MarkDeployFailed();

  // Recomputes and returns the failed flag: capacity 0, a full disk, or
  // exhausted memory and swap.
  bool CheckFailed();

  // True gauge values.
  std::vector<NodeGauges> Gauges() const;
  // Gauge readings; during warm-up the service node's available memory
  // carries uniform noise drawn from `noise`.
  std::vector<NodeGauges> ReadGauges(RandomStream& noise) const;

  // Workloads since deployment plus the host-level residue; drives the
  // service-time ageing multiplier.
  double AgeingUnits() const;

  int64_t live(EntityKind kind) const { return live_[Index(kind)]; }
  int64_t leftover(EntityKind kind) const { return leftover_[Index(kind)]; }
  const KindCounts& live_counts() const { return live_; }
  const KindCounts& leftover_counts() const { return leftover_; }
  const std::deque<CacheImage>& cache_images() const { return cache_; }
  double cache_disk_used_gb() const;
  double clock() const { return clock_; }
  double deployed_at() const { return deployed_at_; }
  double host_residual_gb() const { return host_residual_gb_; }
  double ageing_demand_gb() const { return ageing_demand_gb_; }
  bool failed() const { return failed_; }
  Topology topology() const { return topology_; }
  const QuotaTable& quotas() const { return quotas_; }
  const ResourceParams& params() const { return params_; }
  const std::vector<NodeSpec>& nodes() const { return nodes_; }
  size_t service_node() const { return service_node_; }
  const std::vector<size_t>& cache_nodes() const { return cache_nodes_; }

 private:
  double WarmupAllocation() const;
  bool WarmupActive() const;
  void ComputeServiceMemory(double* available, double* swap) const;

  Topology topology_;
  std::vector<NodeSpec> nodes_;
  ResourceParams params_;
  QuotaTable quotas_;
  size_t service_node_ = 0;
  std::vector<size_t> cache_nodes_;

  KindCounts live_{};
  KindCounts leftover_{};
  std::deque<CacheImage> cache_;
  std::vector<double> cache_gb_;
  size_t next_cache_node_ = 0;

  double clock_ = 0.0;
  double deployed_at_ = 0.0;
  bool warmup_enabled_ = true;
  double ageing_demand_gb_ = 0.0;
  double host_residual_gb_ = 0.0;
  int64_t workloads_since_deploy_ = 0;
  double residual_units_ = 0.0;
  bool deploy_failed_ = false;
  bool failed_ = false;
};

}  // namespace agesim

#endif  // AGESIM_CLOUD_H_
