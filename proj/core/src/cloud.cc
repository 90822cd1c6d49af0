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

#include "agesim/cloud.h"

#include <algorithm>
#include <limits>
#include <utility>

#include <fmt/format.h>

#include "agesim/errors.h"
#include "agesim/rng.h"

namespace agesim {
namespace {

constexpr std::array<std::string_view, kEntityKindCount> kKindNames = {
    "User",    "Role",   "SecurityGroup", "Flavor", "Image",  "Network",
    "Subnet",  "Port",   "Router",        "Server", "Volume",
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::string_view EntityKindName(EntityKind kind) {
  return kKindNames[Index(kind)];
}

std::optional<EntityKind> ParseEntityKind(std::string_view name) {
  for (EntityKind kind : kAllEntityKinds) {
    if (EntityKindName(kind) == name) return kind;
  }
  return std::nullopt;
}

QuotaTable QuotaTable::Default() {
  QuotaTable table;
  for (EntityKind kind : {EntityKind::kSecurityGroup, EntityKind::kRouter,
                          EntityKind::kServer, EntityKind::kVolume}) {
    table.limits_[Index(kind)] = 10;
  }
  return table;
}

void QuotaTable::Set(EntityKind kind, std::optional<int64_t> limit) {
  if (limit && *limit < 1) {
    throw ConfigError(fmt::format("quota for {} must be >= 1, got {}",
                                  EntityKindName(kind), *limit));
  }
  limits_[Index(kind)] = limit;
}

std::string_view TopologyName(Topology topology) {
  return topology == Topology::kAllInOne ? "all-in-one" : "multi-node";
}

std::optional<Topology> ParseTopology(std::string_view name) {
  if (name == "all-in-one") return Topology::kAllInOne;
  if (name == "multi-node") return Topology::kMultiNode;
  return std::nullopt;
}

std::string_view NodeRoleName(NodeRole role) {
  switch (role) {
    case NodeRole::kControl:
      return "control";
    case NodeRole::kMonitoring:
      return "monitoring";
    case NodeRole::kCompute:
      return "compute";
    case NodeRole::kAllInOne:
      return "all-in-one";
  }
  return "unknown";
}

std::vector<NodeSpec> DefaultNodes(Topology topology) {
  if (topology == Topology::kAllInOne) {
    return {{"aio", NodeRole::kAllInOne, 1.6, 4.0, 40.0, 240.0}};
  }
  return {
      {"control", NodeRole::kControl, 1.6, 4.0, 30.0, 200.0},
      {"monitoring", NodeRole::kMonitoring, 4.0, 2.0, 30.0, 200.0},
      {"compute1", NodeRole::kCompute, 6.0, 2.0, 20.0, 140.0},
      {"compute2", NodeRole::kCompute, 6.0, 2.0, 20.0, 140.0},
  };
}

void ResourceParams::Validate() const {
  auto require = [](bool ok, std::string_view what) {
    if (!ok) throw ConfigError(fmt::format("invalid resources: {}", what));
  };
  require(image_size_gb > 0, "image_size_gb must be > 0");
  require(cache_max_age_s > 0, "cache_max_age_s must be > 0");
  require(leak_per_workload_gb >= 0, "leak_per_workload_gb must be >= 0");
  require(retention_per_leftover_gb >= 0,
          "retention_per_leftover_gb must be >= 0");
  require(swap_threshold_gb >= 0, "swap_threshold_gb must be >= 0");
  require(swap_share >= 0 && swap_share <= 1, "swap_share must be in [0,1]");
  require(warmup_allocation_gb >= 0, "warmup_allocation_gb must be >= 0");
  require(warmup_noise_gb >= 0, "warmup_noise_gb must be >= 0");
  require(host_retention_fraction >= 0 && host_retention_fraction <= 1,
          "host_retention_fraction must be in [0,1]");
  require(rejuvenation_duration_s > 0, "rejuvenation_duration_s must be > 0");
}

Cloud::Cloud(Topology topology, std::vector<NodeSpec> nodes,
             ResourceParams params, QuotaTable quotas)
    : topology_(topology),
      nodes_(std::move(nodes)),
      params_(params),
      quotas_(quotas) {
  params_.Validate();
  if (nodes_.empty()) throw ConfigError("a cloud needs at least one node");
  bool have_service = false;
  for (size_t i = 0; i < nodes_.size(); ++i) {
    const NodeSpec& node = nodes_[i];
    if (node.disk_capacity_gb <= node.disk_base_gb) {
      throw ConfigError(
          fmt::format("node {}: disk capacity must exceed base usage",
                      node.name));
    }
    if (node.memory_available_gb < 0 || node.swap_capacity_gb < 0) {
      throw ConfigError(fmt::format("node {}: negative memory", node.name));
    }
    if (!have_service && (node.role == NodeRole::kControl ||
                          node.role == NodeRole::kAllInOne)) {
      service_node_ = i;
      have_service = true;
    }
    if (node.role == NodeRole::kCompute || node.role == NodeRole::kAllInOne) {
      cache_nodes_.push_back(i);
    }
  }
  if (!have_service) throw ConfigError("no control or all-in-one node");
  if (cache_nodes_.empty()) throw ConfigError("no compute node");
  cache_gb_.assign(nodes_.size(), 0.0);
}

Cloud Cloud::Fresh(Topology topology) {
  return Cloud(topology, DefaultNodes(topology), ResourceParams{},
               QuotaTable::Default());
}

int64_t Cloud::Capacity() const {
  int64_t capacity = std::numeric_limits<int64_t>::max();
  for (EntityKind kind : kAllEntityKinds) {
    if (auto quota = quotas_.Get(kind)) {
      capacity = std::min(capacity, *quota - leftover(kind));
    }
  }
  return std::max<int64_t>(capacity, 0);
}

CreateResult Cloud::TryCreate(EntityKind kind) {
  if (auto quota = quotas_.Get(kind)) {
    if (live(kind) + leftover(kind) >= *quota) {
      return CreateResult::kQuotaExceeded;
    }
  }
  ++live_[Index(kind)];
  return CreateResult::kCreated;
}

void Cloud::TryDelete(EntityKind kind) {
  if (live(kind) < 1) {
    throw LedgerUnderflowError(
        fmt::format("delete {} with no live entity", EntityKindName(kind)));
  }
  --live_[Index(kind)];
}

void Cloud::MarkLeftover(EntityKind kind) {
  if (live(kind) < 1) {
    throw LedgerUnderflowError(fmt::format(
        "leftover {} without a live entity", EntityKindName(kind)));
  }
  --live_[Index(kind)];
  ++leftover_[Index(kind)];
  ApplyResourceEffects(LeftoverRecorded{kind});
}

void Cloud::ApplyResourceEffects(const ResourceEvent& event) {
  std::visit(
      Overloaded{
          [&](const StepCompleted& e) {
            if (e.created_kind != EntityKind::kServer) return;
            const size_t node =
                cache_nodes_[next_cache_node_ % cache_nodes_.size()];
            ++next_cache_node_;
            cache_.push_back({params_.image_size_gb, clock_, node});
            cache_gb_[node] += params_.image_size_gb;
          },
          [&](const WorkloadFinished& e) {
            if (!e.ageing_work) return;
            ageing_demand_gb_ += params_.leak_per_workload_gb;
            ++workloads_since_deploy_;
          },
          [&](const LeftoverRecorded&) {
            ageing_demand_gb_ += params_.retention_per_leftover_gb;
          },
          [&](const TimeElapsed& e) { AdvanceTo(clock_ + e.seconds); },
      },
      event);
}

void Cloud::AdvanceTo(double t) {
  clock_ = std::max(clock_, t);
  CacheCleanup();
}

double Cloud::CacheCleanup() {
  double freed = 0.0;
  while (!cache_.empty() &&
         clock_ - cache_.front().created_at > params_.cache_max_age_s) {
    const CacheImage& image = cache_.front();
    cache_gb_[image.node] -= image.size_gb;
    freed += image.size_gb;
    cache_.pop_front();
  }
  // Drift guard: an empty cache holds exactly nothing.
  if (cache_.empty()) std::fill(cache_gb_.begin(), cache_gb_.end(), 0.0);
  return freed;
}

bool Cloud::CanHostImage() const {
  const size_t node = cache_nodes_[next_cache_node_ % cache_nodes_.size()];
  return nodes_[node].disk_base_gb + cache_gb_[node] + params_.image_size_gb <=
         nodes_[node].disk_capacity_gb;
}

double Cloud::cache_disk_used_gb() const {
  double total = 0.0;
  for (double gb : cache_gb_) total += gb;
  return total;
}

void Cloud::Rejuvenate() {
  live_.fill(0);
  leftover_.fill(0);
  cache_.clear();
  std::fill(cache_gb_.begin(), cache_gb_.end(), 0.0);

  const NodeSpec& service = nodes_[service_node_];
  host_residual_gb_ += params_.host_retention_fraction * ageing_demand_gb_;
  // A fresh deployment stays out of swap, warm-up included.
  const double warmup =
      params_.warmup_after_rejuvenation ? params_.warmup_allocation_gb : 0.0;
  host_residual_gb_ =
      std::min(host_residual_gb_,
               std::max(0.0, service.memory_available_gb -
                                 params_.swap_threshold_gb - warmup));
  ageing_demand_gb_ = 0.0;
  residual_units_ += params_.host_retention_fraction *
                     static_cast<double>(workloads_since_deploy_);
  workloads_since_deploy_ = 0;

  deploy_failed_ = false;
  failed_ = false;
  clock_ += params_.rejuvenation_duration_s;
  deployed_at_ = clock_;
  warmup_enabled_ = params_.warmup_after_rejuvenation;
}

void Cloud::MarkDeployFailed() {
  deploy_failed_ = true;
  failed_ = true;
}

bool Cloud::WarmupActive() const {
  return warmup_enabled_ && clock_ - deployed_at_ < 3600.0;
}

double Cloud::WarmupAllocation() const {
  if (!warmup_enabled_) return 0.0;
  const double progress = std::clamp((clock_ - deployed_at_) / 3600.0, 0.0, 1.0);
  return params_.warmup_allocation_gb * progress;
}

void Cloud::ComputeServiceMemory(double* available, double* swap) const {
  const NodeSpec& node = nodes_[service_node_];
  const double threshold = params_.swap_threshold_gb;
  const double raw = node.memory_available_gb - host_residual_gb_ -
                     WarmupAllocation() - ageing_demand_gb_;
  if (raw >= threshold) {
    *available = raw;
    *swap = 0.0;
    return;
  }
  // Pressure below the threshold is split between shrinking RAM and growing
  // swap until RAM runs out; after that all of it goes to swap.
  const double overflow = threshold - raw;
  *available = std::max(0.0, threshold - overflow * (1.0 - params_.swap_share));
  *swap = std::min(overflow - (threshold - *available), node.swap_capacity_gb);
}

std::vector<NodeGauges> Cloud::Gauges() const {
  std::vector<NodeGauges> gauges;
  gauges.reserve(nodes_.size());
  for (size_t i = 0; i < nodes_.size(); ++i) {
    const NodeSpec& node = nodes_[i];
    NodeGauges g;
    g.name = node.name;
    g.role = node.role;
    g.memory_available_gb = node.memory_available_gb;
    g.swap_used_gb = 0.0;
    if (i == service_node_) {
      ComputeServiceMemory(&g.memory_available_gb, &g.swap_used_gb);
    }
    g.disk_used_gb = node.disk_base_gb + cache_gb_[i];
    g.disk_capacity_gb = node.disk_capacity_gb;
    gauges.push_back(std::move(g));
  }
  return gauges;
}

std::vector<NodeGauges> Cloud::ReadGauges(RandomStream& noise) const {
  std::vector<NodeGauges> gauges = Gauges();
  if (WarmupActive() && params_.warmup_noise_gb > 0) {
    NodeGauges& g = gauges[service_node_];
    g.memory_available_gb = std::max(
        0.0, g.memory_available_gb +
                 noise.Uniform(-params_.warmup_noise_gb,
                               params_.warmup_noise_gb));
  }
  return gauges;
}

bool Cloud::CheckFailed() {
  bool failed = deploy_failed_ || Capacity() == 0;
  if (!failed) {
    const std::vector<NodeGauges> gauges = Gauges();
    for (size_t i = 0; i < gauges.size() && !failed; ++i) {
      const NodeGauges& g = gauges[i];
      const bool hosts_cache =
          std::find(cache_nodes_.begin(), cache_nodes_.end(), i) !=
          cache_nodes_.end();
      // A cache node is out of disk once the next image no longer fits.
      const double needed = hosts_cache ? params_.image_size_gb : 0.0;
      if (g.disk_used_gb + needed > g.disk_capacity_gb ||
          g.disk_used_gb >= g.disk_capacity_gb) {
        failed = true;
      }
      const double swap_headroom = nodes_[i].swap_capacity_gb - g.swap_used_gb;
      if (g.memory_available_gb + swap_headroom <= 0.0) failed = true;
    }
  }
  failed_ = failed;
  return failed_;
}

double Cloud::AgeingUnits() const {
  return static_cast<double>(workloads_since_deploy_) + residual_units_;
}

}  // namespace agesim
