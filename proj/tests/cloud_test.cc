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

#include <gtest/gtest.h>

#include "agesim/errors.h"
#include "agesim/rng.h"

namespace agesim {
namespace {

void Leave(Cloud& cloud, EntityKind kind, int count) {
  for (int i = 0; i < count; ++i) {
    ASSERT_EQ(cloud.TryCreate(kind), CreateResult::kCreated);
    cloud.MarkLeftover(kind);
  }
}

TEST(EntityKindTest, NamesRoundTrip) {
  for (EntityKind kind : kAllEntityKinds) {
    EXPECT_EQ(ParseEntityKind(EntityKindName(kind)), kind);
  }
  EXPECT_FALSE(ParseEntityKind("Gizmo").has_value());
}

TEST(TopologyTest, NamesRoundTrip) {
  EXPECT_EQ(ParseTopology("all-in-one"), Topology::kAllInOne);
  EXPECT_EQ(ParseTopology("multi-node"), Topology::kMultiNode);
  EXPECT_FALSE(ParseTopology("cluster").has_value());
}

TEST(CloudTest, FreshCapacityIsTen) {
  EXPECT_EQ(Cloud::Fresh(Topology::kMultiNode).Capacity(), 10);
  EXPECT_EQ(Cloud::Fresh(Topology::kAllInOne).Capacity(), 10);
}

TEST(CloudTest, CapacityIsMinimumHeadroom) {
  Cloud cloud = Cloud::Fresh(Topology::kMultiNode);
  Leave(cloud, EntityKind::kServer, 3);
  EXPECT_EQ(cloud.Capacity(), 7);
  Leave(cloud, EntityKind::kSecurityGroup, 4);
  EXPECT_EQ(cloud.Capacity(), 6);
  Leave(cloud, EntityKind::kNetwork, 20);
  EXPECT_EQ(cloud.Capacity(), 6);
}

TEST(CloudTest, CapacityBruteForce) {
  for (int servers = 0; servers <= 10; ++servers) {
    for (int volumes = 0; volumes <= 10; volumes += 3) {
      Cloud cloud = Cloud::Fresh(Topology::kAllInOne);
      Leave(cloud, EntityKind::kServer, servers);
      Leave(cloud, EntityKind::kVolume, volumes);
      int64_t expected = 10;
      expected = std::min<int64_t>(expected, 10 - servers);
      expected = std::min<int64_t>(expected, 10 - volumes);
      EXPECT_EQ(cloud.Capacity(), expected);
    }
  }
}

TEST(CloudTest, QuotaLimitsLivePlusLeftover) {
  Cloud cloud = Cloud::Fresh(Topology::kMultiNode);
  Leave(cloud, EntityKind::kRouter, 8);
  EXPECT_EQ(cloud.TryCreate(EntityKind::kRouter), CreateResult::kCreated);
  EXPECT_EQ(cloud.TryCreate(EntityKind::kRouter), CreateResult::kCreated);
  EXPECT_EQ(cloud.TryCreate(EntityKind::kRouter), CreateResult::kQuotaExceeded);
  EXPECT_EQ(cloud.live(EntityKind::kRouter), 2);
  cloud.TryDelete(EntityKind::kRouter);
  EXPECT_EQ(cloud.TryCreate(EntityKind::kRouter), CreateResult::kCreated);
}

TEST(CloudTest, UnlimitedKindsNeverExceed) {
  Cloud cloud = Cloud::Fresh(Topology::kMultiNode);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(cloud.TryCreate(EntityKind::kUser), CreateResult::kCreated);
  }
  EXPECT_EQ(cloud.live(EntityKind::kUser), 1000);
}

TEST(CloudTest, DeleteUnderflowThrows) {
  Cloud cloud = Cloud::Fresh(Topology::kMultiNode);
  EXPECT_THROW(cloud.TryDelete(EntityKind::kPort), LedgerUnderflowError);
  EXPECT_THROW(cloud.MarkLeftover(EntityKind::kPort), LedgerUnderflowError);
}

TEST(CloudTest, QuotaMustBePositive) {
  QuotaTable table = QuotaTable::Default();
  EXPECT_THROW(table.Set(EntityKind::kServer, 0), ConfigError);
  table.Set(EntityKind::kServer, std::nullopt);
  EXPECT_FALSE(table.Get(EntityKind::kServer).has_value());
}

TEST(CloudTest, ServerStepFillsCacheRoundRobin) {
  Cloud cloud = Cloud::Fresh(Topology::kMultiNode);
  for (int i = 0; i < 4; ++i) {
    cloud.ApplyResourceEffects(StepCompleted{EntityKind::kServer});
  }
  cloud.ApplyResourceEffects(StepCompleted{EntityKind::kVolume});
  cloud.ApplyResourceEffects(StepCompleted{});
  EXPECT_EQ(cloud.cache_images().size(), 4u);
  const auto gauges = cloud.Gauges();
  EXPECT_NEAR(gauges[2].disk_used_gb, 20.08, 1e-12);
  EXPECT_NEAR(gauges[3].disk_used_gb, 20.08, 1e-12);
  EXPECT_EQ(gauges[0].disk_used_gb, 30.0);
  EXPECT_NEAR(cloud.cache_disk_used_gb(), 0.16, 1e-12);
}

TEST(CloudTest, CacheCleanupRemovesOldImages) {
  Cloud cloud = Cloud::Fresh(Topology::kAllInOne);
  cloud.ApplyResourceEffects(StepCompleted{EntityKind::kServer});
  cloud.AdvanceTo(3600);
  cloud.ApplyResourceEffects(StepCompleted{EntityKind::kServer});
  cloud.AdvanceTo(24 * 3600.0);
  EXPECT_EQ(cloud.cache_images().size(), 2u);
  cloud.AdvanceTo(24 * 3600.0 + 1);
  EXPECT_EQ(cloud.cache_images().size(), 1u);
  cloud.ApplyResourceEffects(TimeElapsed{3600});
  EXPECT_TRUE(cloud.cache_images().empty());
  EXPECT_EQ(cloud.cache_disk_used_gb(), 0.0);
}

TEST(CloudTest, DiskLeakArithmetic) {
  Cloud cloud = Cloud::Fresh(Topology::kMultiNode);
  for (int i = 0; i < 1123; ++i) {
    cloud.ApplyResourceEffects(StepCompleted{EntityKind::kServer});
  }
  EXPECT_NEAR(cloud.cache_disk_used_gb(), 1123 * 0.04, 1e-3);
}

TEST(CloudTest, MemoryLeakPerWorkload) {
  ResourceParams params;
  params.leak_per_workload_gb = 0.001;
  params.warmup_allocation_gb = 0.0;
  Cloud cloud(Topology::kMultiNode, DefaultNodes(Topology::kMultiNode), params,
              QuotaTable::Default());
  const double before = cloud.Gauges()[0].memory_available_gb;
  for (int i = 0; i < 100; ++i) cloud.ApplyResourceEffects(WorkloadFinished{});
  cloud.ApplyResourceEffects(WorkloadFinished{false});
  EXPECT_NEAR(before - cloud.Gauges()[0].memory_available_gb, 0.1, 1e-12);
  EXPECT_EQ(cloud.AgeingUnits(), 100.0);
}

TEST(CloudTest, SwapGrowsBelowThreshold) {
  ResourceParams params;
  params.leak_per_workload_gb = 0.1;
  params.warmup_allocation_gb = 0.0;
  Cloud cloud(Topology::kAllInOne, DefaultNodes(Topology::kAllInOne), params,
              QuotaTable::Default());
  double last_available = cloud.Gauges()[0].memory_available_gb;
  double last_swap = 0.0;
  for (int i = 0; i < 40; ++i) {
    cloud.ApplyResourceEffects(WorkloadFinished{});
    const NodeGauges g = cloud.Gauges()[0];
    EXPECT_LE(g.memory_available_gb, last_available);
    EXPECT_GE(g.swap_used_gb, last_swap);
    EXPECT_LE(g.swap_used_gb, 4.0);
    last_available = g.memory_available_gb;
    last_swap = g.swap_used_gb;
  }
  EXPECT_GT(last_swap, 0.0);
}

TEST(CloudTest, RejuvenateRestoresState) {
  Cloud cloud = Cloud::Fresh(Topology::kMultiNode);
  Leave(cloud, EntityKind::kServer, 5);
  cloud.TryCreate(EntityKind::kUser);
  for (int i = 0; i < 10; ++i) {
    cloud.ApplyResourceEffects(StepCompleted{EntityKind::kServer});
  }
  for (int i = 0; i < 5000; ++i) cloud.ApplyResourceEffects(WorkloadFinished{});
  cloud.Rejuvenate();
  EXPECT_EQ(cloud.Capacity(), 10);
  for (EntityKind kind : kAllEntityKinds) {
    EXPECT_EQ(cloud.live(kind), 0);
    EXPECT_EQ(cloud.leftover(kind), 0);
  }
  EXPECT_TRUE(cloud.cache_images().empty());
  EXPECT_EQ(cloud.ageing_demand_gb(), 0.0);
  EXPECT_EQ(cloud.clock(), 3600.0);
  EXPECT_EQ(cloud.deployed_at(), 3600.0);
  // Right after rejuvenation, and after warm-up completes, nothing swaps.
  EXPECT_EQ(cloud.Gauges()[0].swap_used_gb, 0.0);
  cloud.AdvanceTo(3 * 3600.0);
  EXPECT_EQ(cloud.Gauges()[0].swap_used_gb, 0.0);
  EXPECT_FALSE(cloud.CheckFailed());
}

TEST(CloudTest, HostResidualPersists) {
  Cloud cloud = Cloud::Fresh(Topology::kMultiNode);
  for (int i = 0; i < 1000; ++i) cloud.ApplyResourceEffects(WorkloadFinished{});
  cloud.Rejuvenate();
  EXPECT_NEAR(cloud.host_residual_gb(), 0.1 * 0.5, 1e-12);
  EXPECT_NEAR(cloud.AgeingUnits(), 100.0, 1e-9);
}

TEST(CloudTest, CheckFailedOnZeroCapacity) {
  Cloud cloud = Cloud::Fresh(Topology::kMultiNode);
  EXPECT_FALSE(cloud.CheckFailed());
  Leave(cloud, EntityKind::kVolume, 10);
  EXPECT_TRUE(cloud.CheckFailed());
  EXPECT_TRUE(cloud.failed());
}

TEST(CloudTest, CheckFailedOnDeployFailure) {
  Cloud cloud = Cloud::Fresh(Topology::kMultiNode);
  cloud.MarkDeployFailed();
  EXPECT_TRUE(cloud.CheckFailed());
  cloud.Rejuvenate();
  EXPECT_FALSE(cloud.CheckFailed());
}

TEST(CloudTest, CheckFailedWhenCacheDiskFull) {
  std::vector<NodeSpec> nodes = DefaultNodes(Topology::kMultiNode);
  nodes[2].disk_base_gb = 0;
  nodes[2].disk_capacity_gb = 1.0;
  Cloud cloud(Topology::kMultiNode, nodes, ResourceParams{},
              QuotaTable::Default());
  int images = 0;
  while (cloud.CanHostImage() || images % 2 == 1) {
    cloud.ApplyResourceEffects(StepCompleted{EntityKind::kServer});
    ++images;
    ASSERT_LT(images, 1000);
  }
  EXPECT_TRUE(cloud.CheckFailed());
  EXPECT_LE(cloud.Gauges()[2].disk_used_gb, 1.0 + 1e-9);
}

TEST(CloudTest, WarmupNoiseOnlyDuringFirstHour) {
  Cloud cloud = Cloud::Fresh(Topology::kMultiNode);
  RandomStream noise(1, "noise");
  const auto exact = cloud.Gauges();
  bool differed = false;
  for (int i = 0; i < 10; ++i) {
    differed |= cloud.ReadGauges(noise)[0].memory_available_gb !=
                exact[0].memory_available_gb;
  }
  EXPECT_TRUE(differed);
  cloud.AdvanceTo(7200);
  const uint64_t draws = noise.draws();
  EXPECT_EQ(cloud.ReadGauges(noise)[0].memory_available_gb,
            cloud.Gauges()[0].memory_available_gb);
  EXPECT_EQ(noise.draws(), draws);
}

TEST(CloudTest, RejectsBadConfiguration) {
  std::vector<NodeSpec> nodes = DefaultNodes(Topology::kMultiNode);
  nodes.erase(nodes.begin() + 2, nodes.end());
  EXPECT_THROW(Cloud(Topology::kMultiNode, nodes, ResourceParams{},
                     QuotaTable::Default()),
               ConfigError);
  ResourceParams params;
  params.swap_share = 2.0;
  EXPECT_THROW(params.Validate(), ConfigError);
  EXPECT_THROW(Cloud(Topology::kMultiNode, {}, ResourceParams{},
                     QuotaTable::Default()),
               ConfigError);
}

}  // namespace
}  // namespace agesim
