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

#include "agesim/config.h"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <utility>

#include <fmt/format.h>

#include "agesim/errors.h"
#include "json_util.h"

namespace agesim {
namespace {

using internal::Json;

void CheckKeys(const Json& obj, std::string_view where,
               std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(fmt::format("{}: expected an object", where));
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || key == a;
    if (!known) throw ConfigError(fmt::format("{}: unknown key '{}'", where, key));
  }
}

template <typename T>
void Read(const Json& obj, const char* key, T* out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    *out = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(fmt::format("'{}' has the wrong type", key));
  }
}

std::string ReadString(const Json& obj, const char* key) {
  std::string s;
  Read(obj, key, &s);
  return s;
}

std::optional<NodeRole> ParseNodeRole(std::string_view name) {
  for (NodeRole r : {NodeRole::kControl, NodeRole::kMonitoring,
                     NodeRole::kCompute, NodeRole::kAllInOne}) {
    if (NodeRoleName(r) == name) return r;
  }
  return std::nullopt;
}

std::string_view ContentionName(Contention c) {
  return c == Contention::kNone ? "none" : "linear-sharing";
}

void ParseResources(const Json& j, ResourceParams* r) {
  CheckKeys(j, "resources",
            {"image_size_gb", "cache_max_age_s", "leak_per_workload_gb",
             "retention_per_leftover_gb", "swap_threshold_gb", "swap_share",
             "warmup_allocation_gb", "warmup_noise_gb",
             "warmup_after_rejuvenation", "host_retention_fraction",
             "rejuvenation_duration_s"});
  Read(j, "image_size_gb", &r->image_size_gb);
  Read(j, "cache_max_age_s", &r->cache_max_age_s);
  Read(j, "leak_per_workload_gb", &r->leak_per_workload_gb);
  Read(j, "retention_per_leftover_gb", &r->retention_per_leftover_gb);
  Read(j, "swap_threshold_gb", &r->swap_threshold_gb);
  Read(j, "swap_share", &r->swap_share);
  Read(j, "warmup_allocation_gb", &r->warmup_allocation_gb);
  Read(j, "warmup_noise_gb", &r->warmup_noise_gb);
  Read(j, "warmup_after_rejuvenation", &r->warmup_after_rejuvenation);
  Read(j, "host_retention_fraction", &r->host_retention_fraction);
  Read(j, "rejuvenation_duration_s", &r->rejuvenation_duration_s);
}

void ParseService(const Json& j, ServiceParams* s) {
  CheckKeys(j, "service",
            {"ageing_rate", "service_slots", "contention", "failed_attempt_s",
             "waiting_load_weight"});
  Read(j, "ageing_rate", &s->ageing_rate);
  Read(j, "service_slots", &s->service_slots);
  Read(j, "failed_attempt_s", &s->failed_attempt_s);
  Read(j, "waiting_load_weight", &s->waiting_load_weight);
  if (j.contains("contention")) {
    const std::string c = ReadString(j, "contention");
    if (c == "none") {
      s->contention = Contention::kNone;
    } else if (c == "linear-sharing") {
      s->contention = Contention::kLinearSharing;
    } else {
      throw ConfigError(fmt::format("unknown contention model '{}'", c));
    }
  }
}

NodeSpec ParseNode(const Json& j) {
  CheckKeys(j, "node",
            {"name", "role", "memory_available_gb", "swap_capacity_gb",
             "disk_base_gb", "disk_capacity_gb"});
  NodeSpec node;
  node.name = ReadString(j, "name");
  const std::string role = ReadString(j, "role");
  auto parsed = ParseNodeRole(role);
  if (!parsed) throw ConfigError(fmt::format("unknown node role '{}'", role));
  node.role = *parsed;
  Read(j, "memory_available_gb", &node.memory_available_gb);
  Read(j, "swap_capacity_gb", &node.swap_capacity_gb);
  Read(j, "disk_base_gb", &node.disk_base_gb);
  Read(j, "disk_capacity_gb", &node.disk_capacity_gb);
  return node;
}

StepSpec ParseStep(const Json& j) {
  CheckKeys(j, "step",
            {"name", "module", "action", "kind", "depends_on", "undo",
             "base_time_s"});
  StepSpec step;
  step.name = ReadString(j, "name");
  const std::string module = ReadString(j, "module");
  auto m = ParseServiceModule(module);
  if (!m) throw ConfigError(fmt::format("unknown module '{}'", module));
  step.module = *m;
  const std::string action = ReadString(j, "action");
  auto a = ParseActionType(action);
  if (!a) throw ConfigError(fmt::format("unknown action '{}'", action));
  step.action = *a;
  if (j.contains("kind") && !j["kind"].is_null()) {
    const std::string kind = ReadString(j, "kind");
    auto k = ParseEntityKind(kind);
    if (!k) throw ConfigError(fmt::format("unknown entity kind '{}'", kind));
    step.kind = *k;
  }
  Read(j, "depends_on", &step.depends_on);
  if (j.contains("undo") && !j["undo"].is_null()) step.undo = ReadString(j, "undo");
  Read(j, "base_time_s", &step.base_time_s);
  return step;
}

WorkloadDefinition ParseWorkload(const Json& j) {
  CheckKeys(j, "workload", {"steps"});
  if (!j.contains("steps") || !j["steps"].is_array()) {
    throw ConfigError("workload: 'steps' must be an array");
  }
  std::vector<StepSpec> steps;
  for (const Json& s : j["steps"]) steps.push_back(ParseStep(s));
  return WorkloadDefinition(std::move(steps));
}

Json ParseDocument(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(fmt::format("invalid JSON: {}", e.what()));
  }
}

}  // namespace

namespace internal {

Json ConfigToJsonValue(const ScenarioConfig& c) {
  Json j;
  j["scenario_id"] = c.scenario_id;
  j["topology"] = TopologyName(c.topology);
  j["concurrency"] = c.concurrency;
  j["stress_hours"] = c.stress_hours;
  j["post_rejuvenation_hours"] = c.post_rejuvenation_hours;
  j["seed"] = c.seed;
  j["policy"] = PolicyName(c.policy);
  j["phases"] = FormatPhaseList(c.EffectivePhases());

  Json probs = Json::object();
  for (const auto& [step, errors] : c.faults.probabilities) {
    for (const auto& [error, p] : errors) probs[step][error] = p;
  }
  j["faults"] = {{"probabilities", probs},
                 {"deploy_failure_probability",
                  c.faults.deploy_failure_probability}};

  const ResourceParams& r = c.resources;
  j["resources"] = {
      {"image_size_gb", r.image_size_gb},
      {"cache_max_age_s", r.cache_max_age_s},
      {"leak_per_workload_gb", r.leak_per_workload_gb},
      {"retention_per_leftover_gb", r.retention_per_leftover_gb},
      {"swap_threshold_gb", r.swap_threshold_gb},
      {"swap_share", r.swap_share},
      {"warmup_allocation_gb", r.warmup_allocation_gb},
      {"warmup_noise_gb", r.warmup_noise_gb},
      {"warmup_after_rejuvenation", r.warmup_after_rejuvenation},
      {"host_retention_fraction", r.host_retention_fraction},
      {"rejuvenation_duration_s", r.rejuvenation_duration_s},
  };
  const ServiceParams& s = c.service;
  j["service"] = {
      {"ageing_rate", s.ageing_rate},
      {"service_slots", s.service_slots},
      {"contention", ContentionName(s.contention)},
      {"failed_attempt_s", s.failed_attempt_s},
      {"waiting_load_weight", s.waiting_load_weight},
  };

  Json nodes = Json::array();
  for (const NodeSpec& n :
       c.nodes.empty() ? DefaultNodes(c.topology) : c.nodes) {
    nodes.push_back({{"name", n.name},
                     {"role", NodeRoleName(n.role)},
                     {"memory_available_gb", n.memory_available_gb},
                     {"swap_capacity_gb", n.swap_capacity_gb},
                     {"disk_base_gb", n.disk_base_gb},
                     {"disk_capacity_gb", n.disk_capacity_gb}});
  }
  j["nodes"] = nodes;

  Json quotas = Json::object();
  for (EntityKind k : kAllEntityKinds) {
    auto q = c.quotas.Get(k);
    quotas[std::string(EntityKindName(k))] = q ? Json(*q) : Json(nullptr);
  }
  j["quotas"] = quotas;

  if (c.workload) {
    Json steps = Json::array();
    for (const StepSpec& st : c.workload->steps()) {
      Json sj = {{"name", st.name},
                 {"module", ServiceModuleName(st.module)},
                 {"action", ActionTypeName(st.action)}};
      if (st.kind) sj["kind"] = EntityKindName(*st.kind);
      sj["depends_on"] = st.depends_on;
      if (st.undo) sj["undo"] = *st.undo;
      sj["base_time_s"] = st.base_time_s;
      steps.push_back(std::move(sj));
    }
    j["workload"] = {{"steps", steps}};
  }
  return j;
}

}  // namespace internal

ScenarioConfig ParseScenarioConfig(std::string_view json_text) {
  const Json j = ParseDocument(json_text);
  CheckKeys(j, "scenario",
            {"scenario_id", "topology", "concurrency", "stress_hours",
             "post_rejuvenation_hours", "seed", "policy", "phases", "faults",
             "resources", "service", "nodes", "quotas", "workload"});

  Topology topology = Topology::kMultiNode;
  if (j.contains("topology")) {
    const std::string name = ReadString(j, "topology");
    auto t = ParseTopology(name);
    if (!t) throw ConfigError(fmt::format("unknown topology '{}'", name));
    topology = *t;
  }
  int concurrency = 1;
  Read(j, "concurrency", &concurrency);
  ScenarioConfig c = DefaultConfig(topology, concurrency);

  Read(j, "scenario_id", &c.scenario_id);
  Read(j, "stress_hours", &c.stress_hours);
  Read(j, "post_rejuvenation_hours", &c.post_rejuvenation_hours);
  Read(j, "seed", &c.seed);
  if (j.contains("policy")) {
    const std::string name = ReadString(j, "policy");
    auto p = ParsePolicy(name);
    if (!p) throw ConfigError(fmt::format("unknown policy '{}'", name));
    c.policy = *p;
  }
  if (j.contains("phases")) c.phases = ParsePhaseList(ReadString(j, "phases"));

  if (j.contains("faults")) {
    const Json& f = j["faults"];
    CheckKeys(f, "faults", {"probabilities", "deploy_failure_probability"});
    Read(f, "deploy_failure_probability", &c.faults.deploy_failure_probability);
    if (f.contains("probabilities")) {
      const Json& probs = f["probabilities"];
      if (!probs.is_object()) throw ConfigError("faults.probabilities must be an object");
      for (const auto& [step, errors] : probs.items()) {
        if (!errors.is_object()) {
          throw ConfigError(fmt::format("faults for '{}' must be an object", step));
        }
        for (const auto& [error, p] : errors.items()) {
          if (!p.is_number()) {
            throw ConfigError(fmt::format("probability {}/{} must be a number", step, error));
          }
          c.faults.probabilities[step][error] = p.get<double>();
        }
      }
    }
  }
  if (j.contains("resources")) ParseResources(j["resources"], &c.resources);
  if (j.contains("service")) ParseService(j["service"], &c.service);
  if (j.contains("nodes")) {
    if (!j["nodes"].is_array()) throw ConfigError("'nodes' must be an array");
    for (const Json& n : j["nodes"]) c.nodes.push_back(ParseNode(n));
  }
  if (j.contains("quotas")) {
    const Json& q = j["quotas"];
    if (!q.is_object()) throw ConfigError("'quotas' must be an object");
    for (const auto& [name, limit] : q.items()) {
      auto kind = ParseEntityKind(name);
      if (!kind) throw ConfigError(fmt::format("unknown entity kind '{}'", name));
      if (limit.is_null()) {
        c.quotas.Set(*kind, std::nullopt);
      } else if (limit.is_number_integer()) {
        c.quotas.Set(*kind, limit.get<int64_t>());
      } else {
        throw ConfigError(fmt::format("quota for {} must be an integer or null", name));
      }
    }
  }
  if (j.contains("workload")) c.workload = ParseWorkload(j["workload"]);

  // Fault names and probabilities are checked here so a bad document fails
  // before any simulation starts.
  FaultModel probe(c.seed);
  for (const auto& [step, errors] : c.faults.probabilities) {
    for (const auto& [error, p] : errors) probe.SetProbability(step, error, p);
  }
  probe.set_deploy_failure_probability(c.faults.deploy_failure_probability);
  const WorkloadDefinition defn =
      c.workload ? *c.workload : WorkloadDefinition::Default();
  const std::vector<std::string> names = defn.StepNames();
  probe.BindSteps(names);
  ValidateFaults(defn, probe);
  c.Validate();
  return c;
}

ScenarioConfig LoadScenarioConfig(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read {}", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError(fmt::format("cannot read {}", path.string()));
  return ParseScenarioConfig(buf.str());
}

std::string ScenarioConfigToJson(const ScenarioConfig& config) {
  return internal::ConfigToJsonValue(config).dump(2) + "\n";
}

WorkloadDefinition ParseWorkloadDefinition(std::string_view json_text) {
  return ParseWorkload(ParseDocument(json_text));
}

}  // namespace agesim
