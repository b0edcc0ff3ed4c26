/* Copyright 2026 The PromptSwitch Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <map>
#include <string>
#include <vector>

#include "ps/registry.hpp"
#include "ps/router.hpp"
#include "ps/scoring.hpp"

namespace ps {

enum class NormalizationScope {
  Global,      // pool candidate windows before normalizing (default)
  PerService,  // normalize each candidate against its own window only
};

struct ScalingPolicy {
  double evaluation_period = 10.0;
  double cooldown = 60.0;       // gates scale-up only
  double idle_threshold = 300.0;  // tau
  std::map<ModelTier, int> warm_pool_by_tier = {
      {ModelTier::Small, 1}, {ModelTier::Medium, 1}, {ModelTier::Large, 0}};
  int max_replicas_per_model = 8;
  bool allow_cold_start = true;
  double cold_start_timeout = 120.0;
  NormalizationScope normalization_scope = NormalizationScope::Global;
  ScoreRule score_rule = ScoreRule::Convex;

  int warm_floor(ModelTier tier) const {
    auto it = warm_pool_by_tier.find(tier);
    return it != warm_pool_by_tier.end() ? it->second : 0;
  }
};

struct ReplicaState {
  std::string model_id;
  int current_replicas = 0;
  int target_replicas = 0;
  double last_scale_up_time = -1e18;
  double last_request_time = 0.0;
};

enum class ScaleReason { ScaleUp, IdleScaleDown, WarmFloor };
const char* to_string(ScaleReason r);

struct ScaleCommand {
  std::string model_id;
  int new_replica_count = 0;
  ScaleReason reason = ScaleReason::ScaleUp;
};

// Little's-Law capacity target: ceil(rate * latency / concurrency).
int plan_target(double rate, double latency, int concurrency);

// Audit record of one routing decision.
struct RoutingDecision {
  std::string prompt_id;
  std::string service_id;
  std::string model_id;
  ModelTier tier = ModelTier::Small;
  double score = 0.0;
  ScoreComponents components;
  ClassifierOutput classifier_output;
  bool cold_start = false;
  double decided_at = 0.0;
  std::string profile_name;
  double unit_cost = 0.0;
  double latency_estimate = 0.0;
};

// One candidate's scored view during selection.
struct CandidateScore {
  const ServiceInstance* service = nullptr;
  ScoreComponents components;
  double latency_estimate = 0.0;
  double score = 0.0;
};

// Periodic scaling loop plus per-request matrix selection. The tick is a
// single-actor operation; selection is pure over snapshots and safe to
// run from any number of concurrent request handlers.
class Orchestrator {
 public:
  Orchestrator(ScalingPolicy policy, RelevanceTable table);

  // Seeds per-model replica state; idle timers start at start_time so an
  // empty workload still converges to warm floors after tau.
  void init_models(const std::vector<ModelSpec>& models, double start_time);

  void note_request(const std::string& model_id, double timestamp);

  // One pass of the scaling loop. Emits at most one command per model and
  // stamps the cooldown clock on every ScaleUp it emits.
  std::vector<ScaleCommand> scaling_tick(const RegistrySnapshot& snapshot,
                                         double now);

  // Scores every healthy candidate against the classifier output.
  // Zero-replica candidates get the cold start surcharge added to their
  // latency estimate before normalization. Empty result means no healthy
  // candidate exists.
  std::vector<CandidateScore> score_candidates(const RegistrySnapshot& snapshot,
                                               const WeightProfile& profile,
                                               const ClassifierOutput& output) const;

  RoutingDecision make_decision(const Prompt& prompt,
                                const CandidateScore& candidate,
                                const WeightProfile& profile,
                                const ClassifierOutput& output,
                                double now) const;

  // score_candidates + argmax per select_best's tie rules.
  RoutingDecision select_service(const Prompt& prompt,
                                 const RegistrySnapshot& snapshot,
                                 const WeightProfile& profile,
                                 const ClassifierOutput& output,
                                 double now) const;

  const ScalingPolicy& policy() const { return policy_; }
  const RelevanceTable& relevance_table() const { return table_; }
  const ReplicaState* state(const std::string& model_id) const;

 private:
  ScalingPolicy policy_;
  RelevanceTable table_;
  std::map<std::string, ReplicaState> states_;
  std::map<std::string, ModelTier> tiers_;
};

// Rebuilds the Eq-style convex score from a decision's stored parts;
// used to audit decision logs.
double recompute_decision_score(const RoutingDecision& decision,
                                const WeightProfile& profile,
                                ScoreRule rule = ScoreRule::Convex);

}  // namespace ps
