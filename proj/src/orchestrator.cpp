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

#include "ps/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ps/errors.hpp"

namespace ps {

const char* to_string(ScaleReason r) {
  switch (r) {
    case ScaleReason::ScaleUp: return "scale_up";
    case ScaleReason::IdleScaleDown: return "idle_scale_down";
    case ScaleReason::WarmFloor: return "warm_floor";
  }
  return "unknown";
}

int plan_target(double rate, double latency, int concurrency) {
  if (concurrency < 1) {
    throw std::invalid_argument("concurrency must be >= 1");
  }
  if (rate < 0.0 || latency < 0.0) {
    throw std::invalid_argument("rate and latency must be non-negative");
  }
  return static_cast<int>(std::ceil(rate * latency / concurrency));
}

Orchestrator::Orchestrator(ScalingPolicy policy, RelevanceTable table)
    : policy_(std::move(policy)), table_(table) {
  table_.validate();
}

void Orchestrator::init_models(const std::vector<ModelSpec>& models,
                               double start_time) {
  for (const auto& m : models) {
    ReplicaState st;
    st.model_id = m.model_id;
    st.last_request_time = start_time;
    states_[m.model_id] = st;
    tiers_[m.model_id] = m.tier;
  }
}

void Orchestrator::note_request(const std::string& model_id,
                                double timestamp) {
  auto it = states_.find(model_id);
  if (it != states_.end()) {
    it->second.last_request_time =
        std::max(it->second.last_request_time, timestamp);
  }
}

const ReplicaState* Orchestrator::state(const std::string& model_id) const {
  auto it = states_.find(model_id);
  return it != states_.end() ? &it->second : nullptr;
}

std::vector<ScaleCommand> Orchestrator::scaling_tick(
    const RegistrySnapshot& snapshot, double now) {
  std::vector<ScaleCommand> commands;
  for (auto& [model_id, st] : states_) {
    const auto row = snapshot.model_row(model_id);
    if (row.empty()) continue;

    // Row-aggregated telemetry: rates sum, latency is the success-weighted
    // mean across cells, mean prior when the row has no samples yet.
    double rate = 0.0;
    double success_sum = 0.0;
    std::size_t success_count = 0;
    double prior_sum = 0.0;
    int current = 0;
    int concurrency = 0;
    for (const ServiceInstance* s : row) {
      rate += s->request_rate;
      success_sum += s->window_success_latency_sum;
      success_count += s->window_success_count;
      prior_sum += s->latency_prior;
      current += s->replicas;
      concurrency = std::max(concurrency, s->concurrency_per_replica);
    }
    const double latency =
        success_count > 0 ? success_sum / static_cast<double>(success_count)
                          : prior_sum / static_cast<double>(row.size());
    if (concurrency < 1) concurrency = 1;

    const int target = plan_target(rate, latency, concurrency);
    const int floor = policy_.warm_floor(tiers_[model_id]);
    st.current_replicas = current;
    st.target_replicas = target;

    if (target > current && now - st.last_scale_up_time >= policy_.cooldown) {
      const int scaled = std::min(std::max(target, floor),
                                  policy_.max_replicas_per_model);
      if (scaled != current) {
        commands.push_back({model_id, scaled, ScaleReason::ScaleUp});
        st.last_scale_up_time = now;
      }
    } else if (now - st.last_request_time > policy_.idle_threshold) {
      const int scaled = std::max(0, floor);
      if (scaled != current) {
        commands.push_back({model_id, scaled,
                            scaled > current ? ScaleReason::WarmFloor
                                             : ScaleReason::IdleScaleDown});
      }
    }
  }
  return commands;
}

std::vector<CandidateScore> Orchestrator::score_candidates(
    const RegistrySnapshot& snapshot, const WeightProfile& profile,
    const ClassifierOutput& output) const {
  const auto candidates =
      healthy_candidates(snapshot, policy_.allow_cold_start);

  // Pool candidate windows so metrics normalize across the matrix rather
  // than against each service's own history.
  NormalizationStats pooled_latency;
  NormalizationStats pooled_cost;
  if (policy_.normalization_scope == NormalizationScope::Global) {
    for (const ServiceInstance* s : candidates) {
      pooled_latency.merge(s->latency_stats);
      pooled_cost.merge(s->cost_stats);
    }
  }

  std::vector<CandidateScore> scored;
  scored.reserve(candidates.size());
  for (const ServiceInstance* s : candidates) {
    CandidateScore cs;
    cs.service = s;
    cs.latency_estimate = s->avg_latency;
    if (s->replicas == 0) cs.latency_estimate += s->cold_start_duration;

    const NormalizationStats& lat_stats =
        policy_.normalization_scope == NormalizationScope::Global
            ? pooled_latency
            : s->latency_stats;
    const NormalizationStats& cost_stats =
        policy_.normalization_scope == NormalizationScope::Global
            ? pooled_cost
            : s->cost_stats;

    cs.components.relevance_hat = relevance(output, s->tier, table_);
    cs.components.latency_hat =
        1.0 - normalize_metric(cs.latency_estimate, lat_stats);
    cs.components.cost_hat = 1.0 - normalize_metric(s->unit_cost, cost_stats);
    cs.score = score(cs.components, profile, policy_.score_rule);
    scored.push_back(cs);
  }
  return scored;
}

RoutingDecision Orchestrator::make_decision(const Prompt& prompt,
                                            const CandidateScore& candidate,
                                            const WeightProfile& profile,
                                            const ClassifierOutput& output,
                                            double now) const {
  RoutingDecision decision;
  decision.prompt_id = prompt.id;
  decision.service_id = candidate.service->service_id;
  decision.model_id = candidate.service->model_id;
  decision.tier = candidate.service->tier;
  decision.components = candidate.components;
  decision.score = candidate.score;
  decision.classifier_output = output;
  decision.cold_start = candidate.service->replicas == 0;
  decision.decided_at = now;
  decision.profile_name = profile.name;
  decision.unit_cost = candidate.service->unit_cost;
  decision.latency_estimate = candidate.latency_estimate;
  return decision;
}

RoutingDecision Orchestrator::select_service(const Prompt& prompt,
                                             const RegistrySnapshot& snapshot,
                                             const WeightProfile& profile,
                                             const ClassifierOutput& output,
                                             double now) const {
  const auto scored = score_candidates(snapshot, profile, output);
  if (scored.empty()) {
    throw NoHealthyServiceError("no healthy service for prompt " + prompt.id);
  }

  std::vector<ScoredCandidate> flat;
  flat.reserve(scored.size());
  for (const auto& cs : scored) {
    flat.push_back(
        {cs.service->service_id, cs.components, cs.service->unit_cost});
  }
  const ScoredCandidate& best = select_best(flat, profile, policy_.score_rule);
  const std::size_t idx = static_cast<std::size_t>(&best - flat.data());
  return make_decision(prompt, scored[idx], profile, output, now);
}

double recompute_decision_score(const RoutingDecision& decision,
                                const WeightProfile& profile, ScoreRule rule) {
  return score(decision.components, profile, rule);
}

}  // namespace ps
