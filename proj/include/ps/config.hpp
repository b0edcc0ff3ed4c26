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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ps/orchestrator.hpp"
#include "ps/registry.hpp"
#include "ps/router.hpp"
#include "ps/scoring.hpp"
#include "ps/trace.hpp"

namespace ps {

struct TokenDistribution {
  enum class Kind { Fixed, Uniform, LogNormal };
  Kind kind = Kind::Fixed;
  double a = 100.0;  // fixed count / uniform low / lognormal log-mean
  double b = 0.0;    // uniform high / lognormal log-sigma
};

// One deployable cell of the matrix together with its simulator behavior
// and (in proxy mode) its upstream endpoint.
struct ServiceCellConfig {
  std::string model_id;
  std::string backend_id;
  double unit_cost = 0.01;
  double latency_prior = 1.0;
  int concurrency_per_replica = 4;
  int initial_replicas = 1;
  double cold_start_duration = 12.0;
  double base_ttft = 0.5;
  double per_token_latency = 0.02;
  TokenDistribution output_tokens;
  double failure_probability = 0.0;
  double replica_cost_per_hour = 0.0;
  std::string proxy_url;  // proxy mode only
};

enum class RouterMode { Keyword, Semantic, Hybrid };
const char* to_string(RouterMode m);
std::optional<RouterMode> router_mode_from_string(std::string_view s);

struct RouterConfig {
  RouterMode mode = RouterMode::Hybrid;
  double confidence_threshold = 0.6;
  std::size_t token_low_threshold = 64;
  std::size_t token_high_threshold = 256;
  KeywordRuleSet keyword_rules = KeywordRuleSet::defaults();
  RelevanceTable relevance_table = RelevanceTable::defaults();
  std::string classifier_artifact;  // optional path
};

struct EngineConfig {
  std::vector<ModelSpec> models;
  std::vector<BackendSpec> backends;
  std::vector<ServiceCellConfig> services;
  std::vector<WeightProfile> profiles;  // defaults ship the standard four
  std::string default_profile = "balanced";
  ScalingPolicy policy;
  RouterConfig router;
  double telemetry_window = 300.0;

  const WeightProfile& profile(const std::string& name) const;
  const ModelSpec& model(const std::string& model_id) const;
  void validate() const;
};

std::vector<WeightProfile> default_profiles();

struct ArrivalConfig {
  enum class Kind { FixedRate, Poisson, Replay, Synthetic, Bursty };
  Kind kind = Kind::Synthetic;
  double rate = 5.0;                   // fixed-rate / poisson
  std::size_t count = 0;               // 0: run to horizon
  std::string trace_path;              // replay
  SyntheticTraceSpec synthetic;        // synthetic
  BurstyTraceSpec bursty;              // bursty
};

enum class ScalingMode { Static, Dynamic };
const char* to_string(ScalingMode m);

struct ScenarioConfig {
  EngineConfig engine;
  ArrivalConfig arrivals;
  double horizon = 600.0;
  std::uint64_t seed = 1;
  ScalingMode scaling_mode = ScalingMode::Static;
};

struct GatewayConfig {
  EngineConfig engine;
  std::string listen_address = "127.0.0.1";
  int port = 8080;
  std::string mode = "simulated";  // simulated | proxy
  std::string decision_log_path = "decisions.jsonl";
  bool return_routing_metadata = true;
  double overhead_budget_ms = 5.0;
  double request_timeout = 120.0;
  int max_output_tokens = 2048;
  std::uint64_t seed = 1;
};

// Loaders. All throw ConfigError with the offending key on bad input.
EngineConfig load_engine_config(const nlohmann::json& j,
                                const std::filesystem::path& base_dir);
ScenarioConfig load_scenario_config(const std::filesystem::path& path);
// Applies PS_-prefixed environment overrides (PS_LISTEN, PS_PORT, PS_MODE,
// PS_DECISION_LOG, PS_CLASSIFIER) after parsing.
GatewayConfig load_gateway_config(const std::filesystem::path& path);

KeywordRuleSet load_keyword_rules(const std::filesystem::path& path);

}  // namespace ps
