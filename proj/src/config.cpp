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

#include "ps/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "ps/errors.hpp"

namespace ps {

namespace {

using nlohmann::json;

json load_json_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config: " + path.string());
  try {
    return json::parse(is, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw ConfigError("bad json in " + path.string() + ": " + e.what());
  }
}

ModelTier parse_tier(const json& j, const std::string& ctx) {
  const auto t = tier_from_string(j.get<std::string>());
  if (!t) throw ConfigError(ctx + ": unknown tier '" + j.get<std::string>() + "'");
  return *t;
}

TokenDistribution parse_token_distribution(const json& j) {
  TokenDistribution d;
  if (j.is_number()) {
    d.kind = TokenDistribution::Kind::Fixed;
    d.a = j.get<double>();
    return d;
  }
  const std::string kind = j.value("kind", "fixed");
  if (kind == "fixed") {
    d.kind = TokenDistribution::Kind::Fixed;
    d.a = j.value("tokens", 100.0);
  } else if (kind == "uniform") {
    d.kind = TokenDistribution::Kind::Uniform;
    d.a = j.value("low", 50.0);
    d.b = j.value("high", 150.0);
    if (d.b < d.a) throw ConfigError("uniform token range: high < low");
  } else if (kind == "lognormal") {
    d.kind = TokenDistribution::Kind::LogNormal;
    d.a = j.value("log_mean", 4.5);
    d.b = j.value("log_sigma", 0.5);
  } else {
    throw ConfigError("unknown token distribution kind '" + kind + "'");
  }
  return d;
}

KeywordRuleSet parse_keyword_rules(const json& j) {
  KeywordRuleSet rules;
  rules.low_keywords = j.value("low_keywords", std::vector<std::string>{});
  rules.high_keywords = j.value("high_keywords", std::vector<std::string>{});
  rules.validate();
  return rules;
}

RelevanceTable parse_relevance_table(const json& j) {
  RelevanceTable table = RelevanceTable::defaults();
  for (int c = 0; c < 3; ++c) {
    const char* row = to_string(static_cast<ComplexityClass>(c));
    if (!j.contains(row)) continue;
    const json& jr = j.at(row);
    for (int t = 0; t < 3; ++t) {
      const char* col = to_string(static_cast<ModelTier>(t));
      if (jr.contains(col)) table.value[c][t] = jr.at(col).get<double>();
    }
  }
  table.validate();
  return table;
}

ScalingPolicy parse_policy(const json& j) {
  ScalingPolicy p;
  p.evaluation_period = j.value("evaluation_period", p.evaluation_period);
  p.cooldown = j.value("cooldown", p.cooldown);
  p.idle_threshold = j.value("idle_threshold", p.idle_threshold);
  p.max_replicas_per_model =
      j.value("max_replicas_per_model", p.max_replicas_per_model);
  p.allow_cold_start = j.value("allow_cold_start", p.allow_cold_start);
  p.cold_start_timeout = j.value("cold_start_timeout", p.cold_start_timeout);
  if (j.contains("warm_pool_by_tier")) {
    for (const auto& [key, value] : j.at("warm_pool_by_tier").items()) {
      const auto tier = tier_from_string(key);
      if (!tier) throw ConfigError("policy: unknown tier '" + key + "'");
      p.warm_pool_by_tier[*tier] = value.get<int>();
    }
  }
  const std::string scope = j.value("normalization_scope", "global");
  if (scope == "global") {
    p.normalization_scope = NormalizationScope::Global;
  } else if (scope == "per_service") {
    p.normalization_scope = NormalizationScope::PerService;
  } else {
    throw ConfigError("policy: unknown normalization_scope '" + scope + "'");
  }
  const std::string rule = j.value("score_rule", "convex");
  if (rule == "convex") {
    p.score_rule = ScoreRule::Convex;
  } else if (rule == "legacy_raw") {
    p.score_rule = ScoreRule::LegacyRaw;
  } else {
    throw ConfigError("policy: unknown score_rule '" + rule + "'");
  }
  if (!(p.evaluation_period > 0.0)) {
    throw ConfigError("policy: evaluation_period must be > 0");
  }
  if (p.cooldown < 0.0) throw ConfigError("policy: cooldown must be >= 0");
  if (!(p.idle_threshold > 0.0)) {
    throw ConfigError("policy: idle_threshold must be > 0");
  }
  return p;
}

}  // namespace

const char* to_string(RouterMode m) {
  switch (m) {
    case RouterMode::Keyword: return "keyword";
    case RouterMode::Semantic: return "semantic";
    case RouterMode::Hybrid: return "hybrid";
  }
  return "unknown";
}

std::optional<RouterMode> router_mode_from_string(std::string_view s) {
  if (s == "keyword") return RouterMode::Keyword;
  if (s == "semantic") return RouterMode::Semantic;
  if (s == "hybrid") return RouterMode::Hybrid;
  return std::nullopt;
}

const char* to_string(ScalingMode m) {
  return m == ScalingMode::Static ? "static" : "dynamic";
}

std::vector<WeightProfile> default_profiles() {
  return {
      {"quality", 1.0, 0.1, 0.1},
      {"cost", 0.3, 0.2, 0.8},
      {"speed", 0.3, 0.8, 0.2},
      {"balanced", 0.5, 0.3, 0.3},
  };
}

const WeightProfile& EngineConfig::profile(const std::string& name) const {
  for (const auto& p : profiles) {
    if (p.name == name) return p;
  }
  throw NotFoundError("unknown profile: " + name);
}

const ModelSpec& EngineConfig::model(const std::string& model_id) const {
  for (const auto& m : models) {
    if (m.model_id == model_id) return m;
  }
  throw NotFoundError("unknown model: " + model_id);
}

void EngineConfig::validate() const {
  if (models.empty()) throw ConfigError("no models configured");
  if (backends.empty()) throw ConfigError("no backends configured");
  if (services.empty()) throw ConfigError("no service cells configured");
  std::set<std::string> model_ids;
  for (const auto& m : models) {
    if (!model_ids.insert(m.model_id).second) {
      throw ConfigError("duplicate model id: " + m.model_id);
    }
    if (m.warm_pool_floor < 0) {
      throw ConfigError("warm_pool_floor must be >= 0 for " + m.model_id);
    }
  }
  std::set<std::string> backend_ids;
  for (const auto& b : backends) {
    if (!backend_ids.insert(b.backend_id).second) {
      throw ConfigError("duplicate backend id: " + b.backend_id);
    }
    for (int ordinal : {b.throughput_class, b.latency_class, b.memory_class}) {
      if (ordinal < 1 || ordinal > 3) {
        throw ConfigError("backend class ordinals must be in {1,2,3} for " +
                          b.backend_id);
      }
    }
  }
  std::set<std::string> cell_ids;
  for (const auto& s : services) {
    if (model_ids.count(s.model_id) == 0) {
      throw ConfigError("service references unknown model: " + s.model_id);
    }
    if (backend_ids.count(s.backend_id) == 0) {
      throw ConfigError("service references unknown backend: " + s.backend_id);
    }
    if (!cell_ids.insert(make_service_id(s.model_id, s.backend_id)).second) {
      throw ConfigError("duplicate service cell: " +
                        make_service_id(s.model_id, s.backend_id));
    }
    if (s.concurrency_per_replica < 1) {
      throw ConfigError("concurrency_per_replica must be >= 1");
    }
    if (s.failure_probability < 0.0 || s.failure_probability > 1.0) {
      throw ConfigError("failure_probability must be in [0,1]");
    }
    if (s.base_ttft < 0.0 || s.per_token_latency < 0.0 ||
        s.cold_start_duration < 0.0) {
      throw ConfigError("durations must be >= 0");
    }
  }
  if (profiles.empty()) throw ConfigError("no weight profiles configured");
  for (const auto& p : profiles) {
    normalize_weights(p);  // throws on invalid coefficients
  }
  profile(default_profile);  // must exist
  router.keyword_rules.validate();
  router.relevance_table.validate();
}

EngineConfig load_engine_config(const json& j,
                                const std::filesystem::path& base_dir) {
  EngineConfig cfg;
  if (!j.contains("models")) throw ConfigError("config: missing 'models'");
  for (const auto& jm : j.at("models")) {
    ModelSpec m;
    m.model_id = jm.at("model_id").get<std::string>();
    m.tier = parse_tier(jm.at("tier"), "model " + m.model_id);
    m.parameter_count = jm.value("parameter_count", std::int64_t{0});
    m.warm_pool_floor = jm.value("warm_pool_floor", 0);
    cfg.models.push_back(std::move(m));
  }
  if (!j.contains("backends")) throw ConfigError("config: missing 'backends'");
  for (const auto& jb : j.at("backends")) {
    BackendSpec b;
    b.backend_id = jb.at("backend_id").get<std::string>();
    b.throughput_class = jb.value("throughput_class", 2);
    b.latency_class = jb.value("latency_class", 2);
    b.memory_class = jb.value("memory_class", 2);
    cfg.backends.push_back(std::move(b));
  }
  if (!j.contains("services")) throw ConfigError("config: missing 'services'");
  for (const auto& js : j.at("services")) {
    ServiceCellConfig s;
    s.model_id = js.at("model_id").get<std::string>();
    s.backend_id = js.at("backend_id").get<std::string>();
    s.unit_cost = js.value("unit_cost", s.unit_cost);
    s.latency_prior = js.value("latency_prior", s.latency_prior);
    s.concurrency_per_replica =
        js.value("concurrency_per_replica", s.concurrency_per_replica);
    s.initial_replicas = js.value("initial_replicas", s.initial_replicas);
    s.cold_start_duration =
        js.value("cold_start_duration", s.cold_start_duration);
    s.base_ttft = js.value("base_ttft", s.base_ttft);
    s.per_token_latency = js.value("per_token_latency", s.per_token_latency);
    if (js.contains("output_tokens")) {
      s.output_tokens = parse_token_distribution(js.at("output_tokens"));
    }
    s.failure_probability =
        js.value("failure_probability", s.failure_probability);
    s.replica_cost_per_hour =
        js.value("replica_cost_per_hour", s.replica_cost_per_hour);
    s.proxy_url = js.value("proxy_url", std::string{});
    cfg.services.push_back(std::move(s));
  }

  cfg.profiles = default_profiles();
  if (j.contains("profiles")) {
    cfg.profiles.clear();
    for (const auto& jp : j.at("profiles")) {
      WeightProfile p;
      p.name = jp.at("name").get<std::string>();
      p.alpha = jp.at("alpha").get<double>();
      p.lambda = jp.at("lambda").get<double>();
      p.mu = jp.at("mu").get<double>();
      cfg.profiles.push_back(std::move(p));
    }
  }
  cfg.default_profile = j.value("default_profile", cfg.default_profile);
  if (j.contains("policy")) cfg.policy = parse_policy(j.at("policy"));
  cfg.telemetry_window = j.value("telemetry_window", cfg.telemetry_window);

  if (j.contains("router")) {
    const json& jr = j.at("router");
    const std::string mode = jr.value("mode", "hybrid");
    const auto parsed = router_mode_from_string(mode);
    if (!parsed) throw ConfigError("router: unknown mode '" + mode + "'");
    cfg.router.mode = *parsed;
    cfg.router.confidence_threshold =
        jr.value("confidence_threshold", cfg.router.confidence_threshold);
    cfg.router.token_low_threshold =
        jr.value("token_low_threshold", cfg.router.token_low_threshold);
    cfg.router.token_high_threshold =
        jr.value("token_high_threshold", cfg.router.token_high_threshold);
    if (jr.contains("keyword_rules")) {
      cfg.router.keyword_rules = parse_keyword_rules(jr.at("keyword_rules"));
    }
    if (jr.contains("keyword_file")) {
      cfg.router.keyword_rules = load_keyword_rules(
          base_dir / jr.at("keyword_file").get<std::string>());
    }
    if (jr.contains("relevance_table")) {
      cfg.router.relevance_table =
          parse_relevance_table(jr.at("relevance_table"));
    }
    if (jr.contains("classifier_artifact")) {
      cfg.router.classifier_artifact =
          (base_dir / jr.at("classifier_artifact").get<std::string>()).string();
    }
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
  const json j = load_json_file(path);
  ScenarioConfig cfg;
  cfg.engine = load_engine_config(j, path.parent_path());
  cfg.horizon = j.value("horizon", cfg.horizon);
  cfg.seed = j.value("seed", cfg.seed);
  const std::string mode = j.value("scaling_mode", "static");
  if (mode == "static") {
    cfg.scaling_mode = ScalingMode::Static;
  } else if (mode == "dynamic") {
    cfg.scaling_mode = ScalingMode::Dynamic;
  } else {
    throw ConfigError("unknown scaling_mode '" + mode + "'");
  }
  if (!(cfg.horizon > 0.0)) throw ConfigError("horizon must be > 0");

  if (j.contains("arrivals")) {
    const json& ja = j.at("arrivals");
    const std::string kind = ja.value("kind", "synthetic");
    ArrivalConfig& a = cfg.arrivals;
    if (kind == "fixed_rate") {
      a.kind = ArrivalConfig::Kind::FixedRate;
      a.rate = ja.at("rate").get<double>();
      a.count = ja.value("count", std::size_t{0});
    } else if (kind == "poisson") {
      a.kind = ArrivalConfig::Kind::Poisson;
      a.rate = ja.at("rate").get<double>();
      a.count = ja.value("count", std::size_t{0});
    } else if (kind == "replay") {
      a.kind = ArrivalConfig::Kind::Replay;
      a.trace_path =
          (path.parent_path() / ja.at("trace").get<std::string>()).string();
    } else if (kind == "synthetic") {
      a.kind = ArrivalConfig::Kind::Synthetic;
      a.synthetic.count = ja.value("count", a.synthetic.count);
      a.synthetic.rate = ja.value("rate", a.synthetic.rate);
      a.synthetic.poisson = ja.value("poisson", a.synthetic.poisson);
      a.synthetic.seed = ja.value("seed", cfg.seed);
      if (ja.contains("class_mix")) {
        const auto mix = ja.at("class_mix").get<std::vector<double>>();
        if (mix.size() != 3) throw ConfigError("class_mix needs 3 entries");
        a.synthetic.class_mix = {mix[0], mix[1], mix[2]};
      }
    } else if (kind == "bursty") {
      a.kind = ArrivalConfig::Kind::Bursty;
      a.bursty.bursts = ja.value("bursts", a.bursty.bursts);
      a.bursty.burst_duration =
          ja.value("burst_duration", a.bursty.burst_duration);
      a.bursty.burst_rate = ja.value("burst_rate", a.bursty.burst_rate);
      a.bursty.gap_duration = ja.value("gap_duration", a.bursty.gap_duration);
      a.bursty.seed = ja.value("seed", cfg.seed);
      if (ja.contains("class_mix")) {
        const auto mix = ja.at("class_mix").get<std::vector<double>>();
        if (mix.size() != 3) throw ConfigError("class_mix needs 3 entries");
        a.bursty.class_mix = {mix[0], mix[1], mix[2]};
      }
    } else {
      throw ConfigError("unknown arrival kind '" + kind + "'");
    }
  }
  return cfg;
}

GatewayConfig load_gateway_config(const std::filesystem::path& path) {
  const json j = load_json_file(path);
  GatewayConfig cfg;
  cfg.engine = load_engine_config(j, path.parent_path());
  cfg.listen_address = j.value("listen", cfg.listen_address);
  cfg.port = j.value("port", cfg.port);
  cfg.mode = j.value("mode", cfg.mode);
  cfg.decision_log_path = j.value("decision_log", cfg.decision_log_path);
  cfg.return_routing_metadata =
      j.value("return_routing_metadata", cfg.return_routing_metadata);
  cfg.overhead_budget_ms = j.value("overhead_budget_ms", cfg.overhead_budget_ms);
  cfg.request_timeout = j.value("request_timeout", cfg.request_timeout);
  cfg.max_output_tokens = j.value("max_output_tokens", cfg.max_output_tokens);
  cfg.seed = j.value("seed", cfg.seed);

  if (const char* v = std::getenv("PS_LISTEN")) cfg.listen_address = v;
  if (const char* v = std::getenv("PS_PORT")) cfg.port = std::atoi(v);
  if (const char* v = std::getenv("PS_MODE")) cfg.mode = v;
  if (const char* v = std::getenv("PS_DECISION_LOG")) cfg.decision_log_path = v;
  if (const char* v = std::getenv("PS_CLASSIFIER")) {
    cfg.engine.router.classifier_artifact = v;
  }

  if (cfg.mode != "simulated" && cfg.mode != "proxy") {
    throw ConfigError("gateway mode must be 'simulated' or 'proxy'");
  }
  return cfg;
}

KeywordRuleSet load_keyword_rules(const std::filesystem::path& path) {
  return parse_keyword_rules(load_json_file(path));
}

}  // namespace ps
