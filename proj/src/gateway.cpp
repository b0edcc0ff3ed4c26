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

#include "ps/gateway.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "ps/classifier.hpp"
#include "ps/errors.hpp"
#include "ps/metrics.hpp"
#include "ps/orchestrator.hpp"
#include "ps/registry.hpp"
#include "ps/sim.hpp"

namespace ps {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double percentile_of(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  return percentile_nearest_rank(values, p);
}

// Virtual backend pool for simulated mode: per-slot next-free timestamps
// give FIFO queueing math without wall-clock sleeps, so responses return
// immediately with simulated timings attached.
class VirtualPool {
 public:
  struct Result {
    double ttft = 0.0;
    double latency = 0.0;
    bool success = true;
    bool cold = false;
    double cost = 0.0;
    double tokens = 0.0;
  };

  VirtualPool(std::uint64_t seed, double cold_start_timeout)
      : rng_(seed), cold_start_timeout_(cold_start_timeout) {}

  void add_service(const ServiceCellConfig& cfg, int initial_replicas) {
    Svc svc;
    svc.cfg = cfg;
    svc.replicas = initial_replicas;
    svc.slot_free.assign(
        static_cast<std::size_t>(initial_replicas) *
            static_cast<std::size_t>(cfg.concurrency_per_replica),
        0.0);
    services_[make_service_id(cfg.model_id, cfg.backend_id)] = std::move(svc);
  }

  Result submit(const std::string& service_id, double now) {
    std::lock_guard<std::mutex> lock(mutex_);
    Svc& svc = at(service_id);
    Result res;
    res.cost = svc.cfg.unit_cost;
    if (svc.replicas == 0) {
      if (svc.cfg.cold_start_duration > cold_start_timeout_) {
        throw ColdStartTimeoutError("cold start of " + service_id +
                                    " exceeds timeout");
      }
      res.cold = true;
      svc.replicas = 1;
      svc.slot_free.assign(
          static_cast<std::size_t>(svc.cfg.concurrency_per_replica),
          now + svc.cfg.cold_start_duration);
      if (on_replicas_changed) on_replicas_changed(service_id, svc.replicas);
    }
    auto slot = std::min_element(svc.slot_free.begin(), svc.slot_free.end());
    const double start = std::max(now, *slot);
    res.tokens = draw_tokens(svc.cfg.output_tokens);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    res.success = unit(rng_) >= svc.cfg.failure_probability;
    res.ttft = (start - now) + svc.cfg.base_ttft;
    res.latency = res.ttft + res.tokens * svc.cfg.per_token_latency;
    *slot = now + res.latency;
    return res;
  }

  void set_replicas(const std::string& service_id, int target, double now) {
    std::lock_guard<std::mutex> lock(mutex_);
    Svc& svc = at(service_id);
    target = std::max(0, target);
    if (target == svc.replicas) return;
    const auto concurrency =
        static_cast<std::size_t>(svc.cfg.concurrency_per_replica);
    if (target > svc.replicas) {
      const std::size_t added =
          static_cast<std::size_t>(target - svc.replicas) * concurrency;
      for (std::size_t i = 0; i < added; ++i) {
        svc.slot_free.push_back(now + svc.cfg.cold_start_duration);
      }
    } else {
      // Drop the busiest slots last: sort ascending and trim the tail.
      std::sort(svc.slot_free.begin(), svc.slot_free.end());
      svc.slot_free.resize(static_cast<std::size_t>(target) * concurrency);
    }
    svc.replicas = target;
    if (on_replicas_changed) on_replicas_changed(service_id, svc.replicas);
  }

  int replicas(const std::string& service_id) {
    std::lock_guard<std::mutex> lock(mutex_);
    return at(service_id).replicas;
  }

  std::function<void(const std::string&, int)> on_replicas_changed;

 private:
  struct Svc {
    ServiceCellConfig cfg;
    int replicas = 0;
    std::vector<double> slot_free;
  };

  Svc& at(const std::string& service_id) {
    auto it = services_.find(service_id);
    if (it == services_.end()) {
      throw NotFoundError("unknown service: " + service_id);
    }
    return it->second;
  }

  double draw_tokens(const TokenDistribution& dist) {
    switch (dist.kind) {
      case TokenDistribution::Kind::Fixed:
        return std::max(0.0, dist.a);
      case TokenDistribution::Kind::Uniform: {
        std::uniform_real_distribution<double> d(dist.a, dist.b);
        return std::max(0.0, d(rng_));
      }
      case TokenDistribution::Kind::LogNormal: {
        std::lognormal_distribution<double> d(dist.a, dist.b);
        return std::max(1.0, d(rng_));
      }
    }
    return dist.a;
  }

  std::mutex mutex_;
  std::mt19937_64 rng_;
  double cold_start_timeout_;
  std::map<std::string, Svc> services_;
};

struct ProxyResult {
  double ttft = 0.0;
  double latency = 0.0;
  bool success = false;
  bool streamed = false;
  int status = 0;
  std::string completion;
  std::string error;
};

// Pulls assistant text out of an SSE chat-completion stream; returns the
// raw body when nothing parses.
std::string extract_completion(const std::string& body) {
  std::string text;
  std::istringstream is(body);
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("data:", 0) != 0) continue;
    std::string payload = trim(line.substr(5));
    if (payload.empty() || payload == "[DONE]") continue;
    try {
      const json j = json::parse(payload);
      if (j.contains("choices") && !j["choices"].empty()) {
        const json& choice = j["choices"][0];
        if (choice.contains("delta") && choice["delta"].contains("content")) {
          text += choice["delta"]["content"].get<std::string>();
        } else if (choice.contains("message") &&
                   choice["message"].contains("content")) {
          text += choice["message"]["content"].get<std::string>();
        } else if (choice.contains("text")) {
          text += choice["text"].get<std::string>();
        }
      }
    } catch (const json::exception&) {
      // Not JSON; keep raw body below.
    }
  }
  return text.empty() ? body : text;
}

ProxyResult proxy_submit(const std::string& base_url,
                         const std::string& model_id,
                         const std::string& prompt, double timeout_s,
                         int max_tokens) {
  ProxyResult res;
  httplib::Client client(base_url);
  client.set_connection_timeout(std::chrono::milliseconds(
      static_cast<int>(std::min(timeout_s, 10.0) * 1000)));
  client.set_read_timeout(std::chrono::milliseconds(
      static_cast<int>(timeout_s * 1000)));

  const json body = {
      {"model", model_id},
      {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
      {"stream", true},
      {"max_tokens", max_tokens},
  };

  const auto start = std::chrono::steady_clock::now();
  bool first_chunk = true;
  std::string received;
  auto result = client.Post(
      "/v1/chat/completions", body.dump(), "application/json",
      [&](const char* data, size_t len) {
        if (first_chunk) {
          res.ttft = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
          first_chunk = false;
        }
        received.append(data, len);
        return true;
      });
  res.latency =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  if (!result) {
    res.error = "upstream connection failure";
    return res;
  }
  res.status = result->status;
  res.streamed = !first_chunk;
  if (first_chunk) res.ttft = res.latency;  // non-streaming upstream
  res.completion = extract_completion(received);
  if (result->status < 200 || result->status >= 300) {
    res.error = "upstream status " + std::to_string(result->status);
    return res;
  }
  if (trim(res.completion).empty()) {
    res.error = "empty completion";
    return res;
  }
  res.success = true;
  return res;
}

}  // namespace

struct Gateway::Impl {
  explicit Impl(GatewayConfig config) : cfg(std::move(config)) {}

  GatewayConfig cfg;
  std::unique_ptr<ServiceRegistry> registry;
  std::unique_ptr<Orchestrator> orchestrator;
  std::optional<LinearSoftmaxClassifier> classifier;
  std::unique_ptr<VirtualPool> pool;
  std::map<std::string, ServiceCellConfig> cells;  // by service_id

  httplib::Server server;
  std::thread listen_thread;
  std::thread scaling_thread;
  std::atomic<bool> running{false};
  int bound_port = 0;
  std::chrono::steady_clock::time_point started_at;

  std::atomic<std::uint64_t> n_total{0};
  std::atomic<std::uint64_t> n_success{0};
  std::atomic<std::uint64_t> n_failure{0};
  std::atomic<std::uint64_t> n_rejected{0};

  std::mutex samples_mutex;
  std::vector<double> ttft_samples;
  std::vector<double> latency_samples;
  std::vector<double> overhead_ms_samples;

  std::mutex log_mutex;
  std::ofstream decision_log;

  std::mutex scaling_mutex;
  std::condition_variable scaling_cv;

  double now() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         started_at)
        .count();
  }

  void log_line(const json& j) {
    std::lock_guard<std::mutex> lock(log_mutex);
    decision_log << j.dump() << '\n';
    decision_log.flush();
  }

  void add_sample(std::vector<double>& vec, double v) {
    std::lock_guard<std::mutex> lock(samples_mutex);
    if (vec.size() < (1u << 20)) vec.push_back(v);
  }

  ClassifierOutput classify(const Prompt& prompt, RouterMode mode) const {
    const RouterConfig& rc = cfg.engine.router;
    switch (mode) {
      case RouterMode::Keyword:
        return keyword_classify(prompt, rc.keyword_rules);
      case RouterMode::Semantic: {
        static const LinearSoftmaxClassifier untrained;
        return semantic_classify(prompt,
                                 classifier ? *classifier : untrained);
      }
      case RouterMode::Hybrid:
        return hybrid_classify(prompt, rc.keyword_rules,
                               classifier ? &*classifier : nullptr,
                               rc.confidence_threshold);
    }
    return keyword_classify(prompt, rc.keyword_rules);
  }

  void apply_command(const ScaleCommand& cmd, double t) {
    std::vector<std::string> ids;
    for (const auto& [id, cell] : cells) {
      if (cell.model_id == cmd.model_id) ids.push_back(id);
    }
    const int n = static_cast<int>(ids.size());
    for (int i = 0; i < n; ++i) {
      const int share = cmd.new_replica_count / n +
                        (i < cmd.new_replica_count % n ? 1 : 0);
      pool->set_replicas(ids[i], share, t);
    }
  }

  void scaling_loop() {
    std::unique_lock<std::mutex> lock(scaling_mutex);
    const auto period = std::chrono::duration<double>(
        std::max(0.05, cfg.engine.policy.evaluation_period));
    while (running.load()) {
      scaling_cv.wait_for(lock, period, [this] { return !running.load(); });
      if (!running.load()) break;
      if (cfg.mode != "simulated") continue;  // proxy replicas are external
      const double t = now();
      const RegistrySnapshot snapshot = registry->snapshot(t);
      for (const ScaleCommand& cmd : orchestrator->scaling_tick(snapshot, t)) {
        apply_command(cmd, t);
      }
    }
  }

  void handle_route(const httplib::Request& req, httplib::Response& resp);
  void handle_registry(httplib::Response& resp);
  void handle_metrics(httplib::Response& resp);
  void handle_profiles(httplib::Response& resp);
  void handle_health(const httplib::Request& req, httplib::Response& resp);
  void setup_routes();
};

namespace {

void reply_json(httplib::Response& resp, int status, const json& j) {
  resp.status = status;
  resp.set_content(j.dump(), "application/json");
}

}  // namespace

void Gateway::Impl::handle_route(const httplib::Request& req,
                                 httplib::Response& resp) {
  const auto t_start = std::chrono::steady_clock::now();
  json body;
  try {
    body = json::parse(req.body);
  } catch (const json::exception&) {
    ++n_rejected;
    reply_json(resp, 400, {{"error", "invalid_json"}});
    return;
  }
  const std::string prompt_text = trim(body.value("prompt", std::string{}));
  if (prompt_text.empty()) {
    ++n_rejected;
    reply_json(resp, 400, {{"error", "empty_prompt"}});
    return;
  }
  const std::string request_id =
      body.value("request_id", "req-" + std::to_string(n_total.load() + 1) +
                                   "-" + std::to_string(static_cast<long long>(
                                             now() * 1e6)));

  const WeightProfile* profile = nullptr;
  const std::string profile_name =
      body.value("profile", cfg.engine.default_profile);
  try {
    profile = &cfg.engine.profile(profile_name);
  } catch (const NotFoundError&) {
    json known = json::array();
    for (const auto& p : cfg.engine.profiles) known.push_back(p.name);
    ++n_rejected;
    reply_json(resp, 400,
               {{"error", "unknown_profile"}, {"known_profiles", known}});
    return;
  }

  RouterMode mode = cfg.engine.router.mode;
  if (body.contains("mode")) {
    const auto parsed = router_mode_from_string(body["mode"].get<std::string>());
    if (!parsed) {
      ++n_rejected;
      reply_json(resp, 400, {{"error", "unknown_mode"}});
      return;
    }
    mode = *parsed;
  }

  const double t = now();
  ++n_total;
  const Prompt prompt = Prompt::make(request_id, prompt_text, t);
  const ClassifierOutput output = classify(prompt, mode);
  const RegistrySnapshot snapshot = registry->snapshot(t);

  RoutingDecision decision;
  try {
    decision = orchestrator->select_service(prompt, snapshot, *profile,
                                            output, t);
  } catch (const NoHealthyServiceError&) {
    ++n_failure;
    log_line({{"request_id", request_id},
              {"error", "no_healthy_service"},
              {"success", false},
              {"decided_at", t}});
    reply_json(resp, 503, {{"error", "no_healthy_service"}});
    return;
  }

  registry->record_request(decision.service_id, t);
  registry->adjust_inflight(decision.service_id, 1);
  orchestrator->note_request(decision.model_id, t);

  double ttft = 0.0;
  double latency = 0.0;
  double cost = 0.0;
  bool success = false;
  bool cold = decision.cold_start;
  bool ttft_estimated = false;  // non-streaming upstream: ttft == latency
  std::string completion;
  std::string error;
  int error_status = 0;
  double backend_wall = 0.0;

  if (cfg.mode == "simulated") {
    try {
      const VirtualPool::Result r = pool->submit(decision.service_id, t);
      ttft = r.ttft;
      latency = r.latency;
      cost = r.cost;
      success = r.success;
      cold = cold || r.cold;
      std::ostringstream os;
      os << "[" << decision.service_id << "] simulated completion ("
         << static_cast<long long>(r.tokens) << " tokens)";
      completion = os.str();
      if (!success) {
        error = "simulated_backend_failure";
        error_status = 502;
      }
    } catch (const ColdStartTimeoutError&) {
      latency = cfg.engine.policy.cold_start_timeout;
      ttft = latency;
      error = "cold_start_timeout";
      error_status = 504;
    }
  } else {
    const auto cell = cells.find(decision.service_id);
    const auto t0 = std::chrono::steady_clock::now();
    if (cell == cells.end() || cell->second.proxy_url.empty()) {
      error = "no_upstream_configured";
      error_status = 502;
    } else {
      ProxyResult r =
          proxy_submit(cell->second.proxy_url, decision.model_id, prompt_text,
                       cfg.request_timeout, cfg.max_output_tokens);
      ttft = r.ttft;
      latency = r.latency;
      cost = cell->second.unit_cost;
      completion = r.completion;
      if (r.success &&
          count_tokens(r.completion) <=
              static_cast<std::size_t>(cfg.max_output_tokens) &&
          r.latency <= cfg.request_timeout) {
        success = true;
      } else {
        error = r.error.empty() ? "completion_limits_exceeded" : r.error;
        error_status = 502;
      }
      ttft_estimated = !r.streamed;
    }
    backend_wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
  }

  registry->record_sample(decision.service_id, latency, ttft, success, now());
  registry->adjust_inflight(decision.service_id, -1);
  if (success) {
    ++n_success;
  } else {
    ++n_failure;
  }
  add_sample(ttft_samples, ttft);
  add_sample(latency_samples, latency);

  json log_entry = decision_to_json(decision);
  log_entry["request_id"] = request_id;
  log_entry["ttft"] = ttft;
  log_entry["latency"] = latency;
  log_entry["success"] = success;
  if (!error.empty()) log_entry["error"] = error;
  log_line(log_entry);

  json out;
  out["request_id"] = request_id;
  out["completion"] = completion;
  if (cfg.return_routing_metadata) {
    out["service_id"] = decision.service_id;
    out["model_id"] = decision.model_id;
    out["complexity"] = to_string(decision.classifier_output.predicted);
    out["classifier_source"] =
        to_string(decision.classifier_output.source);
    out["score"] = decision.score;
    out["components"] = {
        {"relevance_hat", decision.components.relevance_hat},
        {"latency_hat", decision.components.latency_hat},
        {"cost_hat", decision.components.cost_hat}};
    out["profile"] = decision.profile_name;
    out["ttft"] = ttft;
    out["latency"] = latency;
    out["cold_start"] = cold;
    out["cost"] = cost;
    if (ttft_estimated) out["ttft_estimated"] = true;
  }

  const double overhead_ms =
      (std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                     t_start)
           .count() -
       backend_wall) *
      1000.0;
  add_sample(overhead_ms_samples, overhead_ms);

  if (!success) {
    out["error"] = error;
    reply_json(resp, error_status == 0 ? 502 : error_status, out);
    return;
  }
  reply_json(resp, 200, out);
}

void Gateway::Impl::handle_registry(httplib::Response& resp) {
  const RegistrySnapshot snapshot = registry->snapshot(now());
  json cells_json = json::array();
  for (const auto& s : snapshot.services) {
    cells_json.push_back(
        {{"service_id", s.service_id},
         {"model_id", s.model_id},
         {"backend_id", s.backend_id},
         {"tier", to_string(s.tier)},
         {"health", to_string(s.health)},
         {"replicas", s.replicas},
         {"inflight", s.inflight},
         {"utilization", s.utilization()},
         {"unit_cost", s.unit_cost},
         {"avg_latency", s.avg_latency},
         {"request_rate", s.request_rate},
         {"latency_window",
          {{"min", s.latency_stats.metric_min},
           {"max", s.latency_stats.metric_max},
           {"samples", s.latency_stats.sample_count}}}});
  }
  json models = json::array();
  for (const auto& m : snapshot.models) {
    models.push_back({{"model_id", m.model_id},
                      {"tier", to_string(m.tier)},
                      {"warm_pool_floor", m.warm_pool_floor}});
  }
  json backends = json::array();
  for (const auto& b : snapshot.backends) {
    backends.push_back({{"backend_id", b.backend_id},
                        {"throughput_class", b.throughput_class},
                        {"latency_class", b.latency_class},
                        {"memory_class", b.memory_class}});
  }
  reply_json(resp, 200,
             {{"version", snapshot.version},
              {"taken_at", snapshot.taken_at},
              {"models", models},
              {"backends", backends},
              {"services", cells_json}});
}

void Gateway::Impl::handle_metrics(httplib::Response& resp) {
  std::vector<double> ttfts, lats, overheads;
  {
    std::lock_guard<std::mutex> lock(samples_mutex);
    ttfts = ttft_samples;
    lats = latency_samples;
    overheads = overhead_ms_samples;
  }
  const std::uint64_t total = n_total.load();
  const std::uint64_t success = n_success.load();
  json j;
  j["total"] = total;
  j["success"] = success;
  j["failure"] = n_failure.load();
  j["rejected"] = n_rejected.load();
  j["success_rate"] =
      total > 0 ? static_cast<double>(success) / static_cast<double>(total)
                : 0.0;
  j["ttft"] = {{"p50", percentile_of(ttfts, 50.0)},
               {"p95", percentile_of(ttfts, 95.0)},
               {"p99", percentile_of(ttfts, 99.0)}};
  j["latency"] = {{"p50", percentile_of(lats, 50.0)},
                  {"p95", percentile_of(lats, 95.0)},
                  {"p99", percentile_of(lats, 99.0)}};
  j["overhead_ms"] = {{"p50", percentile_of(overheads, 50.0)},
                      {"p99", percentile_of(overheads, 99.0)},
                      {"budget", cfg.overhead_budget_ms}};
  j["uptime_s"] = now();
  reply_json(resp, 200, j);
}

void Gateway::Impl::handle_profiles(httplib::Response& resp) {
  json arr = json::array();
  for (const auto& p : cfg.engine.profiles) {
    const NormalizedWeights w = p.normalized();
    arr.push_back({{"name", p.name},
                   {"alpha", p.alpha},
                   {"lambda", p.lambda},
                   {"mu", p.mu},
                   {"weights",
                    {{"relevance", w.relevance},
                     {"latency", w.latency},
                     {"cost", w.cost}}}});
  }
  reply_json(resp, 200, {{"profiles", arr},
                         {"default", cfg.engine.default_profile}});
}

void Gateway::Impl::handle_health(const httplib::Request& req,
                                  httplib::Response& resp) {
  const std::string service_id = req.matches[1];
  json body;
  try {
    body = json::parse(req.body);
  } catch (const json::exception&) {
    reply_json(resp, 400, {{"error", "invalid_json"}});
    return;
  }
  const auto health = health_from_string(body.value("health", ""));
  if (!health) {
    reply_json(resp, 400, {{"error", "unknown_health_state"}});
    return;
  }
  try {
    registry->set_health(service_id, *health);
  } catch (const NotFoundError&) {
    reply_json(resp, 404, {{"error", "unknown_service"}});
    return;
  }
  reply_json(resp, 200,
             {{"service_id", service_id}, {"health", to_string(*health)}});
}

void Gateway::Impl::setup_routes() {
  server.Post("/v1/route", [this](const httplib::Request& req,
                                  httplib::Response& resp) {
    handle_route(req, resp);
  });
  server.Get("/registry",
             [this](const httplib::Request&, httplib::Response& resp) {
               handle_registry(resp);
             });
  server.Get("/metrics",
             [this](const httplib::Request&, httplib::Response& resp) {
               handle_metrics(resp);
             });
  server.Get("/profiles",
             [this](const httplib::Request&, httplib::Response& resp) {
               handle_profiles(resp);
             });
  server.Post(R"(/health/(.+))", [this](const httplib::Request& req,
                                        httplib::Response& resp) {
    handle_health(req, resp);
  });
}

Gateway::Gateway(GatewayConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {
  Impl& im = *impl_;
  im.started_at = std::chrono::steady_clock::now();
  im.registry =
      std::make_unique<ServiceRegistry>(im.cfg.engine.telemetry_window);
  im.orchestrator = std::make_unique<Orchestrator>(
      im.cfg.engine.policy, im.cfg.engine.router.relevance_table);
  im.pool = std::make_unique<VirtualPool>(
      im.cfg.seed, im.cfg.engine.policy.cold_start_timeout);

  for (const auto& cell : im.cfg.engine.services) {
    const ModelSpec& model = im.cfg.engine.model(cell.model_id);
    BackendSpec backend;
    for (const auto& b : im.cfg.engine.backends) {
      if (b.backend_id == cell.backend_id) backend = b;
    }
    ServiceSettings settings;
    settings.unit_cost = cell.unit_cost;
    settings.latency_prior = cell.latency_prior;
    settings.concurrency_per_replica = cell.concurrency_per_replica;
    settings.initial_replicas = cell.initial_replicas;
    settings.cold_start_duration = cell.cold_start_duration;
    const std::string id =
        im.registry->register_service(model, backend, settings);
    im.cells[id] = cell;
    im.pool->add_service(cell, cell.initial_replicas);
  }
  im.orchestrator->init_models(im.cfg.engine.models, 0.0);
  im.pool->on_replicas_changed = [this](const std::string& id, int replicas) {
    impl_->registry->set_replicas(id, replicas);
  };

  if (!im.cfg.engine.router.classifier_artifact.empty()) {
    im.classifier =
        LinearSoftmaxClassifier::load(im.cfg.engine.router.classifier_artifact);
  }

  im.decision_log.open(im.cfg.decision_log_path, std::ios::app);
  if (!im.decision_log) {
    throw ConfigError("cannot open decision log: " + im.cfg.decision_log_path);
  }
  im.setup_routes();
}

Gateway::~Gateway() { stop(); }

void Gateway::start() {
  Impl& im = *impl_;
  if (im.running.exchange(true)) return;
  if (im.cfg.port == 0) {
    im.bound_port = im.server.bind_to_any_port(im.cfg.listen_address);
    if (im.bound_port <= 0) {
      im.running = false;
      throw ConfigError("gateway failed to bind an ephemeral port");
    }
  } else {
    if (!im.server.bind_to_port(im.cfg.listen_address, im.cfg.port)) {
      im.running = false;
      throw ConfigError("gateway failed to bind port " +
                        std::to_string(im.cfg.port));
    }
    im.bound_port = im.cfg.port;
  }
  im.listen_thread = std::thread([&im] { im.server.listen_after_bind(); });
  im.scaling_thread = std::thread([&im] { im.scaling_loop(); });
  im.server.wait_until_ready();
}

void Gateway::stop() {
  Impl& im = *impl_;
  if (!im.running.exchange(false)) return;
  im.scaling_cv.notify_all();
  im.server.stop();
  if (im.listen_thread.joinable()) im.listen_thread.join();
  if (im.scaling_thread.joinable()) im.scaling_thread.join();
}

void Gateway::wait() {
  Impl& im = *impl_;
  if (im.listen_thread.joinable()) im.listen_thread.join();
}

int Gateway::port() const { return impl_->bound_port; }

GatewayCounters Gateway::counters() const {
  GatewayCounters c;
  c.total = impl_->n_total.load();
  c.success = impl_->n_success.load();
  c.failure = impl_->n_failure.load();
  c.rejected = impl_->n_rejected.load();
  return c;
}

}  // namespace ps
