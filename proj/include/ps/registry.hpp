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

#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ps/router.hpp"
#include "ps/scoring.hpp"

namespace ps {

enum class HealthState { Healthy, Degraded, Down };

const char* to_string(HealthState h);
std::optional<HealthState> health_from_string(std::string_view s);

struct ModelSpec {
  std::string model_id;
  ModelTier tier = ModelTier::Small;
  std::int64_t parameter_count = 0;  // informational
  int warm_pool_floor = 0;
};

struct BackendSpec {
  std::string backend_id;
  int throughput_class = 2;  // ordinals in {1,2,3}
  int latency_class = 2;
  int memory_class = 2;
};

struct TelemetrySample {
  double timestamp = 0.0;
  double latency = 0.0;
  double ttft = 0.0;
  bool success = true;
};

// Rolling per-service observation window. Samples older than
// window_duration relative to the newest sample are pruned; min/max run
// on monotonic deques so insert and prune stay O(1) amortized.
class TelemetryWindow {
 public:
  explicit TelemetryWindow(double window_duration = 300.0);

  void add_request(double timestamp);
  void add_outcome(const TelemetrySample& sample);
  void prune();

  // Requests with timestamp in (now - window, now], divided by window.
  double request_rate(double window, double now) const;
  // Mean latency over successful outcomes in the window, or nullopt.
  std::optional<double> avg_success_latency() const;
  NormalizationStats latency_stats() const;
  double success_latency_sum() const { return success_latency_sum_; }
  std::size_t success_count() const { return success_count_; }
  std::size_t outcome_count() const { return outcomes_.size(); }
  std::size_t request_count() const { return requests_.size(); }
  double window_duration() const { return window_duration_; }

 private:
  void prune_before(double cutoff);

  double window_duration_;
  double newest_ = 0.0;
  bool has_samples_ = false;
  std::deque<double> requests_;  // arrival timestamps, non-decreasing
  std::deque<TelemetrySample> outcomes_;
  std::deque<std::pair<double, double>> min_deque_;  // (timestamp, latency)
  std::deque<std::pair<double, double>> max_deque_;
  double success_latency_sum_ = 0.0;
  std::size_t success_count_ = 0;
};

// Per-service registration settings beyond the model/backend specs.
struct ServiceSettings {
  double unit_cost = 0.01;          // currency per query
  double latency_prior = 1.0;       // bootstrap estimate, seconds
  int concurrency_per_replica = 4;
  int initial_replicas = 0;
  double cold_start_duration = 12.0;
  HealthState health = HealthState::Healthy;
};

// One cell of the service matrix as seen in a snapshot.
struct ServiceInstance {
  std::string service_id;
  std::string model_id;
  std::string backend_id;
  ModelTier tier = ModelTier::Small;
  HealthState health = HealthState::Healthy;
  int replicas = 0;
  int inflight = 0;
  int concurrency_per_replica = 4;
  double unit_cost = 0.0;
  double latency_prior = 1.0;
  double cold_start_duration = 0.0;
  NormalizationStats latency_stats;
  NormalizationStats cost_stats;
  // Window summaries materialized at snapshot time.
  double avg_latency = 0.0;
  double request_rate = 0.0;
  double window_success_latency_sum = 0.0;
  std::size_t window_success_count = 0;
  std::size_t window_outcome_count = 0;

  double utilization() const {
    const int cap = replicas * concurrency_per_replica;
    return cap > 0 ? static_cast<double>(inflight) / cap : 0.0;
  }
};

struct RegistrySnapshot {
  std::uint64_t version = 0;
  double taken_at = 0.0;
  std::vector<ServiceInstance> services;  // sorted by service_id
  std::vector<ModelSpec> models;
  std::vector<BackendSpec> backends;

  const ServiceInstance* find(std::string_view service_id) const;
  std::vector<const ServiceInstance*> model_row(std::string_view model_id) const;
};

std::string make_service_id(std::string_view model_id,
                            std::string_view backend_id);

// The L x I service matrix plus rolling telemetry. Writers mutate under
// an internal mutex; readers work on immutable snapshots, so a snapshot
// taken at version v never changes afterwards.
class ServiceRegistry {
 public:
  explicit ServiceRegistry(double telemetry_window = 300.0);

  // Throws ConflictError when the (model, backend) pair already exists.
  std::string register_service(const ModelSpec& model,
                               const BackendSpec& backend,
                               const ServiceSettings& settings);

  void record_request(const std::string& service_id, double timestamp);
  void record_sample(const std::string& service_id, double latency,
                     double ttft, bool success, double timestamp);

  double get_avg_request_rate(const std::string& service_id, double window,
                              double now) const;
  // Mean of successful-request latencies in the window; the configured
  // prior when no samples exist.
  double get_avg_latency(const std::string& service_id) const;

  void set_health(const std::string& service_id, HealthState health);
  void set_replicas(const std::string& service_id, int replicas);
  void adjust_inflight(const std::string& service_id, int delta);

  RegistrySnapshot snapshot(double now) const;
  std::vector<std::string> service_ids() const;
  std::vector<ModelSpec> models() const;
  double telemetry_window() const { return telemetry_window_; }

 private:
  struct Cell {
    ModelSpec model;
    BackendSpec backend;
    ServiceSettings settings;
    HealthState health;
    int replicas = 0;
    int inflight = 0;
    TelemetryWindow window;

    explicit Cell(double window_duration) : window(window_duration) {}
  };

  Cell& cell(const std::string& service_id);
  const Cell& cell(const std::string& service_id) const;

  double telemetry_window_;
  mutable std::mutex mutex_;
  std::map<std::string, Cell> cells_;
  std::vector<ModelSpec> models_;
  std::vector<BackendSpec> backends_;
  std::uint64_t version_ = 0;
};

// Healthy subset of a snapshot; zero-replica instances are included only
// when cold starts are permitted by policy.
std::vector<const ServiceInstance*> healthy_candidates(
    const RegistrySnapshot& snapshot, bool allow_cold_start);

}  // namespace ps
