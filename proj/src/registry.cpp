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

#include "ps/registry.hpp"

#include <algorithm>

#include "ps/errors.hpp"

namespace ps {

const char* to_string(HealthState h) {
  switch (h) {
    case HealthState::Healthy: return "healthy";
    case HealthState::Degraded: return "degraded";
    case HealthState::Down: return "down";
  }
  return "unknown";
}

std::optional<HealthState> health_from_string(std::string_view s) {
  if (s == "healthy") return HealthState::Healthy;
  if (s == "degraded") return HealthState::Degraded;
  if (s == "down") return HealthState::Down;
  return std::nullopt;
}

TelemetryWindow::TelemetryWindow(double window_duration)
    : window_duration_(window_duration) {}

void TelemetryWindow::add_request(double timestamp) {
  newest_ = has_samples_ ? std::max(newest_, timestamp) : timestamp;
  has_samples_ = true;
  requests_.push_back(timestamp);
  prune();
}

void TelemetryWindow::add_outcome(const TelemetrySample& sample) {
  newest_ = has_samples_ ? std::max(newest_, sample.timestamp) : sample.timestamp;
  has_samples_ = true;
  outcomes_.push_back(sample);
  while (!min_deque_.empty() && min_deque_.back().second >= sample.latency) {
    min_deque_.pop_back();
  }
  min_deque_.emplace_back(sample.timestamp, sample.latency);
  while (!max_deque_.empty() && max_deque_.back().second <= sample.latency) {
    max_deque_.pop_back();
  }
  max_deque_.emplace_back(sample.timestamp, sample.latency);
  if (sample.success) {
    success_latency_sum_ += sample.latency;
    ++success_count_;
  }
  prune();
}

void TelemetryWindow::prune() {
  if (!has_samples_) return;
  prune_before(newest_ - window_duration_);
}

void TelemetryWindow::prune_before(double cutoff) {
  while (!requests_.empty() && requests_.front() < cutoff) {
    requests_.pop_front();
  }
  while (!outcomes_.empty() && outcomes_.front().timestamp < cutoff) {
    const TelemetrySample& old = outcomes_.front();
    if (old.success) {
      success_latency_sum_ -= old.latency;
      --success_count_;
    }
    outcomes_.pop_front();
  }
  if (success_count_ == 0) success_latency_sum_ = 0.0;  // kill drift
  while (!min_deque_.empty() && min_deque_.front().first < cutoff) {
    min_deque_.pop_front();
  }
  while (!max_deque_.empty() && max_deque_.front().first < cutoff) {
    max_deque_.pop_front();
  }
}

double TelemetryWindow::request_rate(double window, double now) const {
  if (window <= 0.0 || requests_.empty()) return 0.0;
  const double cutoff = now - window;
  // Timestamps are kept sorted; count entries in (now - window, now].
  auto lo = std::upper_bound(requests_.begin(), requests_.end(), cutoff);
  auto hi = std::upper_bound(requests_.begin(), requests_.end(), now);
  const auto count = std::distance(lo, hi);
  return count > 0 ? static_cast<double>(count) / window : 0.0;
}

std::optional<double> TelemetryWindow::avg_success_latency() const {
  if (success_count_ == 0) return std::nullopt;
  return success_latency_sum_ / static_cast<double>(success_count_);
}

NormalizationStats TelemetryWindow::latency_stats() const {
  NormalizationStats stats;
  stats.window_duration = window_duration_;
  stats.sample_count = outcomes_.size();
  if (!outcomes_.empty()) {
    stats.metric_min = min_deque_.front().second;
    stats.metric_max = max_deque_.front().second;
  }
  return stats;
}

std::string make_service_id(std::string_view model_id,
                            std::string_view backend_id) {
  std::string id;
  id.reserve(model_id.size() + backend_id.size() + 1);
  id.append(model_id);
  id.push_back(':');
  id.append(backend_id);
  return id;
}

const ServiceInstance* RegistrySnapshot::find(
    std::string_view service_id) const {
  for (const auto& s : services) {
    if (s.service_id == service_id) return &s;
  }
  return nullptr;
}

std::vector<const ServiceInstance*> RegistrySnapshot::model_row(
    std::string_view model_id) const {
  std::vector<const ServiceInstance*> row;
  for (const auto& s : services) {
    if (s.model_id == model_id) row.push_back(&s);
  }
  return row;
}

ServiceRegistry::ServiceRegistry(double telemetry_window)
    : telemetry_window_(telemetry_window) {}

ServiceRegistry::Cell& ServiceRegistry::cell(const std::string& service_id) {
  auto it = cells_.find(service_id);
  if (it == cells_.end()) {
    throw NotFoundError("unknown service: " + service_id);
  }
  return it->second;
}

const ServiceRegistry::Cell& ServiceRegistry::cell(
    const std::string& service_id) const {
  auto it = cells_.find(service_id);
  if (it == cells_.end()) {
    throw NotFoundError("unknown service: " + service_id);
  }
  return it->second;
}

std::string ServiceRegistry::register_service(const ModelSpec& model,
                                              const BackendSpec& backend,
                                              const ServiceSettings& settings) {
  std::lock_guard<std::mutex> lock(mutex_);
  const std::string id = make_service_id(model.model_id, backend.backend_id);
  if (cells_.count(id) != 0) {
    throw ConflictError("service already registered: " + id);
  }
  Cell c(telemetry_window_);
  c.model = model;
  c.backend = backend;
  c.settings = settings;
  c.health = settings.health;
  c.replicas = settings.initial_replicas;
  cells_.emplace(id, std::move(c));
  if (std::none_of(models_.begin(), models_.end(), [&](const ModelSpec& m) {
        return m.model_id == model.model_id;
      })) {
    models_.push_back(model);
  }
  if (std::none_of(backends_.begin(), backends_.end(),
                   [&](const BackendSpec& b) {
                     return b.backend_id == backend.backend_id;
                   })) {
    backends_.push_back(backend);
  }
  ++version_;
  return id;
}

void ServiceRegistry::record_request(const std::string& service_id,
                                     double timestamp) {
  std::lock_guard<std::mutex> lock(mutex_);
  cell(service_id).window.add_request(timestamp);
  ++version_;
}

void ServiceRegistry::record_sample(const std::string& service_id,
                                    double latency, double ttft, bool success,
                                    double timestamp) {
  std::lock_guard<std::mutex> lock(mutex_);
  cell(service_id).window.add_outcome(
      TelemetrySample{timestamp, latency, ttft, success});
  ++version_;
}

double ServiceRegistry::get_avg_request_rate(const std::string& service_id,
                                             double window, double now) const {
  std::lock_guard<std::mutex> lock(mutex_);
  return cell(service_id).window.request_rate(window, now);
}

double ServiceRegistry::get_avg_latency(const std::string& service_id) const {
  std::lock_guard<std::mutex> lock(mutex_);
  const Cell& c = cell(service_id);
  return c.window.avg_success_latency().value_or(c.settings.latency_prior);
}

void ServiceRegistry::set_health(const std::string& service_id,
                                 HealthState health) {
  std::lock_guard<std::mutex> lock(mutex_);
  cell(service_id).health = health;
  ++version_;
}

void ServiceRegistry::set_replicas(const std::string& service_id,
                                   int replicas) {
  std::lock_guard<std::mutex> lock(mutex_);
  cell(service_id).replicas = std::max(0, replicas);
  ++version_;
}

void ServiceRegistry::adjust_inflight(const std::string& service_id,
                                      int delta) {
  std::lock_guard<std::mutex> lock(mutex_);
  Cell& c = cell(service_id);
  c.inflight = std::max(0, c.inflight + delta);
  ++version_;
}

RegistrySnapshot ServiceRegistry::snapshot(double now) const {
  std::lock_guard<std::mutex> lock(mutex_);
  RegistrySnapshot snap;
  snap.version = version_;
  snap.taken_at = now;
  snap.models = models_;
  snap.backends = backends_;
  snap.services.reserve(cells_.size());
  for (const auto& [id, c] : cells_) {
    ServiceInstance s;
    s.service_id = id;
    s.model_id = c.model.model_id;
    s.backend_id = c.backend.backend_id;
    s.tier = c.model.tier;
    s.health = c.health;
    s.replicas = c.replicas;
    s.inflight = c.inflight;
    s.concurrency_per_replica = c.settings.concurrency_per_replica;
    s.unit_cost = c.settings.unit_cost;
    s.latency_prior = c.settings.latency_prior;
    s.cold_start_duration = c.settings.cold_start_duration;
    s.latency_stats = c.window.latency_stats();
    // Unit costs are configured, not sampled: a single seed observation
    // per service lets cross-candidate pooling span the price range.
    s.cost_stats.window_duration = telemetry_window_;
    s.cost_stats.add(c.settings.unit_cost);
    s.avg_latency =
        c.window.avg_success_latency().value_or(c.settings.latency_prior);
    s.request_rate = c.window.request_rate(telemetry_window_, now);
    s.window_success_latency_sum = c.window.success_latency_sum();
    s.window_success_count = c.window.success_count();
    s.window_outcome_count = c.window.outcome_count();
    snap.services.push_back(std::move(s));
  }
  return snap;
}

std::vector<std::string> ServiceRegistry::service_ids() const {
  std::lock_guard<std::mutex> lock(mutex_);
  std::vector<std::string> ids;
  ids.reserve(cells_.size());
  for (const auto& [id, c] : cells_) ids.push_back(id);
  return ids;
}

std::vector<ModelSpec> ServiceRegistry::models() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return models_;
}

std::vector<const ServiceInstance*> healthy_candidates(
    const RegistrySnapshot& snapshot, bool allow_cold_start) {
  std::vector<const ServiceInstance*> out;
  for (const auto& s : snapshot.services) {
    if (s.health != HealthState::Healthy) continue;
    if (s.replicas == 0 && !allow_cold_start) continue;
    out.push_back(&s);
  }
  return out;
}

}  // namespace ps
