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

#include "ps/sim.hpp"

#include <algorithm>
#include <cmath>

#include "ps/errors.hpp"

namespace ps {

namespace {

using nlohmann::json;

// Same-time processing order: finish work first, then add capacity, then
// observe (scaling), then admit new arrivals.
int kind_priority(SimEventKind k) {
  switch (k) {
    case SimEventKind::FirstToken: return 0;
    case SimEventKind::Completion: return 1;
    case SimEventKind::Failure: return 2;
    case SimEventKind::ReplicaReady: return 3;
    case SimEventKind::ScaleApplied: return 4;
    case SimEventKind::ReplicaRetired: return 5;
    case SimEventKind::ScalingTick: return 6;
    case SimEventKind::Arrival: return 7;
  }
  return 8;
}

}  // namespace

const char* to_string(SimEventKind k) {
  switch (k) {
    case SimEventKind::Arrival: return "arrival";
    case SimEventKind::ReplicaReady: return "replica_ready";
    case SimEventKind::FirstToken: return "first_token";
    case SimEventKind::Completion: return "completion";
    case SimEventKind::Failure: return "failure";
    case SimEventKind::ScaleApplied: return "scale_applied";
    case SimEventKind::ReplicaRetired: return "replica_retired";
    case SimEventKind::ScalingTick: return "scaling_tick";
  }
  return "unknown";
}

const char* to_string(SelectionKind k) {
  switch (k) {
    case SelectionKind::MultiObjective: return "multi_objective";
    case SelectionKind::LatencyOnly: return "latency_only";
    case SelectionKind::Random: return "random";
  }
  return "unknown";
}

bool EventQueue::Later::operator()(const SimEvent& a, const SimEvent& b) const {
  if (a.time != b.time) return a.time > b.time;
  const int pa = kind_priority(a.kind);
  const int pb = kind_priority(b.kind);
  if (pa != pb) return pa > pb;
  return a.seq > b.seq;
}

void EventQueue::schedule(SimEvent event) {
  event.seq = next_seq_++;
  heap_.push(std::move(event));
}

SimEvent EventQueue::pop() {
  SimEvent e = heap_.top();
  heap_.pop();
  return e;
}

BackendPoolSim::BackendPoolSim(EventQueue& queue, std::uint64_t seed,
                               double cold_start_timeout)
    : queue_(queue), rng_(seed), cold_start_timeout_(cold_start_timeout) {}

void BackendPoolSim::add_service(const ServiceCellConfig& cfg,
                                 int initial_replicas) {
  const std::string id = make_service_id(cfg.model_id, cfg.backend_id);
  if (services_.count(id) != 0) {
    throw ConflictError("sim service already configured: " + id);
  }
  Service svc;
  svc.cfg = cfg;
  for (int i = 0; i < initial_replicas; ++i) {
    svc.replicas.push_back({svc.next_replica_id++, 0, false});
  }
  services_.emplace(id, std::move(svc));
  model_cells_[cfg.model_id].push_back(id);
  std::sort(model_cells_[cfg.model_id].begin(),
            model_cells_[cfg.model_id].end());
}

BackendPoolSim::Service& BackendPoolSim::service(
    const std::string& service_id) {
  auto it = services_.find(service_id);
  if (it == services_.end()) {
    throw ConfigError("unknown sim service: " + service_id);
  }
  return it->second;
}

const BackendPoolSim::Service& BackendPoolSim::service(
    const std::string& service_id) const {
  auto it = services_.find(service_id);
  if (it == services_.end()) {
    throw ConfigError("unknown sim service: " + service_id);
  }
  return it->second;
}

int BackendPoolSim::ready_nondraining(const Service& svc) const {
  int n = 0;
  for (const auto& r : svc.replicas) {
    if (!r.draining) ++n;
  }
  return n;
}

void BackendPoolSim::advance_accounting(Service& svc, double now) {
  const double dt = now - svc.acct_time;
  if (dt <= 0.0) {
    svc.acct_time = std::max(svc.acct_time, now);
    return;
  }
  svc.stats.replica_seconds += static_cast<double>(svc.replicas.size()) * dt;
  svc.stats.busy_slot_seconds += static_cast<double>(svc.busy_slots) * dt;
  svc.stats.capacity_slot_seconds +=
      static_cast<double>(svc.replicas.size()) *
      svc.cfg.concurrency_per_replica * dt;
  svc.stats.in_system_integral += static_cast<double>(svc.in_system) * dt;
  svc.acct_time = now;
}

void BackendPoolSim::emit(SimEvent event) {
  if (trace_sink != nullptr) trace_sink->push_back(std::move(event));
}

void BackendPoolSim::notify_replicas(const std::string& service_id,
                                     const Service& svc) {
  if (on_replicas_changed) {
    on_replicas_changed(service_id, ready_nondraining(svc));
  }
}

double BackendPoolSim::draw_tokens(const TokenDistribution& dist) {
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

BackendPoolSim::Replica* BackendPoolSim::free_slot(Service& svc) {
  for (auto& r : svc.replicas) {
    if (!r.draining && r.active < svc.cfg.concurrency_per_replica) return &r;
  }
  return nullptr;
}

void BackendPoolSim::start_service(Service& svc, std::uint64_t request_index,
                                   double now) {
  Request& req = requests_.at(request_index);
  Replica* rep = free_slot(svc);
  rep->active += 1;
  svc.busy_slots += 1;
  req.slot_start = now;

  const double first_token = now + svc.cfg.base_ttft;
  const double completion =
      first_token + req.tokens * svc.cfg.per_token_latency;

  SimEvent ft;
  ft.time = first_token;
  ft.kind = SimEventKind::FirstToken;
  ft.service_id = req.service_id;
  ft.request_id = req.id;
  ft.request_index = request_index;
  queue_.schedule(ft);

  SimEvent done;
  done.time = completion;
  done.kind = req.will_fail ? SimEventKind::Failure : SimEventKind::Completion;
  done.service_id = req.service_id;
  done.request_id = req.id;
  done.request_index = request_index;
  done.slot_start = now;
  queue_.schedule(done);
}

void BackendPoolSim::drain_queue(Service& svc, double now) {
  while (!svc.queue.empty() && free_slot(svc) != nullptr) {
    const std::uint64_t idx = svc.queue.front();
    svc.queue.pop_front();
    start_service(svc, idx, now);
  }
}

void BackendPoolSim::submit(std::uint64_t request_index,
                            const std::string& request_id,
                            const std::string& service_id, double now) {
  Service& svc = service(service_id);
  advance_accounting(svc, now);

  Request req;
  req.index = request_index;
  req.id = request_id;
  req.service_id = service_id;
  req.arrival = now;
  req.tokens = draw_tokens(svc.cfg.output_tokens);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  req.will_fail = unit(rng_) < svc.cfg.failure_probability;

  // A cold cell whose start delay exceeds the dispatch budget cannot
  // serve this request in time; fail fast instead of queueing forever.
  if (svc.replicas.empty() &&
      svc.cfg.cold_start_duration > cold_start_timeout_) {
    PoolOutcome out;
    out.request_index = request_index;
    out.request_id = request_id;
    out.service_id = service_id;
    out.arrival = now;
    out.completion = now + cold_start_timeout_;
    out.success = false;
    out.failure_kind = "cold_start_timeout";
    svc.stats.failed += 1;
    if (on_outcome) on_outcome(out);
    return;
  }

  requests_.emplace(request_index, std::move(req));
  svc.in_system += 1;

  if (free_slot(svc) != nullptr) {
    start_service(svc, request_index, now);
  } else {
    svc.queue.push_back(request_index);
  }
}

void BackendPoolSim::retire_replica(Service& svc,
                                    std::vector<Replica>::iterator it,
                                    double now) {
  SimEvent e;
  e.time = now;
  e.kind = SimEventKind::ReplicaRetired;
  e.service_id = make_service_id(svc.cfg.model_id, svc.cfg.backend_id);
  e.replica_id = it->id;
  emit(std::move(e));
  svc.replicas.erase(it);
}

void BackendPoolSim::set_cell_target(const std::string& service_id,
                                     Service& svc, int target, double now) {
  advance_accounting(svc, now);
  int effective = ready_nondraining(svc) + static_cast<int>(svc.pending.size());

  if (target > effective) {
    // Revive draining replicas before paying for cold starts.
    for (auto& r : svc.replicas) {
      if (effective >= target) break;
      if (r.draining) {
        r.draining = false;
        ++effective;
      }
    }
    while (effective < target) {
      const int id = svc.next_replica_id++;
      svc.pending.push_back(id);
      SimEvent e;
      e.time = now + svc.cfg.cold_start_duration;
      e.kind = SimEventKind::ReplicaReady;
      e.service_id = service_id;
      e.replica_id = id;
      queue_.schedule(e);
      ++effective;
    }
  } else if (target < effective) {
    int excess = effective - target;
    // Cancel cold starts first, newest first.
    while (excess > 0 && !svc.pending.empty()) {
      svc.pending.pop_back();
      --excess;
    }
    // Remove idle replicas immediately, highest id first.
    while (excess > 0) {
      auto idle = svc.replicas.end();
      for (auto it = svc.replicas.begin(); it != svc.replicas.end(); ++it) {
        if (!it->draining && it->active == 0) idle = it;
      }
      if (idle == svc.replicas.end()) break;
      retire_replica(svc, idle, now);
      --excess;
    }
    // Drain busy replicas after their requests complete, highest id first.
    for (auto it = svc.replicas.rbegin();
         excess > 0 && it != svc.replicas.rend(); ++it) {
      if (!it->draining) {
        it->draining = true;
        --excess;
      }
    }
  }
  notify_replicas(service_id, svc);
}

void BackendPoolSim::apply_scale(const ScaleCommand& command, double now) {
  auto it = model_cells_.find(command.model_id);
  if (it == model_cells_.end()) return;
  const auto& cells = it->second;
  const int n_cells = static_cast<int>(cells.size());
  for (int i = 0; i < n_cells; ++i) {
    // As-even-as-possible split, remainder to the earliest cells.
    const int share = command.new_replica_count / n_cells +
                      (i < command.new_replica_count % n_cells ? 1 : 0);
    Service& svc = service(cells[i]);
    set_cell_target(cells[i], svc, share, now);
    SimEvent e;
    e.time = now;
    e.kind = SimEventKind::ScaleApplied;
    e.service_id = cells[i];
    e.value = share;
    emit(std::move(e));
  }
}

void BackendPoolSim::ensure_replica(const std::string& service_id,
                                    double now) {
  Service& svc = service(service_id);
  if (!svc.replicas.empty() || !svc.pending.empty()) return;
  advance_accounting(svc, now);
  const int id = svc.next_replica_id++;
  svc.pending.push_back(id);
  SimEvent e;
  e.time = now + svc.cfg.cold_start_duration;
  e.kind = SimEventKind::ReplicaReady;
  e.service_id = service_id;
  e.replica_id = id;
  queue_.schedule(e);
}

void BackendPoolSim::handle(const SimEvent& event) {
  switch (event.kind) {
    case SimEventKind::ReplicaReady: {
      Service& svc = service(event.service_id);
      auto it = std::find(svc.pending.begin(), svc.pending.end(),
                          event.replica_id);
      if (it == svc.pending.end()) return;  // cancelled by a scale-down
      advance_accounting(svc, event.time);
      svc.pending.erase(it);
      svc.replicas.push_back({event.replica_id, 0, false});
      std::sort(svc.replicas.begin(), svc.replicas.end(),
                [](const Replica& a, const Replica& b) { return a.id < b.id; });
      emit(event);
      notify_replicas(event.service_id, svc);
      drain_queue(svc, event.time);
      break;
    }
    case SimEventKind::FirstToken: {
      auto it = requests_.find(event.request_index);
      if (it == requests_.end()) return;
      it->second.first_token = event.time;
      it->second.has_first_token = true;
      emit(event);
      break;
    }
    case SimEventKind::Completion:
      finish_request(event, true);
      break;
    case SimEventKind::Failure:
      finish_request(event, false);
      break;
    default:
      break;
  }
}

void BackendPoolSim::finish_request(const SimEvent& event, bool success) {
  auto rit = requests_.find(event.request_index);
  if (rit == requests_.end()) return;
  Request req = rit->second;
  requests_.erase(rit);

  Service& svc = service(event.service_id);
  advance_accounting(svc, event.time);
  svc.busy_slots -= 1;
  svc.in_system -= 1;
  if (success) {
    svc.stats.completed += 1;
  } else {
    svc.stats.failed += 1;
  }

  // Free the slot on the replica that served this request: any replica
  // with active > 0 works for accounting; prefer draining ones so they
  // retire as soon as possible.
  auto slot = svc.replicas.end();
  for (auto it = svc.replicas.begin(); it != svc.replicas.end(); ++it) {
    if (it->active > 0 && (slot == svc.replicas.end() ||
                           (it->draining && !slot->draining))) {
      slot = it;
    }
  }
  if (slot != svc.replicas.end()) {
    slot->active -= 1;
    if (slot->draining && slot->active == 0) {
      retire_replica(svc, slot, event.time);
      notify_replicas(event.service_id, svc);
    }
  }

  emit(event);

  PoolOutcome out;
  out.request_index = req.index;
  out.request_id = req.id;
  out.service_id = req.service_id;
  out.arrival = req.arrival;
  out.slot_start = req.slot_start;
  out.ttft = req.has_first_token ? req.first_token - req.arrival : 0.0;
  out.has_ttft = req.has_first_token;
  out.completion = event.time;
  out.success = success;
  out.failure_kind = success ? "" : "backend_failure";
  if (on_outcome) on_outcome(out);

  drain_queue(svc, event.time);
}

void BackendPoolSim::finalize(double horizon) {
  for (auto& [id, svc] : services_) {
    advance_accounting(svc, horizon);
    svc.stats.capacity_cost =
        svc.stats.replica_seconds / 3600.0 * svc.cfg.replica_cost_per_hour;
  }
}

int BackendPoolSim::ready_replicas(const std::string& service_id) const {
  return static_cast<int>(service(service_id).replicas.size());
}

int BackendPoolSim::pending_replicas(const std::string& service_id) const {
  return static_cast<int>(service(service_id).pending.size());
}

std::size_t BackendPoolSim::queue_length(const std::string& service_id) const {
  return service(service_id).queue.size();
}

const SimServiceStats& BackendPoolSim::stats(
    const std::string& service_id) const {
  return service(service_id).stats;
}

std::vector<std::string> BackendPoolSim::service_ids() const {
  std::vector<std::string> ids;
  ids.reserve(services_.size());
  for (const auto& [id, svc] : services_) ids.push_back(id);
  return ids;
}

json event_to_json(const SimEvent& event) {
  json j;
  j["time"] = event.time;
  j["kind"] = to_string(event.kind);
  if (!event.service_id.empty()) j["service_id"] = event.service_id;
  if (!event.request_id.empty()) j["request_id"] = event.request_id;
  if (event.replica_id >= 0) j["replica_id"] = event.replica_id;
  if (event.kind == SimEventKind::ScaleApplied) j["replicas"] = event.value;
  if (event.kind == SimEventKind::Completion ||
      event.kind == SimEventKind::Failure) {
    j["slot_start"] = event.slot_start;
  }
  return j;
}

json decision_to_json(const RoutingDecision& d) {
  json j;
  j["prompt_id"] = d.prompt_id;
  j["service_id"] = d.service_id;
  j["model_id"] = d.model_id;
  j["tier"] = to_string(d.tier);
  j["score"] = d.score;
  j["components"] = {{"relevance_hat", d.components.relevance_hat},
                     {"latency_hat", d.components.latency_hat},
                     {"cost_hat", d.components.cost_hat}};
  j["classifier"] = {
      {"probabilities", d.classifier_output.probabilities},
      {"predicted", to_string(d.classifier_output.predicted)},
      {"source", to_string(d.classifier_output.source)}};
  j["cold_start"] = d.cold_start;
  j["decided_at"] = d.decided_at;
  j["profile"] = d.profile_name;
  j["unit_cost"] = d.unit_cost;
  j["latency_estimate"] = d.latency_estimate;
  return j;
}

json SimReport::to_json(bool include_outcomes) const {
  json j;
  j["seed"] = seed;
  j["horizon"] = horizon;
  j["selection"] = selection;
  j["profile"] = profile;
  j["router_mode"] = router_mode;
  j["scaling_mode"] = scaling_mode;
  j["arrivals"] = arrivals;
  j["capacity_cost"] = capacity_cost;
  j["metrics"] = {
      {"n_total", metrics.n_total},
      {"n_success", metrics.n_success},
      {"n_failure", metrics.n_failure},
      {"n_inflight", metrics.n_inflight},
      {"success_rate", metrics.success_rate},
      {"avg_latency", metrics.avg_latency},
      {"ttft_p50", metrics.ttft_p50},
      {"ttft_p95", metrics.ttft_p95},
      {"ttft_p99", metrics.ttft_p99},
      {"throughput", metrics.throughput},
      {"total_cost", metrics.total_cost},
      {"cost_per_query", metrics.cost_per_query},
      {"accuracy", metrics.accuracy},
      {"elapsed", metrics.elapsed},
  };
  json per;
  for (const auto& [id, s] : per_service) {
    per[id] = {{"completed", s.completed},
               {"failed", s.failed},
               {"replica_seconds", s.replica_seconds},
               {"busy_slot_seconds", s.busy_slot_seconds},
               {"capacity_slot_seconds", s.capacity_slot_seconds},
               {"in_system_integral", s.in_system_integral},
               {"capacity_cost", s.capacity_cost},
               {"utilization", s.utilization()}};
  }
  j["per_service"] = per;
  if (include_outcomes) {
    json arr = json::array();
    for (const auto& o : outcomes) {
      arr.push_back({{"request_id", o.request_id},
                     {"service_id", o.service_id},
                     {"arrival", o.arrival},
                     {"ttft", o.ttft},
                     {"latency", o.latency},
                     {"has_ttft", o.has_ttft},
                     {"completed", o.completed},
                     {"success", o.success},
                     {"cold_start", o.cold_start},
                     {"cost", o.cost},
                     {"relevance_weight", o.relevance_weight}});
    }
    j["outcomes"] = arr;
  }
  return j;
}

std::string SimReport::to_json_string(bool include_outcomes) const {
  return to_json(include_outcomes).dump(2);
}

Simulation::Simulation(ScenarioConfig config, SimWiring wiring,
                       std::optional<std::uint64_t> seed_override)
    : config_(std::move(config)), wiring_(std::move(wiring)) {
  seed_ = seed_override.value_or(config_.seed);
  scaling_mode_ = wiring_.scaling_mode_override.value_or(config_.scaling_mode);
  router_mode_ =
      wiring_.router_mode_override.value_or(config_.engine.router.mode);
  const std::string profile_name = wiring_.profile_name.empty()
                                       ? config_.engine.default_profile
                                       : wiring_.profile_name;
  profile_ = config_.engine.profile(profile_name);

  registry_ =
      std::make_unique<ServiceRegistry>(config_.engine.telemetry_window);
  orchestrator_ = std::make_unique<Orchestrator>(
      config_.engine.policy, config_.engine.router.relevance_table);
  pool_ = std::make_unique<BackendPoolSim>(
      queue_, seed_ * 0x9e3779b97f4a7c15ull + 1,
      config_.engine.policy.cold_start_timeout);
  select_rng_.seed(seed_ ^ 0x51ec7a9bd2c3ull);

  for (const auto& cell : config_.engine.services) {
    const ModelSpec& model = config_.engine.model(cell.model_id);
    BackendSpec backend;
    for (const auto& b : config_.engine.backends) {
      if (b.backend_id == cell.backend_id) backend = b;
    }
    ServiceSettings settings;
    settings.unit_cost = cell.unit_cost;
    settings.latency_prior = cell.latency_prior;
    settings.concurrency_per_replica = cell.concurrency_per_replica;
    settings.initial_replicas = cell.initial_replicas;
    settings.cold_start_duration = cell.cold_start_duration;
    const std::string id = registry_->register_service(model, backend, settings);
    unit_costs_[id] = cell.unit_cost;
    pool_->add_service(cell, cell.initial_replicas);
  }
  orchestrator_->init_models(config_.engine.models, 0.0);

  if (!config_.engine.router.classifier_artifact.empty()) {
    classifier_ =
        LinearSoftmaxClassifier::load(config_.engine.router.classifier_artifact);
  }

  pool_->on_replicas_changed = [this](const std::string& id, int replicas) {
    registry_->set_replicas(id, replicas);
  };
  pool_->on_outcome = [this](const PoolOutcome& out) {
    auto it = open_requests_.find(out.request_index);
    if (it == open_requests_.end()) return;
    OutcomeRecord& rec = it->second;
    rec.ttft = out.ttft;
    rec.has_ttft = out.has_ttft;
    rec.latency = out.completion - out.arrival;
    rec.completed = true;
    rec.success = out.success;
    rec.cost = unit_costs_.at(out.service_id);
    registry_->record_sample(out.service_id, rec.latency,
                             out.has_ttft ? out.ttft : rec.latency,
                             out.success, out.completion);
    registry_->adjust_inflight(out.service_id, -1);
    outcomes_.push_back(rec);
    open_requests_.erase(it);
  };

  // Materialize the arrival stream.
  switch (config_.arrivals.kind) {
    case ArrivalConfig::Kind::Replay:
      trace_ = load_trace_jsonl(config_.arrivals.trace_path);
      break;
    case ArrivalConfig::Kind::Synthetic: {
      SyntheticTraceSpec spec = config_.arrivals.synthetic;
      if (spec.count == 0) {
        spec.count = static_cast<std::size_t>(
                         std::ceil(spec.rate * config_.horizon * 1.5)) +
                     100;
      }
      trace_ = generate_synthetic_trace(spec);
      break;
    }
    case ArrivalConfig::Kind::Bursty:
      trace_ = generate_bursty_trace(config_.arrivals.bursty);
      break;
    case ArrivalConfig::Kind::FixedRate:
    case ArrivalConfig::Kind::Poisson: {
      SyntheticTraceSpec spec;
      spec.rate = config_.arrivals.rate;
      spec.poisson = config_.arrivals.kind == ArrivalConfig::Kind::Poisson;
      spec.seed = seed_;
      spec.count = config_.arrivals.count > 0
                       ? config_.arrivals.count
                       : static_cast<std::size_t>(std::ceil(
                             spec.rate * config_.horizon * 1.5)) +
                             100;
      trace_ = generate_synthetic_trace(spec);
      break;
    }
  }
}

ClassifierOutput Simulation::classify(const Prompt& prompt) const {
  const RouterConfig& rc = config_.engine.router;
  switch (router_mode_) {
    case RouterMode::Keyword:
      return keyword_classify(prompt, rc.keyword_rules);
    case RouterMode::Semantic: {
      static const LinearSoftmaxClassifier untrained;
      return semantic_classify(
          prompt, classifier_ ? *classifier_ : untrained);
    }
    case RouterMode::Hybrid:
      return hybrid_classify(prompt, rc.keyword_rules,
                             classifier_ ? &*classifier_ : nullptr,
                             rc.confidence_threshold);
  }
  return keyword_classify(prompt, rc.keyword_rules);
}

RoutingDecision Simulation::select(const Prompt& prompt,
                                   const ClassifierOutput& output,
                                   const RegistrySnapshot& snapshot,
                                   double now) {
  if (wiring_.selection == SelectionKind::MultiObjective) {
    return orchestrator_->select_service(prompt, snapshot, profile_, output,
                                         now);
  }
  const auto scored =
      orchestrator_->score_candidates(snapshot, profile_, output);
  if (scored.empty()) {
    throw NoHealthyServiceError("no healthy service for prompt " + prompt.id);
  }
  std::size_t pick = 0;
  if (wiring_.selection == SelectionKind::Random) {
    std::uniform_int_distribution<std::size_t> d(0, scored.size() - 1);
    pick = d(select_rng_);
  } else {  // LatencyOnly
    for (std::size_t i = 1; i < scored.size(); ++i) {
      const auto& a = scored[i];
      const auto& b = scored[pick];
      const bool better =
          a.latency_estimate < b.latency_estimate ||
          (a.latency_estimate == b.latency_estimate &&
           (a.service->unit_cost < b.service->unit_cost ||
            (a.service->unit_cost == b.service->unit_cost &&
             a.service->service_id < b.service->service_id)));
      if (better) pick = i;
    }
  }
  return orchestrator_->make_decision(prompt, scored[pick], profile_, output,
                                      now);
}

void Simulation::process_arrival(const SimEvent& event) {
  const TraceRecord& rec = trace_[event.request_index];
  const double now = event.time;
  const std::string id =
      rec.id ? *rec.id : "p" + std::to_string(event.request_index);
  Prompt prompt = Prompt::make(id, rec.text, now,
                               rec.benchmark_tag.empty()
                                   ? std::nullopt
                                   : std::make_optional(rec.benchmark_tag));

  const ClassifierOutput output = classify(prompt);
  const RegistrySnapshot snapshot = registry_->snapshot(now);

  OutcomeRecord outcome;
  outcome.request_id = id;
  outcome.arrival = now;

  RoutingDecision decision;
  try {
    decision = select(prompt, output, snapshot, now);
  } catch (const NoHealthyServiceError&) {
    outcome.completed = true;
    outcome.success = false;
    outcomes_.push_back(outcome);
    return;
  }

  const ComplexityClass effective_class =
      rec.label ? *rec.label : output.predicted;
  outcome.service_id = decision.service_id;
  outcome.cold_start = decision.cold_start;
  outcome.relevance_weight =
      config_.engine.router.relevance_table.at(effective_class, decision.tier);

  registry_->record_request(decision.service_id, now);
  registry_->adjust_inflight(decision.service_id, 1);
  orchestrator_->note_request(decision.model_id, now);
  if (collect_decisions_) decisions_.push_back(decision);

  const std::uint64_t index = event.request_index;
  open_requests_[index] = outcome;
  if (decision.cold_start) pool_->ensure_replica(decision.service_id, now);
  pool_->submit(index, id, decision.service_id, now);
}

void Simulation::schedule_next_arrival() {
  if (next_record_ >= trace_.size()) return;
  const double t = trace_[next_record_].arrival_offset;
  if (t > config_.horizon) return;
  SimEvent e;
  e.time = t;
  e.kind = SimEventKind::Arrival;
  e.request_index = next_record_;
  e.request_id =
      trace_[next_record_].id.value_or("p" + std::to_string(next_record_));
  queue_.schedule(e);
  ++next_record_;
}

SimReport Simulation::run(bool collect_events, bool collect_decisions) {
  collect_decisions_ = collect_decisions;
  if (collect_events) pool_->trace_sink = &events_;

  schedule_next_arrival();
  if (scaling_mode_ == ScalingMode::Dynamic) {
    SimEvent tick;
    tick.time = 0.0;
    tick.kind = SimEventKind::ScalingTick;
    queue_.schedule(tick);
  }

  std::size_t arrivals = 0;
  while (!queue_.empty() && queue_.top().time <= config_.horizon) {
    const SimEvent event = queue_.pop();
    switch (event.kind) {
      case SimEventKind::Arrival:
        if (collect_events) events_.push_back(event);
        ++arrivals;
        process_arrival(event);
        schedule_next_arrival();
        break;
      case SimEventKind::ScalingTick: {
        if (collect_events) events_.push_back(event);
        const RegistrySnapshot snapshot = registry_->snapshot(event.time);
        for (const ScaleCommand& cmd :
             orchestrator_->scaling_tick(snapshot, event.time)) {
          pool_->apply_scale(cmd, event.time);
        }
        SimEvent next = event;
        next.time = event.time + config_.engine.policy.evaluation_period;
        if (next.time <= config_.horizon) queue_.schedule(next);
        break;
      }
      default:
        pool_->handle(event);
        break;
    }
  }

  pool_->finalize(config_.horizon);

  // Requests still open at the horizon count as in-flight.
  for (auto& [index, rec] : open_requests_) {
    outcomes_.push_back(rec);
  }
  open_requests_.clear();
  std::sort(outcomes_.begin(), outcomes_.end(),
            [](const OutcomeRecord& a, const OutcomeRecord& b) {
              return a.arrival != b.arrival ? a.arrival < b.arrival
                                            : a.request_id < b.request_id;
            });

  SimReport report;
  report.seed = seed_;
  report.horizon = config_.horizon;
  report.selection = to_string(wiring_.selection);
  report.profile = profile_.name;
  report.router_mode = to_string(router_mode_);
  report.scaling_mode = to_string(scaling_mode_);
  report.arrivals = arrivals;
  for (const auto& id : pool_->service_ids()) {
    report.per_service[id] = pool_->stats(id);
    report.capacity_cost += pool_->stats(id).capacity_cost;
  }
  if (!outcomes_.empty()) {
    report.metrics =
        compute_metrics(outcomes_, config_.horizon, report.capacity_cost);
  }
  report.outcomes = std::move(outcomes_);
  report.decisions = std::move(decisions_);
  report.events = std::move(events_);
  return report;
}

}  // namespace ps
