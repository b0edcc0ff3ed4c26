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
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ps/classifier.hpp"
#include "ps/config.hpp"
#include "ps/metrics.hpp"
#include "ps/orchestrator.hpp"
#include "ps/registry.hpp"

namespace ps {

enum class SimEventKind {
  Arrival,
  ReplicaReady,
  FirstToken,
  Completion,
  Failure,
  ScaleApplied,
  ReplicaRetired,
  ScalingTick,
};
const char* to_string(SimEventKind k);

struct SimEvent {
  double time = 0.0;
  SimEventKind kind = SimEventKind::Arrival;
  std::uint64_t seq = 0;  // schedule order, breaks same-time/kind ties
  std::string service_id;
  std::string request_id;
  std::uint64_t request_index = 0;
  int replica_id = -1;
  int value = 0;           // ScaleApplied: commanded replica count
  double slot_start = 0.0;  // Completion/Failure: service start time
};

// Pending events ordered by (time, kind processing priority, seq);
// identical inputs always replay to the identical order.
class EventQueue {
 public:
  void schedule(SimEvent event);
  bool empty() const { return heap_.empty(); }
  const SimEvent& top() const { return heap_.top(); }
  SimEvent pop();

 private:
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const;
  };
  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

struct SimServiceStats {
  std::uint64_t completed = 0;
  std::uint64_t failed = 0;
  double replica_seconds = 0.0;
  double busy_slot_seconds = 0.0;
  double capacity_slot_seconds = 0.0;
  double in_system_integral = 0.0;  // time-integral of queued + in service
  double capacity_cost = 0.0;

  double utilization() const {
    return capacity_slot_seconds > 0.0
               ? busy_slot_seconds / capacity_slot_seconds
               : 0.0;
  }
};

// Raw finish notification from the pool; the engine layer enriches it
// into an OutcomeRecord.
struct PoolOutcome {
  std::uint64_t request_index = 0;
  std::string request_id;
  std::string service_id;
  double arrival = 0.0;
  double slot_start = 0.0;
  double ttft = 0.0;
  double completion = 0.0;
  bool has_ttft = false;
  bool success = false;
  std::string failure_kind;  // "backend_failure" | "cold_start_timeout"
};

// Deterministic replica/queue model of the backend pool. Single-threaded;
// all timing flows through the shared EventQueue.
class BackendPoolSim {
 public:
  BackendPoolSim(EventQueue& queue, std::uint64_t seed,
                 double cold_start_timeout);

  void add_service(const ServiceCellConfig& cfg, int initial_replicas);

  // Admits a request at `now`: starts service if a slot is free, queues
  // FIFO otherwise. Unknown services are a configuration error.
  void submit(std::uint64_t request_index, const std::string& request_id,
              const std::string& service_id, double now);

  // Distributes a per-model replica target across the model's cells in
  // lexicographic service order, largest shares first. Scale-down removes
  // idle replicas immediately and drains busy ones.
  void apply_scale(const ScaleCommand& command, double now);

  // Spins one replica for a cold cell unless one is already starting.
  void ensure_replica(const std::string& service_id, double now);

  // Pool-owned event kinds: ReplicaReady, FirstToken, Completion, Failure.
  void handle(const SimEvent& event);

  void finalize(double horizon);

  int ready_replicas(const std::string& service_id) const;
  int pending_replicas(const std::string& service_id) const;
  std::size_t queue_length(const std::string& service_id) const;
  const SimServiceStats& stats(const std::string& service_id) const;
  std::vector<std::string> service_ids() const;

  std::function<void(const PoolOutcome&)> on_outcome;
  std::function<void(const std::string&, int)> on_replicas_changed;
  std::vector<SimEvent>* trace_sink = nullptr;

 private:
  struct Replica {
    int id = 0;
    int active = 0;
    bool draining = false;
  };

  struct Request {
    std::uint64_t index = 0;
    std::string id;
    std::string service_id;
    double arrival = 0.0;
    double tokens = 0.0;
    bool will_fail = false;
    double slot_start = -1.0;
    double first_token = -1.0;
    bool has_first_token = false;
  };

  struct Service {
    ServiceCellConfig cfg;
    std::vector<Replica> replicas;  // ready, ascending id
    std::vector<int> pending;       // cold-starting replica ids, ascending
    std::deque<std::uint64_t> queue;
    int next_replica_id = 0;
    int busy_slots = 0;
    int in_system = 0;
    double acct_time = 0.0;
    SimServiceStats stats;
  };

  Service& service(const std::string& service_id);
  const Service& service(const std::string& service_id) const;
  void advance_accounting(Service& svc, double now);
  void set_cell_target(const std::string& service_id, Service& svc,
                       int target, double now);
  Replica* free_slot(Service& svc);
  void start_service(Service& svc, std::uint64_t request_index, double now);
  void drain_queue(Service& svc, double now);
  void finish_request(const SimEvent& event, bool success);
  void retire_replica(Service& svc, std::vector<Replica>::iterator it,
                      double now);
  int ready_nondraining(const Service& svc) const;
  void emit(SimEvent event);
  void notify_replicas(const std::string& service_id, const Service& svc);
  double draw_tokens(const TokenDistribution& dist);

  EventQueue& queue_;
  std::mt19937_64 rng_;
  double cold_start_timeout_;
  std::map<std::string, Service> services_;
  std::map<std::string, std::vector<std::string>> model_cells_;
  std::map<std::uint64_t, Request> requests_;
};

enum class SelectionKind { MultiObjective, LatencyOnly, Random };
const char* to_string(SelectionKind k);

// Strategy knobs a simulation run is wired with.
struct SimWiring {
  SelectionKind selection = SelectionKind::MultiObjective;
  std::string profile_name;  // empty: engine default
  std::optional<RouterMode> router_mode_override;
  std::optional<ScalingMode> scaling_mode_override;
};

struct SimReport {
  std::uint64_t seed = 0;
  double horizon = 0.0;
  std::string selection;
  std::string profile;
  std::string router_mode;
  std::string scaling_mode;
  std::size_t arrivals = 0;
  double capacity_cost = 0.0;
  MetricsReport metrics;
  std::map<std::string, SimServiceStats> per_service;
  std::vector<OutcomeRecord> outcomes;
  std::vector<RoutingDecision> decisions;  // populated on request
  std::vector<SimEvent> events;            // populated on request

  nlohmann::json to_json(bool include_outcomes = false) const;
  std::string to_json_string(bool include_outcomes = false) const;
};

nlohmann::json event_to_json(const SimEvent& event);
nlohmann::json decision_to_json(const RoutingDecision& decision);

// Closed-loop run: arrivals from the scenario's trace or generator,
// routing through the registry/orchestrator, backends simulated by
// BackendPoolSim, scaling ticks interleaved when the scenario is dynamic.
class Simulation {
 public:
  explicit Simulation(ScenarioConfig config, SimWiring wiring = {},
                      std::optional<std::uint64_t> seed_override = std::nullopt);

  SimReport run(bool collect_events = false, bool collect_decisions = false);

 private:
  ClassifierOutput classify(const Prompt& prompt) const;
  RoutingDecision select(const Prompt& prompt, const ClassifierOutput& output,
                         const RegistrySnapshot& snapshot, double now);
  void process_arrival(const SimEvent& event);
  void schedule_next_arrival();

  ScenarioConfig config_;
  SimWiring wiring_;
  std::uint64_t seed_;
  ScalingMode scaling_mode_;
  RouterMode router_mode_;
  WeightProfile profile_;

  EventQueue queue_;
  std::unique_ptr<ServiceRegistry> registry_;
  std::unique_ptr<Orchestrator> orchestrator_;
  std::unique_ptr<BackendPoolSim> pool_;
  std::optional<LinearSoftmaxClassifier> classifier_;
  std::mt19937_64 select_rng_;

  std::map<std::string, double> unit_costs_;
  std::vector<TraceRecord> trace_;
  std::size_t next_record_ = 0;
  std::uint64_t next_request_index_ = 0;
  std::map<std::uint64_t, OutcomeRecord> open_requests_;
  std::vector<OutcomeRecord> outcomes_;
  std::vector<RoutingDecision> decisions_;
  std::vector<SimEvent> events_;
  bool collect_decisions_ = false;
};

}  // namespace ps
