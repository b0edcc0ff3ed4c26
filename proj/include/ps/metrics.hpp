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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ps {

// Reference point from published routing experiments at cluster scale;
// surfaced in reports for context, never asserted against.
inline constexpr double kReferenceEfficiencyEta = 1.43;

// Per-request outcome consumed by metric computation. `relevance_weight`
// is the routed tier's relevance against the labeled (or predicted)
// complexity, fixed at decision time.
struct OutcomeRecord {
  std::string request_id;
  std::string service_id;
  double arrival = 0.0;
  double ttft = 0.0;        // valid when has_ttft
  double latency = 0.0;     // valid when completed
  bool has_ttft = false;
  bool completed = false;
  bool success = false;
  bool cold_start = false;
  double cost = 0.0;
  double relevance_weight = 0.0;
};

struct MetricsReport {
  std::size_t n_total = 0;
  std::size_t n_success = 0;
  std::size_t n_failure = 0;
  std::size_t n_inflight = 0;  // unfinished at horizon
  double success_rate = 0.0;   // n_success / n_total, exact
  double avg_latency = 0.0;    // successes only
  double ttft_p50 = 0.0;
  double ttft_p95 = 0.0;
  double ttft_p99 = 0.0;
  double throughput = 0.0;  // completed runs per second of elapsed span
  double total_cost = 0.0;  // request costs plus capacity cost
  double cost_per_query = 0.0;
  double accuracy = 0.0;  // mean of success * relevance_weight
  double elapsed = 0.0;
};

// Nearest-rank percentile: the ceil(p/100 * N)-th smallest value.
double percentile_nearest_rank(std::span<const double> sorted_values,
                               double percentile);

// Aggregates outcomes into a report. `elapsed_span` is the wall/virtual
// duration the outcomes cover; `capacity_cost` adds replica-uptime cost
// on top of per-request costs. Throws EmptyInputError on no outcomes.
MetricsReport compute_metrics(std::span<const OutcomeRecord> outcomes,
                              double elapsed_span, double capacity_cost = 0.0);

// Routing efficiency: (A_r/A_b) / (C_r/C_b). Throws
// UndefinedEfficiencyError when a denominator is zero or negative.
double compute_efficiency(double routed_accuracy, double baseline_accuracy,
                          double routed_cost, double baseline_cost);

// Min-max scaling onto [0,10]. Requires at least two distinct values;
// throws DegenerateRangeError otherwise.
std::vector<double> normalize_radar(std::span<const double> values);

}  // namespace ps
