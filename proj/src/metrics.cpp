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

#include "ps/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "ps/errors.hpp"

namespace ps {

double percentile_nearest_rank(std::span<const double> sorted_values,
                               double percentile) {
  if (sorted_values.empty()) return 0.0;
  const double p = std::clamp(percentile, 0.0, 100.0);
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(p / 100.0 * static_cast<double>(sorted_values.size())));
  rank = std::clamp<std::size_t>(rank, 1, sorted_values.size());
  return sorted_values[rank - 1];
}

MetricsReport compute_metrics(std::span<const OutcomeRecord> outcomes,
                              double elapsed_span, double capacity_cost) {
  if (outcomes.empty()) {
    throw EmptyInputError("no outcomes to compute metrics over");
  }
  MetricsReport r;
  r.n_total = outcomes.size();
  r.elapsed = elapsed_span;

  double success_latency_sum = 0.0;
  double accuracy_sum = 0.0;
  std::vector<double> ttfts;
  ttfts.reserve(outcomes.size());
  for (const auto& o : outcomes) {
    if (o.completed) {
      if (o.success) {
        ++r.n_success;
        success_latency_sum += o.latency;
        accuracy_sum += o.relevance_weight;
      } else {
        ++r.n_failure;
      }
    } else {
      ++r.n_inflight;
    }
    if (o.has_ttft) ttfts.push_back(o.ttft);
    r.total_cost += o.cost;
  }
  r.total_cost += capacity_cost;

  r.success_rate =
      static_cast<double>(r.n_success) / static_cast<double>(r.n_total);
  r.avg_latency =
      r.n_success > 0 ? success_latency_sum / static_cast<double>(r.n_success)
                      : 0.0;
  r.accuracy = accuracy_sum / static_cast<double>(r.n_total);

  std::sort(ttfts.begin(), ttfts.end());
  r.ttft_p50 = percentile_nearest_rank(ttfts, 50.0);
  r.ttft_p95 = percentile_nearest_rank(ttfts, 95.0);
  r.ttft_p99 = percentile_nearest_rank(ttfts, 99.0);

  const std::size_t completed = r.n_success + r.n_failure;
  r.throughput = elapsed_span > 0.0
                     ? static_cast<double>(completed) / elapsed_span
                     : 0.0;
  r.cost_per_query = r.total_cost / static_cast<double>(r.n_total);
  return r;
}

double compute_efficiency(double routed_accuracy, double baseline_accuracy,
                          double routed_cost, double baseline_cost) {
  if (!(baseline_accuracy > 0.0)) {
    throw UndefinedEfficiencyError("baseline accuracy must be positive");
  }
  if (!(baseline_cost > 0.0) || !(routed_cost > 0.0)) {
    throw UndefinedEfficiencyError("costs must be positive");
  }
  return (routed_accuracy / baseline_accuracy) / (routed_cost / baseline_cost);
}

std::vector<double> normalize_radar(std::span<const double> values) {
  if (values.size() < 2) {
    throw DegenerateRangeError("radar normalization needs at least 2 values");
  }
  const auto [min_it, max_it] =
      std::minmax_element(values.begin(), values.end());
  const double range = *max_it - *min_it;
  if (!(range > 0.0)) {
    throw DegenerateRangeError("radar normalization needs distinct values");
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(10.0 * (v - *min_it) / range);
  return out;
}

}  // namespace ps
