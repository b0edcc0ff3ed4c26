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
#include <span>
#include <string>

namespace ps {

// Guard for degenerate min==max normalization windows.
inline constexpr double kDegenerateRangeEpsilon = 1e-9;

// Convex weights derived from a preference triple; sum to 1.
struct NormalizedWeights {
  double relevance = 0.0;
  double latency = 0.0;
  double cost = 0.0;
};

// Operator preference profile. Raw coefficients are non-negative and at
// least one must be positive; scoring always uses the normalized form.
struct WeightProfile {
  std::string name;
  double alpha = 0.0;   // relevance preference
  double lambda = 0.0;  // latency preference
  double mu = 0.0;      // cost preference

  NormalizedWeights normalized() const;
};

// Rolling min/max of one metric over a telemetry window.
struct NormalizationStats {
  double metric_min = 0.0;
  double metric_max = 0.0;
  std::size_t sample_count = 0;
  double window_duration = 0.0;

  void add(double value);
  // Pools another window's extrema into this one, e.g. to normalize a
  // metric across every candidate instead of against one service's history.
  void merge(const NormalizationStats& other);
};

// Goodness scores in [0,1]; latency and cost are already inverted, so
// higher is better on every axis.
struct ScoreComponents {
  double relevance_hat = 0.0;
  double latency_hat = 0.0;
  double cost_hat = 0.0;
};

enum class ScoreRule {
  Convex,     // weighted convex combination, bounded to [0,1]
  LegacyRaw,  // alpha*R - lambda*normT - mu*normC, unbounded; opt-in only
};

struct ScoredCandidate {
  std::string service_id;
  ScoreComponents components;
  double raw_cost = 0.0;  // tie-break key: lower raw cost wins
};

// Throws std::invalid_argument for negative coefficients or an all-zero
// profile.
NormalizedWeights normalize_weights(const WeightProfile& profile);

// (value - min)/(max - min) clamped to [0,1]. Returns the neutral 0.5
// when fewer than two samples exist or the window range is degenerate.
// Total: never throws.
double normalize_metric(double value, const NormalizationStats& stats);

// Components must lie in [0,1] (tolerance 1e-9 for accumulated rounding);
// anything further out is a contract violation and throws.
double score(const ScoreComponents& components, const WeightProfile& profile,
             ScoreRule rule = ScoreRule::Convex);

// Argmax over candidates; ties broken by lower raw_cost, then
// lexicographic service_id. Throws NoHealthyServiceError on empty input.
const ScoredCandidate& select_best(std::span<const ScoredCandidate> candidates,
                                   const WeightProfile& profile,
                                   ScoreRule rule = ScoreRule::Convex);

}  // namespace ps
