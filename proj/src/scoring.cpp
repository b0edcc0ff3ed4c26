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

#include "ps/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ps/errors.hpp"

namespace ps {

namespace {

constexpr double kComponentSlack = 1e-9;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

void check_component(double v, const char* name) {
  if (!(v >= -kComponentSlack && v <= 1.0 + kComponentSlack)) {
    throw std::invalid_argument(std::string("score component ") + name +
                                " outside [0,1]: " + std::to_string(v));
  }
}

}  // namespace

NormalizedWeights WeightProfile::normalized() const {
  return normalize_weights(*this);
}

void NormalizationStats::add(double value) {
  if (sample_count == 0) {
    metric_min = metric_max = value;
  } else {
    metric_min = std::min(metric_min, value);
    metric_max = std::max(metric_max, value);
  }
  ++sample_count;
}

void NormalizationStats::merge(const NormalizationStats& other) {
  if (other.sample_count == 0) return;
  if (sample_count == 0) {
    *this = other;
    return;
  }
  metric_min = std::min(metric_min, other.metric_min);
  metric_max = std::max(metric_max, other.metric_max);
  sample_count += other.sample_count;
  window_duration = std::max(window_duration, other.window_duration);
}

NormalizedWeights normalize_weights(const WeightProfile& profile) {
  if (profile.alpha < 0.0 || profile.lambda < 0.0 || profile.mu < 0.0) {
    throw std::invalid_argument("profile '" + profile.name +
                                "' has a negative preference coefficient");
  }
  const double sum = profile.alpha + profile.lambda + profile.mu;
  if (!(sum > 0.0)) {
    throw std::invalid_argument("profile '" + profile.name +
                                "' has all-zero preference coefficients");
  }
  return NormalizedWeights{profile.alpha / sum, profile.lambda / sum,
                           profile.mu / sum};
}

double normalize_metric(double value, const NormalizationStats& stats) {
  if (stats.sample_count < 2) return 0.5;
  const double range = stats.metric_max - stats.metric_min;
  if (range < kDegenerateRangeEpsilon) return 0.5;
  return clamp01((value - stats.metric_min) / range);
}

double score(const ScoreComponents& components, const WeightProfile& profile,
             ScoreRule rule) {
  check_component(components.relevance_hat, "relevance_hat");
  check_component(components.latency_hat, "latency_hat");
  check_component(components.cost_hat, "cost_hat");
  const double r = clamp01(components.relevance_hat);
  const double t = clamp01(components.latency_hat);
  const double c = clamp01(components.cost_hat);

  if (rule == ScoreRule::LegacyRaw) {
    // Raw preference form over normalized metrics; not bounded to [0,1].
    return profile.alpha * r - profile.lambda * (1.0 - t) -
           profile.mu * (1.0 - c);
  }

  const NormalizedWeights w = normalize_weights(profile);
  return w.relevance * r + w.latency * t + w.cost * c;
}

const ScoredCandidate& select_best(std::span<const ScoredCandidate> candidates,
                                   const WeightProfile& profile,
                                   ScoreRule rule) {
  if (candidates.empty()) {
    throw NoHealthyServiceError("no candidates to select from");
  }
  const ScoredCandidate* best = &candidates[0];
  double best_score = score(best->components, profile, rule);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const ScoredCandidate& cand = candidates[i];
    const double s = score(cand.components, profile, rule);
    bool better = s > best_score;
    if (s == best_score) {
      if (cand.raw_cost < best->raw_cost) {
        better = true;
      } else if (cand.raw_cost == best->raw_cost &&
                 cand.service_id < best->service_id) {
        better = true;
      }
    }
    if (better) {
      best = &cand;
      best_score = s;
    }
  }
  return *best;
}

}  // namespace ps
