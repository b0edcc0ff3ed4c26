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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ps/config.hpp"
#include "ps/metrics.hpp"
#include "ps/sim.hpp"

namespace ps {

// One benchmark strategy: a selection rule plus a scaling mode, with
// optional profile / router-mode overrides. Text form:
//   random | latency-only | multi[:profile] | keyword[:profile] |
//   semantic[:profile] | hybrid[:profile]    each with optional
//   "+static" / "+dynamic" suffix.
struct StrategySpec {
  SelectionKind selection = SelectionKind::MultiObjective;
  std::string profile_name;  // empty: scenario default
  std::optional<RouterMode> router_mode;
  std::optional<ScalingMode> scaling;

  static StrategySpec parse(const std::string& text);
  std::string label() const;
  SimWiring wiring() const;
};

std::vector<StrategySpec> parse_strategy_list(const std::string& csv);

struct StrategyResult {
  StrategySpec spec;
  std::string label;
  MetricsReport metrics;
  double composite = 0.0;        // equal-weight goodness across strategies
  double eta_vs_baseline = 1.0;  // efficiency relative to the first row
  double accuracy_gain_pct = 0.0;
  std::map<std::string, double> radar;  // per-dimension scores in [0,10]
};

struct ComparisonReport {
  std::vector<StrategyResult> rows;
  std::string baseline_label;
  std::uint64_t seed = 0;

  std::string to_csv() const;
  nlohmann::json to_json() const;
  std::string to_table() const;  // human-readable
};

// Runs every strategy over the identical scenario and seed, then derives
// composite scores, radar data, and gains against the first strategy.
ComparisonReport run_comparison(const ScenarioConfig& scenario,
                                const std::vector<StrategySpec>& strategies,
                                std::uint64_t seed);

struct GridPointResult {
  double alpha = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  MetricsReport metrics;
};

struct GridSearchResult {
  std::vector<GridPointResult> table;
  double accuracy_floor = 0.0;
  // Objective name -> index into table, or -1 when infeasible.
  std::map<std::string, int> best;

  nlohmann::json to_json() const;
};

// Exhaustively evaluates (alpha, lambda, mu) grid points on the scenario
// under four operator objectives: max accuracy; min cost and min latency
// subject to an accuracy floor (default 95% of the best achievable); max
// composite. Infeasible objectives are reported, not fatal.
GridSearchResult grid_search(const ScenarioConfig& scenario,
                             const std::vector<std::array<double, 3>>& grid,
                             std::optional<double> accuracy_floor = std::nullopt);

// Convenience axis expansion: the cartesian cube of `values`, skipping
// the all-zero point.
std::vector<std::array<double, 3>> expand_grid(const std::vector<double>& values);

struct TrainArtifactReport {
  LinearSoftmaxClassifier::TrainReport train;
  std::string artifact_path;
};

// Trains the reference classifier on a labeled corpus and writes the
// versioned artifact. Retraining with the same inputs and seed writes
// byte-identical artifacts.
TrainArtifactReport train_reference_classifier(
    const std::vector<LabeledPrompt>& corpus,
    const LinearSoftmaxClassifier::TrainOptions& options,
    std::uint32_t feature_dim, const std::filesystem::path& artifact_path);

}  // namespace ps
