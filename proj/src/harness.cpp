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

#include "ps/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "ps/errors.hpp"

namespace ps {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// Goodness in [0,1] across a set of values; 0.5 everywhere when flat.
std::vector<double> normalized_goodness(const std::vector<double>& values,
                                        bool higher_is_better) {
  const auto [min_it, max_it] =
      std::minmax_element(values.begin(), values.end());
  const double range = *max_it - *min_it;
  std::vector<double> out(values.size(), 0.5);
  if (range > 0.0) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double n = (values[i] - *min_it) / range;
      out[i] = higher_is_better ? n : 1.0 - n;
    }
  }
  return out;
}

std::vector<double> composite_scores(const std::vector<MetricsReport>& rows) {
  std::vector<double> acc, lat, cost;
  for (const auto& m : rows) {
    acc.push_back(m.accuracy);
    lat.push_back(m.avg_latency);
    cost.push_back(m.cost_per_query);
  }
  const auto acc_n = normalized_goodness(acc, true);
  const auto lat_n = normalized_goodness(lat, false);
  const auto cost_n = normalized_goodness(cost, false);
  std::vector<double> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out[i] = (acc_n[i] + lat_n[i] + cost_n[i]) / 3.0;
  }
  return out;
}

// Radar dimension inputs oriented so that larger is better, then scaled
// onto [0,10]; flat dimensions sit at the midpoint.
std::map<std::string, std::vector<double>> radar_dimensions(
    const std::vector<MetricsReport>& rows) {
  std::map<std::string, std::vector<double>> dims;
  for (const auto& m : rows) {
    dims["accuracy"].push_back(m.accuracy);
    dims["latency"].push_back(-m.avg_latency);
    dims["responsiveness"].push_back(-m.ttft_p95);
    dims["cost"].push_back(-m.cost_per_query);
    dims["robustness"].push_back(m.success_rate);
  }
  for (auto& [name, values] : dims) {
    try {
      values = normalize_radar(values);
    } catch (const DegenerateRangeError&) {
      std::fill(values.begin(), values.end(), 5.0);
    }
  }
  return dims;
}

}  // namespace

StrategySpec StrategySpec::parse(const std::string& text) {
  std::string body = text;
  StrategySpec spec;
  const auto plus = body.find('+');
  if (plus != std::string::npos) {
    const std::string mode = body.substr(plus + 1);
    body = body.substr(0, plus);
    if (mode == "static") {
      spec.scaling = ScalingMode::Static;
    } else if (mode == "dynamic") {
      spec.scaling = ScalingMode::Dynamic;
    } else {
      throw ConfigError("unknown scaling suffix '+" + mode + "'");
    }
  }
  std::string head = body;
  const auto colon = body.find(':');
  if (colon != std::string::npos) {
    head = body.substr(0, colon);
    spec.profile_name = body.substr(colon + 1);
  }
  if (head == "random") {
    spec.selection = SelectionKind::Random;
  } else if (head == "latency-only" || head == "latency") {
    spec.selection = SelectionKind::LatencyOnly;
  } else if (head == "multi") {
    spec.selection = SelectionKind::MultiObjective;
  } else if (head == "keyword" || head == "semantic" || head == "hybrid") {
    spec.selection = SelectionKind::MultiObjective;
    spec.router_mode = router_mode_from_string(head);
  } else {
    throw ConfigError("unknown strategy '" + head + "'");
  }
  return spec;
}

std::string StrategySpec::label() const {
  std::string out;
  if (router_mode) {
    out = to_string(*router_mode);
  } else {
    switch (selection) {
      case SelectionKind::MultiObjective: out = "multi"; break;
      case SelectionKind::LatencyOnly: out = "latency-only"; break;
      case SelectionKind::Random: out = "random"; break;
    }
  }
  if (!profile_name.empty()) out += ":" + profile_name;
  if (scaling) out += std::string("+") + to_string(*scaling);
  return out;
}

SimWiring StrategySpec::wiring() const {
  SimWiring w;
  w.selection = selection;
  w.profile_name = profile_name;
  w.router_mode_override = router_mode;
  w.scaling_mode_override = scaling;
  return w;
}

std::vector<StrategySpec> parse_strategy_list(const std::string& csv) {
  std::vector<StrategySpec> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(StrategySpec::parse(item));
  }
  if (out.empty()) throw ConfigError("empty strategy list");
  return out;
}

ComparisonReport run_comparison(const ScenarioConfig& scenario,
                                const std::vector<StrategySpec>& strategies,
                                std::uint64_t seed) {
  if (strategies.empty()) throw ConfigError("empty strategy list");
  ComparisonReport report;
  report.seed = seed;

  std::vector<MetricsReport> metrics;
  for (const auto& spec : strategies) {
    Simulation sim(scenario, spec.wiring(), seed);
    SimReport run = sim.run();
    StrategyResult row;
    row.spec = spec;
    row.label = spec.label();
    row.metrics = run.metrics;
    metrics.push_back(run.metrics);
    report.rows.push_back(std::move(row));
  }
  report.baseline_label = report.rows.front().label;

  const auto composite = composite_scores(metrics);
  const auto radar = radar_dimensions(metrics);
  const MetricsReport& base = metrics.front();
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    StrategyResult& row = report.rows[i];
    row.composite = composite[i];
    for (const auto& [dim, values] : radar) row.radar[dim] = values[i];
    row.accuracy_gain_pct =
        base.accuracy > 0.0
            ? (row.metrics.accuracy - base.accuracy) / base.accuracy * 100.0
            : 0.0;
    try {
      row.eta_vs_baseline =
          compute_efficiency(row.metrics.accuracy, base.accuracy,
                             row.metrics.cost_per_query, base.cost_per_query);
    } catch (const UndefinedEfficiencyError&) {
      row.eta_vs_baseline = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return report;
}

std::string ComparisonReport::to_csv() const {
  std::ostringstream os;
  os << "strategy,selection,profile,router_mode,scaling,n_total,n_success,"
        "n_failure,n_inflight,success_rate,accuracy,avg_latency_s,"
        "ttft_p50_s,ttft_p95_s,ttft_p99_s,throughput_rps,total_cost,"
        "cost_per_query,eta_vs_baseline,accuracy_gain_pct,composite\n";
  for (const auto& row : rows) {
    const MetricsReport& m = row.metrics;
    os << row.label << ',' << to_string(row.spec.selection) << ','
       << row.spec.profile_name << ','
       << (row.spec.router_mode ? to_string(*row.spec.router_mode) : "") << ','
       << (row.spec.scaling ? to_string(*row.spec.scaling) : "") << ','
       << m.n_total << ',' << m.n_success << ',' << m.n_failure << ','
       << m.n_inflight << ',' << fmt(m.success_rate) << ','
       << fmt(m.accuracy) << ',' << fmt(m.avg_latency) << ','
       << fmt(m.ttft_p50) << ',' << fmt(m.ttft_p95) << ',' << fmt(m.ttft_p99)
       << ',' << fmt(m.throughput) << ',' << fmt(m.total_cost) << ','
       << fmt(m.cost_per_query) << ',' << fmt(row.eta_vs_baseline) << ','
       << fmt(row.accuracy_gain_pct) << ',' << fmt(row.composite) << '\n';
  }
  return os.str();
}

json ComparisonReport::to_json() const {
  json j;
  j["baseline"] = baseline_label;
  j["seed"] = seed;
  j["reference_eta"] = kReferenceEfficiencyEta;
  json arr = json::array();
  for (const auto& row : rows) {
    const MetricsReport& m = row.metrics;
    json r;
    r["strategy"] = row.label;
    r["selection"] = to_string(row.spec.selection);
    r["profile"] = row.spec.profile_name;
    r["metrics"] = {{"n_total", m.n_total},
                    {"n_success", m.n_success},
                    {"n_failure", m.n_failure},
                    {"n_inflight", m.n_inflight},
                    {"success_rate", m.success_rate},
                    {"accuracy", m.accuracy},
                    {"avg_latency", m.avg_latency},
                    {"ttft_p50", m.ttft_p50},
                    {"ttft_p95", m.ttft_p95},
                    {"ttft_p99", m.ttft_p99},
                    {"throughput", m.throughput},
                    {"total_cost", m.total_cost},
                    {"cost_per_query", m.cost_per_query}};
    r["composite"] = row.composite;
    r["eta_vs_baseline"] = row.eta_vs_baseline;
    r["accuracy_gain_pct"] = row.accuracy_gain_pct;
    r["radar"] = row.radar;
    arr.push_back(std::move(r));
  }
  j["rows"] = arr;
  return j;
}

std::string ComparisonReport::to_table() const {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-24s %9s %9s %10s %10s %12s %9s %7s\n",
                "strategy", "accuracy", "success", "latency_s", "p95_ttft",
                "cost/query", "composite", "eta");
  os << buf;
  for (const auto& row : rows) {
    const MetricsReport& m = row.metrics;
    std::snprintf(buf, sizeof(buf),
                  "%-24s %9.4f %9.4f %10.3f %10.3f %12.6f %9.4f %7.3f\n",
                  row.label.c_str(), m.accuracy, m.success_rate, m.avg_latency,
                  m.ttft_p95, m.cost_per_query, row.composite,
                  row.eta_vs_baseline);
    os << buf;
  }
  return os.str();
}

std::vector<std::array<double, 3>> expand_grid(
    const std::vector<double>& values) {
  std::vector<std::array<double, 3>> grid;
  for (double a : values) {
    for (double l : values) {
      for (double m : values) {
        if (a + l + m > 0.0) grid.push_back({a, l, m});
      }
    }
  }
  return grid;
}

GridSearchResult grid_search(const ScenarioConfig& scenario,
                             const std::vector<std::array<double, 3>>& grid,
                             std::optional<double> accuracy_floor) {
  if (grid.empty()) throw ConfigError("empty weight grid");
  GridSearchResult result;
  for (const auto& point : grid) {
    ScenarioConfig cfg = scenario;
    WeightProfile profile{"grid", point[0], point[1], point[2]};
    cfg.engine.profiles.push_back(profile);
    SimWiring wiring;
    wiring.profile_name = "grid";
    Simulation sim(cfg, wiring, scenario.seed);
    GridPointResult row;
    row.alpha = point[0];
    row.lambda = point[1];
    row.mu = point[2];
    row.metrics = sim.run().metrics;
    result.table.push_back(std::move(row));
  }

  double best_accuracy = 0.0;
  for (const auto& row : result.table) {
    best_accuracy = std::max(best_accuracy, row.metrics.accuracy);
  }
  result.accuracy_floor = accuracy_floor.value_or(0.95 * best_accuracy);

  std::vector<MetricsReport> metrics;
  for (const auto& row : result.table) metrics.push_back(row.metrics);
  const auto composite = composite_scores(metrics);

  int best_quality = -1, best_cost = -1, best_speed = -1, best_composite = -1;
  for (int i = 0; i < static_cast<int>(result.table.size()); ++i) {
    const MetricsReport& m = result.table[i].metrics;
    if (best_quality < 0 ||
        m.accuracy > result.table[best_quality].metrics.accuracy) {
      best_quality = i;
    }
    if (m.accuracy >= result.accuracy_floor) {
      if (best_cost < 0 ||
          m.cost_per_query < result.table[best_cost].metrics.cost_per_query) {
        best_cost = i;
      }
      if (best_speed < 0 ||
          m.avg_latency < result.table[best_speed].metrics.avg_latency) {
        best_speed = i;
      }
    }
    if (best_composite < 0 || composite[i] > composite[best_composite]) {
      best_composite = i;
    }
  }
  result.best["quality"] = best_quality;
  result.best["cost"] = best_cost;
  result.best["speed"] = best_speed;
  result.best["composite"] = best_composite;
  return result;
}

json GridSearchResult::to_json() const {
  json j;
  j["accuracy_floor"] = accuracy_floor;
  json arr = json::array();
  for (const auto& row : table) {
    arr.push_back({{"alpha", row.alpha},
                   {"lambda", row.lambda},
                   {"mu", row.mu},
                   {"accuracy", row.metrics.accuracy},
                   {"avg_latency", row.metrics.avg_latency},
                   {"cost_per_query", row.metrics.cost_per_query},
                   {"success_rate", row.metrics.success_rate}});
  }
  j["table"] = arr;
  json best_json;
  for (const auto& [objective, idx] : best) {
    if (idx < 0) {
      best_json[objective] = nullptr;
    } else {
      const auto& row = table[static_cast<std::size_t>(idx)];
      best_json[objective] = {{"alpha", row.alpha},
                              {"lambda", row.lambda},
                              {"mu", row.mu},
                              {"accuracy", row.metrics.accuracy},
                              {"cost_per_query", row.metrics.cost_per_query},
                              {"avg_latency", row.metrics.avg_latency}};
    }
  }
  j["best"] = best_json;
  return j;
}

TrainArtifactReport train_reference_classifier(
    const std::vector<LabeledPrompt>& corpus,
    const LinearSoftmaxClassifier::TrainOptions& options,
    std::uint32_t feature_dim, const std::filesystem::path& artifact_path) {
  LinearSoftmaxClassifier model(feature_dim, 0x9e3779b97f4a7c15ull);
  TrainArtifactReport report;
  report.train = model.train(corpus, options);
  model.save(artifact_path);
  report.artifact_path = artifact_path.string();
  return report;
}

}  // namespace ps
