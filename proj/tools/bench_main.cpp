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

#include <chrono>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "ps/config.hpp"
#include "ps/errors.hpp"
#include "ps/harness.hpp"
#include "ps/metrics.hpp"
#include "ps/sim.hpp"
#include "ps/trace.hpp"

namespace {

using nlohmann::json;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw ps::ConfigError("cannot write: " + path);
  os << content;
}

int cmd_simulate(const std::string& config_path, const std::string& strategy,
                 std::uint64_t seed, bool seed_set, const std::string& out,
                 const std::string& events_path) {
  ps::ScenarioConfig scenario = ps::load_scenario_config(config_path);
  const ps::StrategySpec spec = ps::StrategySpec::parse(strategy);
  ps::Simulation sim(scenario, spec.wiring(),
                     seed_set ? std::optional<std::uint64_t>(seed)
                              : std::nullopt);
  ps::SimReport report = sim.run(!events_path.empty());
  if (!out.empty()) write_file(out, report.to_json_string() + "\n");
  if (!events_path.empty()) {
    std::ofstream os(events_path, std::ios::trunc);
    for (const auto& e : report.events) os << ps::event_to_json(e).dump() << '\n';
  }
  const ps::MetricsReport& m = report.metrics;
  std::cout << "strategy " << spec.label() << "  arrivals " << report.arrivals
            << "  success_rate " << m.success_rate << "  accuracy "
            << m.accuracy << "  avg_latency " << m.avg_latency
            << "s  cost/query " << m.cost_per_query << "\n";
  return 0;
}

int cmd_compare(const std::string& config_path, const std::string& strategies,
                std::uint64_t seed, bool seed_set, const std::string& out,
                const std::string& trace_path) {
  ps::ScenarioConfig scenario = ps::load_scenario_config(config_path);
  if (!trace_path.empty()) {
    scenario.arrivals.kind = ps::ArrivalConfig::Kind::Replay;
    scenario.arrivals.trace_path = trace_path;
  }
  const auto specs = ps::parse_strategy_list(strategies);
  const std::uint64_t run_seed = seed_set ? seed : scenario.seed;
  const ps::ComparisonReport report =
      ps::run_comparison(scenario, specs, run_seed);
  std::cout << report.to_table();
  if (!out.empty()) {
    write_file(out + ".csv", report.to_csv());
    write_file(out + ".json", report.to_json().dump(2) + "\n");
    std::cout << "wrote " << out << ".csv and " << out << ".json\n";
  }
  return 0;
}

int cmd_grid_search(const std::string& config_path, const std::string& values,
                    std::uint64_t seed, bool seed_set, const std::string& out,
                    double floor, bool floor_set) {
  ps::ScenarioConfig scenario = ps::load_scenario_config(config_path);
  if (seed_set) scenario.seed = seed;
  std::vector<double> axis;
  std::stringstream ss(values);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) axis.push_back(std::stod(item));
  }
  const auto grid = ps::expand_grid(axis);
  const ps::GridSearchResult result = ps::grid_search(
      scenario, grid,
      floor_set ? std::optional<double>(floor) : std::nullopt);
  const json j = result.to_json();
  std::cout << "evaluated " << result.table.size()
            << " grid points, accuracy floor " << result.accuracy_floor
            << "\n";
  for (const auto& [objective, idx] : result.best) {
    if (idx < 0) {
      std::cout << "  " << objective << ": infeasible\n";
      continue;
    }
    const auto& row = result.table[static_cast<std::size_t>(idx)];
    std::cout << "  " << objective << ": (alpha " << row.alpha << ", lambda "
              << row.lambda << ", mu " << row.mu << ") accuracy "
              << row.metrics.accuracy << " cost/query "
              << row.metrics.cost_per_query << "\n";
  }
  if (!out.empty()) write_file(out, j.dump(2) + "\n");
  return 0;
}

int cmd_train(const std::string& trace_path, std::size_t synthetic,
              const std::string& out, int epochs, int batch, double lr,
              unsigned dim, std::uint64_t seed, double holdout) {
  std::vector<ps::LabeledPrompt> corpus;
  if (synthetic > 0) {
    corpus = ps::generate_planted_corpus(synthetic, seed);
  } else if (!trace_path.empty()) {
    corpus = ps::load_labeled_corpus(trace_path);
  } else {
    std::cerr << "need --trace or --synthetic\n";
    return 2;
  }
  ps::LinearSoftmaxClassifier::TrainOptions options;
  options.epochs = epochs;
  options.batch_size = batch;
  options.learning_rate = lr;
  options.seed = seed;
  options.holdout_fraction = holdout;
  const auto report =
      ps::train_reference_classifier(corpus, options, dim, out);
  std::cout << "trained on " << report.train.train_count << " held out "
            << report.train.holdout_count << " holdout_accuracy "
            << report.train.holdout_accuracy << " final_loss "
            << report.train.final_train_loss << "\nartifact "
            << report.artifact_path << "\n";
  return 0;
}

int cmd_replay_gateway(const std::string& url, const std::string& trace_path,
                       const std::string& profile, const std::string& mode,
                       const std::string& out, double speed) {
  const auto records = ps::load_trace_jsonl(trace_path);
  httplib::Client client(url);
  client.set_read_timeout(std::chrono::seconds(300));
  std::vector<ps::OutcomeRecord> outcomes;
  std::ofstream outcome_file;
  if (!out.empty()) outcome_file.open(out, std::ios::trunc);

  const auto start = std::chrono::steady_clock::now();
  double first_offset = records.empty() ? 0.0 : records.front().arrival_offset;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (speed > 0.0) {
      const double due = (rec.arrival_offset - first_offset) / speed;
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                        start)
              .count();
      if (due > elapsed) {
        std::this_thread::sleep_for(
            std::chrono::duration<double>(due - elapsed));
      }
    }
    json body;
    body["prompt"] = rec.text;
    if (!profile.empty()) body["profile"] = profile;
    if (!mode.empty()) body["mode"] = mode;
    body["request_id"] = rec.id.value_or("replay-" + std::to_string(i));
    auto resp = client.Post("/v1/route", body.dump(), "application/json");

    ps::OutcomeRecord o;
    o.request_id = body["request_id"];
    o.arrival = rec.arrival_offset;
    o.completed = true;
    if (resp && resp->status == 200) {
      const json j = json::parse(resp->body, nullptr, false);
      o.success = true;
      if (j.is_object()) {
        o.ttft = j.value("ttft", 0.0);
        o.has_ttft = true;
        o.latency = j.value("latency", 0.0);
        o.cost = j.value("cost", 0.0);
        o.service_id = j.value("service_id", "");
      }
    } else {
      o.success = false;
    }
    if (outcome_file) {
      outcome_file << json({{"request_id", o.request_id},
                            {"service_id", o.service_id},
                            {"success", o.success},
                            {"ttft", o.ttft},
                            {"latency", o.latency},
                            {"cost", o.cost}})
                          .dump()
                   << '\n';
    }
    outcomes.push_back(std::move(o));
  }
  if (outcomes.empty()) {
    std::cout << "empty trace\n";
    return 0;
  }
  const double span = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  const ps::MetricsReport m = ps::compute_metrics(outcomes, span);
  std::cout << "replayed " << m.n_total << " requests  success_rate "
            << m.success_rate << "  avg_latency " << m.avg_latency
            << "s  p95_ttft " << m.ttft_p95 << "s\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"routing and scaling benchmark harness"};
  app.require_subcommand(1);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "run one simulated scenario");
  std::string sim_config, sim_out, sim_events, sim_strategy = "multi";
  std::uint64_t sim_seed = 0;
  sim_cmd->add_option("--config", sim_config, "scenario json")->required();
  sim_cmd->add_option("--strategy", sim_strategy, "strategy spec");
  auto* sim_seed_opt = sim_cmd->add_option("--seed", sim_seed, "seed override");
  sim_cmd->add_option("--out", sim_out, "report json path");
  sim_cmd->add_option("--events", sim_events, "event trace jsonl path");

  // compare
  auto* cmp_cmd =
      app.add_subcommand("compare", "run strategies over one scenario");
  std::string cmp_config, cmp_strategies, cmp_out, cmp_trace;
  std::uint64_t cmp_seed = 0;
  cmp_cmd->add_option("--config", cmp_config, "scenario json")->required();
  cmp_cmd->add_option("--strategies", cmp_strategies,
                      "comma-separated strategy specs")
      ->required();
  auto* cmp_seed_opt = cmp_cmd->add_option("--seed", cmp_seed, "seed override");
  cmp_cmd->add_option("--out", cmp_out, "output prefix (.csv/.json)");
  cmp_cmd->add_option("--trace", cmp_trace, "replace arrivals with a trace");

  // grid-search
  auto* grid_cmd =
      app.add_subcommand("grid-search", "weight grid search per objective");
  std::string grid_config, grid_values = "0,0.25,0.5,0.75,1", grid_out;
  std::uint64_t grid_seed = 0;
  double grid_floor = 0.0;
  grid_cmd->add_option("--config", grid_config, "scenario json")->required();
  grid_cmd->add_option("--values", grid_values, "axis values, comma-separated");
  auto* grid_seed_opt =
      grid_cmd->add_option("--seed", grid_seed, "seed override");
  grid_cmd->add_option("--out", grid_out, "result json path");
  auto* grid_floor_opt =
      grid_cmd->add_option("--accuracy-floor", grid_floor,
                           "constraint floor (default 0.95 x best)");

  // train-classifier
  auto* train_cmd =
      app.add_subcommand("train-classifier", "train the reference classifier");
  std::string train_trace, train_out = "classifier.pslc";
  std::size_t train_synthetic = 0;
  int train_epochs = 100, train_batch = 32;
  double train_lr = 0.5, train_holdout = 0.10;
  unsigned train_dim = 4096;
  std::uint64_t train_seed = 42;
  train_cmd->add_option("--trace", train_trace, "labeled corpus jsonl");
  train_cmd->add_option("--synthetic", train_synthetic,
                        "generate a planted corpus of N prompts instead");
  train_cmd->add_option("--out", train_out, "artifact path");
  train_cmd->add_option("--epochs", train_epochs, "training epochs");
  train_cmd->add_option("--batch", train_batch, "minibatch size");
  train_cmd->add_option("--lr", train_lr, "learning rate");
  train_cmd->add_option("--dim", train_dim, "hashed feature dimension");
  train_cmd->add_option("--seed", train_seed, "rng seed");
  train_cmd->add_option("--holdout", train_holdout, "holdout fraction");

  // replay-gateway
  auto* replay_cmd =
      app.add_subcommand("replay-gateway", "replay a trace against a gateway");
  std::string replay_url = "http://127.0.0.1:8080", replay_trace, replay_out;
  std::string replay_profile, replay_mode;
  double replay_speed = 0.0;
  replay_cmd->add_option("--url", replay_url, "gateway base url");
  replay_cmd->add_option("--trace", replay_trace, "trace jsonl")->required();
  replay_cmd->add_option("--profile", replay_profile, "profile name");
  replay_cmd->add_option("--mode", replay_mode, "router mode override");
  replay_cmd->add_option("--out", replay_out, "per-request outcomes jsonl");
  replay_cmd->add_option("--speed", replay_speed,
                         "replay speed factor; 0 = as fast as possible");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim_cmd->parsed()) {
      return cmd_simulate(sim_config, sim_strategy, sim_seed,
                          sim_seed_opt->count() > 0, sim_out, sim_events);
    }
    if (cmp_cmd->parsed()) {
      return cmd_compare(cmp_config, cmp_strategies, cmp_seed,
                         cmp_seed_opt->count() > 0, cmp_out, cmp_trace);
    }
    if (grid_cmd->parsed()) {
      return cmd_grid_search(grid_config, grid_values, grid_seed,
                             grid_seed_opt->count() > 0, grid_out, grid_floor,
                             grid_floor_opt->count() > 0);
    }
    if (train_cmd->parsed()) {
      return cmd_train(train_trace, train_synthetic, train_out, train_epochs,
                       train_batch, train_lr, train_dim, train_seed,
                       train_holdout);
    }
    if (replay_cmd->parsed()) {
      return cmd_replay_gateway(replay_url, replay_trace, replay_profile,
                                replay_mode, replay_out, replay_speed);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
