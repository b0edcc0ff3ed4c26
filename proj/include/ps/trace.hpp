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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ps/classifier.hpp"
#include "ps/router.hpp"

namespace ps {

struct TraceRecord {
  std::string text;
  std::string benchmark_tag;
  double arrival_offset = 0.0;  // seconds from trace start, non-decreasing
  std::optional<ComplexityClass> label;
  std::optional<std::string> id;
};

// JSONL, one record per line: {"text", "benchmark_tag"?, "arrival_offset",
// "label"?, "id"?}. Throws ConfigError on malformed lines or offsets that
// go backwards.
std::vector<TraceRecord> load_trace_jsonl(const std::filesystem::path& path);
void save_trace_jsonl(const std::filesystem::path& path,
                      const std::vector<TraceRecord>& records);

// Synthetic routing workload with planted complexity: Low/High prompts
// carry their indicative keywords, Medium prompts carry none, and every
// record is labeled with the planted class.
struct SyntheticTraceSpec {
  std::size_t count = 1000;
  double rate = 5.0;           // mean arrivals per second
  bool poisson = true;         // false: uniform spacing
  std::array<double, 3> class_mix = {0.5, 0.3, 0.2};  // Low, Medium, High
  std::uint64_t seed = 1;
};
std::vector<TraceRecord> generate_synthetic_trace(const SyntheticTraceSpec& spec);

// Bursts of traffic separated by idle gaps; used for scale-to-zero and
// recovery experiments.
struct BurstyTraceSpec {
  int bursts = 2;
  double burst_duration = 120.0;
  double burst_rate = 2.0;
  double gap_duration = 600.0;
  std::array<double, 3> class_mix = {0.2, 0.2, 0.6};
  std::uint64_t seed = 7;
};
std::vector<TraceRecord> generate_bursty_trace(const BurstyTraceSpec& spec);

// Labeled corpus where the class is a deterministic function of planted
// vocabulary; the planting rule is the oracle for classifier accuracy.
std::vector<LabeledPrompt> generate_planted_corpus(std::size_t count,
                                                   std::uint64_t seed);

// Labeled corpora on disk: JSONL of {"text", "label"}.
std::vector<LabeledPrompt> load_labeled_corpus(const std::filesystem::path& path);
void save_labeled_corpus(const std::filesystem::path& path,
                         const std::vector<LabeledPrompt>& corpus);

}  // namespace ps
