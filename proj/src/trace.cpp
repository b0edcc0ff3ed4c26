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

#include "ps/trace.hpp"

#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "ps/errors.hpp"

namespace ps {

namespace {

using nlohmann::json;

// Benchmark tag pool with weights shaped like public run-count mixes.
struct TagWeight {
  const char* tag;
  double weight;
};
constexpr TagWeight kBenchmarkTags[] = {
    {"humaneval", 820},  {"gsm8k", 6595},    {"mbpp", 2500},
    {"truthfulqa", 3950}, {"arc", 5860},      {"hellaswag", 50210},
    {"math", 25000},      {"mmlu_pro", 60160},
};

const std::vector<std::string>& low_templates() {
  static const std::vector<std::string> t = {
      "list three colors",
      "define the term photosynthesis",
      "sum of 14 and 27",
      "list the planets in order",
      "define entropy in one sentence",
      "sum the first ten integers",
      "list common http verbs",
      "define a binary tree",
  };
  return t;
}

const std::vector<std::string>& medium_templates() {
  static const std::vector<std::string> t = {
      "tell me about paris",
      "describe the water cycle for a school report",
      "write a short note welcoming a new teammate",
      "compare cats and dogs as pets",
      "draft an email asking for a meeting next week",
      "translate good morning into spanish and french",
      "outline a weekend trip to the mountains",
      "rewrite this sentence to sound more formal",
  };
  return t;
}

const std::vector<std::string>& high_templates() {
  static const std::vector<std::string> t = {
      "prove that the series diverges",
      "derive the quadratic formula from first principles",
      "explain why the halting problem is undecidable",
      "prove that sqrt two is irrational",
      "derive the gradient of the softmax cross entropy loss",
      "explain why quicksort is n log n on average",
      "prove the triangle inequality for euclidean norms",
      "derive the closed form of the fibonacci sequence",
  };
  return t;
}

std::string pick_text(ComplexityClass c, std::mt19937_64& rng) {
  const auto& pool = c == ComplexityClass::Low    ? low_templates()
                     : c == ComplexityClass::High ? high_templates()
                                                  : medium_templates();
  std::uniform_int_distribution<std::size_t> dist(0, pool.size() - 1);
  return pool[dist(rng)];
}

std::string pick_tag(std::mt19937_64& rng) {
  double total = 0.0;
  for (const auto& tw : kBenchmarkTags) total += tw.weight;
  std::uniform_real_distribution<double> dist(0.0, total);
  double x = dist(rng);
  for (const auto& tw : kBenchmarkTags) {
    if (x < tw.weight) return tw.tag;
    x -= tw.weight;
  }
  return kBenchmarkTags[0].tag;
}

ComplexityClass pick_class(const std::array<double, 3>& mix,
                           std::mt19937_64& rng) {
  const double total = mix[0] + mix[1] + mix[2];
  std::uniform_real_distribution<double> dist(0.0, total);
  double x = dist(rng);
  if (x < mix[0]) return ComplexityClass::Low;
  if (x < mix[0] + mix[1]) return ComplexityClass::Medium;
  return ComplexityClass::High;
}

}  // namespace

std::vector<TraceRecord> load_trace_jsonl(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open trace: " + path.string());
  std::vector<TraceRecord> records;
  std::string line;
  double last_offset = 0.0;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ConfigError("bad trace line " + std::to_string(line_no) + ": " +
                        e.what());
    }
    TraceRecord rec;
    rec.text = j.at("text").get<std::string>();
    rec.benchmark_tag = j.value("benchmark_tag", std::string{});
    rec.arrival_offset = j.value("arrival_offset", 0.0);
    if (j.contains("label")) {
      auto label = complexity_from_string(j["label"].get<std::string>());
      if (!label) {
        throw ConfigError("bad label on trace line " + std::to_string(line_no));
      }
      rec.label = label;
    }
    if (j.contains("id")) rec.id = j["id"].get<std::string>();
    if (rec.arrival_offset < last_offset) {
      throw ConfigError("arrival offsets decrease at trace line " +
                        std::to_string(line_no));
    }
    last_offset = rec.arrival_offset;
    records.push_back(std::move(rec));
  }
  return records;
}

void save_trace_jsonl(const std::filesystem::path& path,
                      const std::vector<TraceRecord>& records) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw ConfigError("cannot write trace: " + path.string());
  for (const auto& rec : records) {
    json j;
    j["text"] = rec.text;
    if (!rec.benchmark_tag.empty()) j["benchmark_tag"] = rec.benchmark_tag;
    j["arrival_offset"] = rec.arrival_offset;
    if (rec.label) j["label"] = to_string(*rec.label);
    if (rec.id) j["id"] = *rec.id;
    os << j.dump() << '\n';
  }
}

std::vector<TraceRecord> generate_synthetic_trace(
    const SyntheticTraceSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::exponential_distribution<double> gap(spec.rate);
  std::vector<TraceRecord> records;
  records.reserve(spec.count);
  double t = 0.0;
  for (std::size_t i = 0; i < spec.count; ++i) {
    if (i > 0) {
      t += spec.poisson ? gap(rng) : 1.0 / spec.rate;
    }
    const ComplexityClass c = pick_class(spec.class_mix, rng);
    TraceRecord rec;
    rec.text = pick_text(c, rng);
    rec.benchmark_tag = pick_tag(rng);
    rec.arrival_offset = t;
    rec.label = c;
    rec.id = "p" + std::to_string(i);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<TraceRecord> generate_bursty_trace(const BurstyTraceSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::exponential_distribution<double> gap(spec.burst_rate);
  std::vector<TraceRecord> records;
  double burst_start = 0.0;
  std::size_t idx = 0;
  for (int b = 0; b < spec.bursts; ++b) {
    double t = burst_start;
    while (t < burst_start + spec.burst_duration) {
      const ComplexityClass c = pick_class(spec.class_mix, rng);
      TraceRecord rec;
      rec.text = pick_text(c, rng);
      rec.arrival_offset = t;
      rec.label = c;
      rec.id = "p" + std::to_string(idx++);
      records.push_back(std::move(rec));
      t += gap(rng);
    }
    burst_start += spec.burst_duration + spec.gap_duration;
  }
  return records;
}

std::vector<LabeledPrompt> generate_planted_corpus(std::size_t count,
                                                   std::uint64_t seed) {
  // Planted class vocabularies, deliberately disjoint from the keyword
  // rule defaults so the semantic path is learned rather than rule-borrowed.
  static const std::vector<std::string> low_vocab = {
      "capital", "weekday", "plural",  "antonym", "spelling",
      "currency", "timezone", "zipcode", "acronym", "synonym"};
  static const std::vector<std::string> medium_vocab = {
      "summarize", "paragraph", "rewrite",   "outline",  "translate",
      "caption",   "paraphrase", "condense", "simplify", "recap"};
  static const std::vector<std::string> high_vocab = {
      "topology",  "eigenvalue", "asymptotic", "induction",   "entropy",
      "manifold",  "tensor",     "quantile",   "isomorphism", "variational"};
  static const std::vector<std::string> filler = {
      "the", "a", "please", "for", "me", "quick", "about", "give", "with",
      "this", "that", "some", "now", "today", "value", "thing", "note",
      "item", "case", "point"};

  std::mt19937_64 rng(seed);
  std::vector<LabeledPrompt> corpus;
  corpus.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto label = static_cast<ComplexityClass>(i % 3);  // balanced
    const auto& vocab = label == ComplexityClass::Low    ? low_vocab
                        : label == ComplexityClass::High ? high_vocab
                                                         : medium_vocab;
    std::uniform_int_distribution<int> planted_count(2, 4);
    std::uniform_int_distribution<int> filler_count(3, 9);
    std::uniform_int_distribution<std::size_t> vocab_pick(0, vocab.size() - 1);
    std::uniform_int_distribution<std::size_t> filler_pick(0, filler.size() - 1);

    std::vector<std::string> words;
    const int np = planted_count(rng);
    const int nf = filler_count(rng);
    for (int k = 0; k < np; ++k) words.push_back(vocab[vocab_pick(rng)]);
    for (int k = 0; k < nf; ++k) words.push_back(filler[filler_pick(rng)]);
    std::shuffle(words.begin(), words.end(), rng);

    std::string text;
    for (std::size_t k = 0; k < words.size(); ++k) {
      if (k > 0) text.push_back(' ');
      text += words[k];
    }
    corpus.push_back({std::move(text), label});
  }
  return corpus;
}

std::vector<LabeledPrompt> load_labeled_corpus(
    const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open corpus: " + path.string());
  std::vector<LabeledPrompt> corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ConfigError("bad corpus line " + std::to_string(line_no) + ": " +
                        e.what());
    }
    const auto label = complexity_from_string(j.at("label").get<std::string>());
    if (!label) {
      throw ConfigError("bad label on corpus line " + std::to_string(line_no));
    }
    corpus.push_back({j.at("text").get<std::string>(), *label});
  }
  return corpus;
}

void save_labeled_corpus(const std::filesystem::path& path,
                         const std::vector<LabeledPrompt>& corpus) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw ConfigError("cannot write corpus: " + path.string());
  for (const auto& sample : corpus) {
    json j;
    j["text"] = sample.text;
    j["label"] = to_string(sample.label);
    os << j.dump() << '\n';
  }
}

}  // namespace ps
