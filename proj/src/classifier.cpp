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

#include "ps/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <random>

#include "ps/errors.hpp"

namespace ps {

namespace {

constexpr std::uint32_t kDefaultFeatureDim = 4096;
constexpr std::uint64_t kDefaultHashSeed = 0x9e3779b97f4a7c15ull;

std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ull ^ seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

template <typename T>
void write_le(std::ostream& os, T value) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  // Host is little-endian on every supported target; memcpy is the layout.
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
  unsigned char buf[sizeof(T)];
  is.read(reinterpret_cast<char*>(buf), sizeof(T));
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

}  // namespace

std::array<double, 3> softmax3(const std::array<double, 3>& logits) {
  const double m = std::max(logits[0], std::max(logits[1], logits[2]));
  std::array<double, 3> e{};
  double sum = 0.0;
  for (int k = 0; k < 3; ++k) {
    e[k] = std::exp(logits[k] - m);
    sum += e[k];
  }
  for (int k = 0; k < 3; ++k) e[k] /= sum;
  return e;
}

std::vector<std::pair<std::uint32_t, double>> hashed_bow(
    const std::string& text, std::uint32_t feature_dim, std::uint64_t seed) {
  std::map<std::uint32_t, double> counts;
  const auto tokens = word_tokens(text);
  for (const auto& tok : tokens) {
    const auto bucket =
        static_cast<std::uint32_t>(fnv1a64(tok, seed) % feature_dim);
    counts[bucket] += 1.0;
  }
  std::vector<std::pair<std::uint32_t, double>> features;
  features.reserve(counts.size());
  const double total = static_cast<double>(tokens.size());
  for (const auto& [bucket, count] : counts) {
    features.emplace_back(bucket, count / total);
  }
  return features;
}

LinearSoftmaxClassifier::LinearSoftmaxClassifier()
    : LinearSoftmaxClassifier(kDefaultFeatureDim, kDefaultHashSeed) {}

LinearSoftmaxClassifier::LinearSoftmaxClassifier(std::uint32_t feature_dim,
                                                 std::uint64_t hash_seed)
    : feature_dim_(feature_dim),
      hash_seed_(hash_seed),
      weights_(3 * static_cast<std::size_t>(feature_dim), 0.0) {
  if (feature_dim == 0) {
    throw std::invalid_argument("feature dimension must be positive");
  }
}

std::array<double, 3> LinearSoftmaxClassifier::logits_sparse(
    const std::vector<std::pair<std::uint32_t, double>>& features) const {
  std::array<double, 3> out = bias_;
  for (const auto& [idx, val] : features) {
    for (int k = 0; k < 3; ++k) {
      out[k] += weights_[static_cast<std::size_t>(k) * feature_dim_ + idx] *
                val;
    }
  }
  return out;
}

std::array<double, 3> LinearSoftmaxClassifier::logits(
    const std::string& text) const {
  return logits_sparse(hashed_bow(text, feature_dim_, hash_seed_));
}

ClassifierOutput LinearSoftmaxClassifier::classify(
    const std::string& text) const {
  ClassifierOutput out;
  out.probabilities = softmax3(logits(text));
  out.predicted = argmax_class(out.probabilities);
  out.source = ClassifierSource::Semantic;
  return out;
}

LinearSoftmaxClassifier::TrainReport LinearSoftmaxClassifier::train(
    std::span<const LabeledPrompt> corpus, const TrainOptions& options) {
  if (corpus.empty()) throw TrainingError("empty training corpus");
  std::array<std::size_t, 3> class_counts{};
  for (const auto& sample : corpus) {
    class_counts[static_cast<int>(sample.label)]++;
  }
  for (int k = 0; k < 3; ++k) {
    if (class_counts[k] == 0) {
      throw TrainingError(std::string("class '") +
                          to_string(static_cast<ComplexityClass>(k)) +
                          "' missing from corpus");
    }
  }
  if (options.batch_size <= 0) throw TrainingError("batch size must be > 0");
  if (options.epochs < 0) throw TrainingError("epochs must be >= 0");

  // Featurize once.
  std::vector<std::vector<std::pair<std::uint32_t, double>>> features;
  features.reserve(corpus.size());
  for (const auto& sample : corpus) {
    features.push_back(hashed_bow(sample.text, feature_dim_, hash_seed_));
  }

  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(options.seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::size_t holdout_count = static_cast<std::size_t>(
      std::llround(options.holdout_fraction * static_cast<double>(corpus.size())));
  holdout_count = std::min(holdout_count, corpus.size() - 1);
  const std::size_t train_count = corpus.size() - holdout_count;

  std::vector<std::size_t> train_idx(order.begin(),
                                     order.begin() + static_cast<long>(train_count));
  std::vector<std::size_t> holdout_idx(order.begin() + static_cast<long>(train_count),
                                       order.end());

  double final_loss = 0.0;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(train_idx.begin(), train_idx.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < train_idx.size();
         start += static_cast<std::size_t>(options.batch_size)) {
      const std::size_t end = std::min(
          start + static_cast<std::size_t>(options.batch_size),
          train_idx.size());
      const double inv_batch = 1.0 / static_cast<double>(end - start);

      // Accumulate gradient over the batch, then apply.
      std::map<std::uint32_t, std::array<double, 3>> grad_w;
      std::array<double, 3> grad_b{};
      for (std::size_t i = start; i < end; ++i) {
        const std::size_t idx = train_idx[i];
        const auto probs = softmax3(logits_sparse(features[idx]));
        const int label = static_cast<int>(corpus[idx].label);
        epoch_loss += -std::log(std::max(probs[label], 1e-300));
        for (int k = 0; k < 3; ++k) {
          const double delta = probs[k] - (k == label ? 1.0 : 0.0);
          grad_b[k] += delta;
          for (const auto& [bucket, val] : features[idx]) {
            grad_w[bucket][k] += delta * val;
          }
        }
      }
      for (int k = 0; k < 3; ++k) {
        bias_[k] -= options.learning_rate * inv_batch * grad_b[k];
      }
      for (const auto& [bucket, g] : grad_w) {
        for (int k = 0; k < 3; ++k) {
          weights_[static_cast<std::size_t>(k) * feature_dim_ + bucket] -=
              options.learning_rate * inv_batch * g[k];
        }
      }
    }
    final_loss = epoch_loss / static_cast<double>(train_idx.size());
  }

  TrainReport report;
  report.epochs = options.epochs;
  report.train_count = train_count;
  report.holdout_count = holdout_count;
  report.final_train_loss = options.epochs > 0 ? final_loss : 0.0;

  std::size_t correct = 0;
  for (std::size_t idx : holdout_idx) {
    const auto probs = softmax3(logits_sparse(features[idx]));
    if (argmax_class(probs) == corpus[idx].label) ++correct;
  }
  report.holdout_accuracy =
      holdout_idx.empty()
          ? 0.0
          : static_cast<double>(correct) / static_cast<double>(holdout_idx.size());
  return report;
}

double LinearSoftmaxClassifier::evaluate_accuracy(
    std::span<const LabeledPrompt> samples) const {
  if (samples.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& sample : samples) {
    if (classify(sample.text).predicted == sample.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

void LinearSoftmaxClassifier::save(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("cannot open artifact for writing: " + path.string());
  os.write(kMagic, 4);
  write_le<std::uint32_t>(os, kArtifactVersion);
  write_le<std::uint64_t>(os, hash_seed_);
  write_le<std::uint32_t>(os, feature_dim_);
  for (double w : weights_) write_le<double>(os, w);
  for (double b : bias_) write_le<double>(os, b);
  if (!os) throw ConfigError("failed writing artifact: " + path.string());
}

LinearSoftmaxClassifier LinearSoftmaxClassifier::load(
    const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw ClassifierUnavailableError("classifier artifact not found: " +
                                     path.string());
  }
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw ConfigError("bad classifier artifact magic: " + path.string());
  }
  const auto version = read_le<std::uint32_t>(is);
  if (version != kArtifactVersion) {
    throw ConfigError("unsupported classifier artifact version " +
                      std::to_string(version));
  }
  const auto seed = read_le<std::uint64_t>(is);
  const auto dim = read_le<std::uint32_t>(is);
  if (!is || dim == 0 || dim > (1u << 24)) {
    throw ConfigError("bad classifier artifact header: " + path.string());
  }
  LinearSoftmaxClassifier model(dim, seed);
  for (double& w : model.weights_) w = read_le<double>(is);
  for (double& b : model.bias_) b = read_le<double>(is);
  if (!is) throw ConfigError("truncated classifier artifact: " + path.string());
  return model;
}

ClassifierOutput UnavailableClassifier::classify(const std::string&) const {
  throw ClassifierUnavailableError("semantic classifier not loaded");
}

}  // namespace ps
