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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ps/router.hpp"

namespace ps {

struct LabeledPrompt {
  std::string text;
  ComplexityClass label = ComplexityClass::Low;
};

std::array<double, 3> softmax3(const std::array<double, 3>& logits);

// Sparse hashed bag-of-words features: (bucket, term frequency) pairs
// with frequencies normalized to sum to 1. Deterministic given the seed.
std::vector<std::pair<std::uint32_t, double>> hashed_bow(
    const std::string& text, std::uint32_t feature_dim, std::uint64_t seed);

// Reference complexity classifier: hashed bag-of-words into a 3-class
// linear softmax. Small enough to train on a laptop, honors the same
// output contract as an external transformer service.
class LinearSoftmaxClassifier : public SemanticClassifier {
 public:
  static constexpr std::uint32_t kArtifactVersion = 1;
  static constexpr char kMagic[4] = {'P', 'S', 'L', 'C'};

  struct TrainOptions {
    int epochs = 100;
    int batch_size = 32;
    double learning_rate = 0.5;
    double holdout_fraction = 0.10;
    std::uint64_t seed = 42;
  };

  struct TrainReport {
    int epochs = 0;
    std::size_t train_count = 0;
    std::size_t holdout_count = 0;
    double holdout_accuracy = 0.0;
    double final_train_loss = 0.0;
  };

  LinearSoftmaxClassifier();  // zero weights: uniform probabilities
  LinearSoftmaxClassifier(std::uint32_t feature_dim, std::uint64_t hash_seed);

  ClassifierOutput classify(const std::string& text) const override;
  std::array<double, 3> logits(const std::string& text) const;

  // Deterministic minibatch gradient descent with cross-entropy loss.
  // Requires all three classes in the corpus; throws TrainingError
  // otherwise. The holdout split is taken after a seeded shuffle.
  TrainReport train(std::span<const LabeledPrompt> corpus,
                    const TrainOptions& options);

  double evaluate_accuracy(std::span<const LabeledPrompt> samples) const;

  // Versioned binary artifact: magic "PSLC", version u32, hash seed u64,
  // feature dim u32, then row-major weights (3 x dim) and bias (3) as
  // little-endian 64-bit floats.
  void save(const std::filesystem::path& path) const;
  static LinearSoftmaxClassifier load(const std::filesystem::path& path);

  std::uint32_t feature_dim() const { return feature_dim_; }
  std::uint64_t hash_seed() const { return hash_seed_; }

 private:
  std::array<double, 3> logits_sparse(
      const std::vector<std::pair<std::uint32_t, double>>& features) const;

  std::uint32_t feature_dim_;
  std::uint64_t hash_seed_;
  std::vector<double> weights_;  // row-major, 3 * feature_dim_
  std::array<double, 3> bias_{};
};

// Adapter representing a configured-but-missing model; every call throws
// ClassifierUnavailableError so callers exercise their fallback paths.
class UnavailableClassifier : public SemanticClassifier {
 public:
  ClassifierOutput classify(const std::string& text) const override;
};

}  // namespace ps
