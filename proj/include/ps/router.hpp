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
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ps {

enum class ComplexityClass : int { Low = 0, Medium = 1, High = 2 };
enum class ModelTier : int { Small = 0, Medium = 1, Large = 2 };
enum class ClassifierSource { Keyword, Semantic, Hybrid };

const char* to_string(ComplexityClass c);
const char* to_string(ModelTier t);
const char* to_string(ClassifierSource s);
std::optional<ComplexityClass> complexity_from_string(std::string_view s);
std::optional<ModelTier> tier_from_string(std::string_view s);

struct Prompt {
  std::string id;
  std::string text;
  std::size_t token_count = 0;  // whitespace tokens, always recomputed
  std::optional<std::string> benchmark_tag;
  double arrival_time = 0.0;

  static Prompt make(std::string id, std::string text,
                     double arrival_time = 0.0,
                     std::optional<std::string> benchmark_tag = std::nullopt);
};

// Whitespace-delimited token count; an approximation that is good enough
// for routing. Never trust a caller-supplied count.
std::size_t count_tokens(std::string_view text);

// Lowercased word tokens (runs of alnum / apostrophe), used for keyword
// matching and bag-of-words features.
std::vector<std::string> word_tokens(std::string_view text);

struct ClassifierOutput {
  std::array<double, 3> probabilities{};  // indexed by ComplexityClass
  ComplexityClass predicted = ComplexityClass::Low;
  ClassifierSource source = ClassifierSource::Keyword;
};

// Ties resolve to the lowest class index, so an all-equal vector maps to
// Low: deterministic and conservative on cost.
ComplexityClass argmax_class(const std::array<double, 3>& probabilities);

// Keyword rules. Entries may be multi-word phrases; matching is
// whole-word, case-insensitive, on contiguous token runs.
struct KeywordRuleSet {
  std::vector<std::string> low_keywords;
  std::vector<std::string> high_keywords;

  static KeywordRuleSet defaults();
  void validate() const;  // throws ConfigError when the sets intersect
};

class SemanticClassifier {
 public:
  virtual ~SemanticClassifier() = default;
  // Throws ClassifierUnavailableError when no usable model is loaded.
  virtual ClassifierOutput classify(const std::string& text) const = 0;
};

// High keywords dominate low ones when both match (conflicts resolve as
// High). No match at all falls back to Medium. Output is one-hot.
ClassifierOutput keyword_classify(const Prompt& prompt,
                                  const KeywordRuleSet& rules);

ClassifierOutput semantic_classify(const Prompt& prompt,
                                   const SemanticClassifier& model);

// Keyword-matched prompts short-circuit; the semantic path handles the
// rest. A semantic result whose max probability falls below the
// confidence threshold degrades to Medium with the semantic distribution
// attached (the one case where `predicted` is not the argmax). A missing
// or unavailable semantic model degrades to the keyword result.
ClassifierOutput hybrid_classify(const Prompt& prompt,
                                 const KeywordRuleSet& rules,
                                 const SemanticClassifier* model,
                                 double confidence_threshold);

// Relevance of a model tier per complexity class, all entries in [0,1].
struct RelevanceTable {
  std::array<std::array<double, 3>, 3> value{};  // [complexity][tier]

  static RelevanceTable defaults();
  void validate() const;
  double at(ComplexityClass c, ModelTier t) const {
    return value[static_cast<int>(c)][static_cast<int>(t)];
  }
};

// Expected relevance under the classifier distribution; a plain table
// lookup for one-hot outputs.
double relevance(const ClassifierOutput& output, ModelTier tier,
                 const RelevanceTable& table);

// Token-count bucketing with half-open intervals: [0,t1) Low, [t1,t2)
// Medium, [t2,inf) High. Used for corpus labeling, not live routing.
ComplexityClass token_bucket(const Prompt& prompt, std::size_t t1,
                             std::size_t t2);

}  // namespace ps
