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

#include "ps/router.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "ps/errors.hpp"

namespace ps {

namespace {

bool is_word_char(unsigned char c) {
  return std::isalnum(c) != 0 || c == '\'';
}

// Splits a keyword entry into its lowercased word tokens so that phrases
// like "explain why" match as contiguous token runs.
std::vector<std::string> phrase_tokens(const std::string& phrase) {
  return word_tokens(phrase);
}

bool contains_phrase(const std::vector<std::string>& tokens,
                     const std::vector<std::string>& phrase) {
  if (phrase.empty() || phrase.size() > tokens.size()) return false;
  for (std::size_t i = 0; i + phrase.size() <= tokens.size(); ++i) {
    bool hit = true;
    for (std::size_t j = 0; j < phrase.size(); ++j) {
      if (tokens[i + j] != phrase[j]) {
        hit = false;
        break;
      }
    }
    if (hit) return true;
  }
  return false;
}

bool matches_any(const std::vector<std::string>& tokens,
                 const std::vector<std::string>& keywords) {
  for (const auto& kw : keywords) {
    if (contains_phrase(tokens, phrase_tokens(kw))) return true;
  }
  return false;
}

ClassifierOutput one_hot(ComplexityClass c, ClassifierSource source) {
  ClassifierOutput out;
  out.probabilities = {0.0, 0.0, 0.0};
  out.probabilities[static_cast<int>(c)] = 1.0;
  out.predicted = c;
  out.source = source;
  return out;
}

}  // namespace

const char* to_string(ComplexityClass c) {
  switch (c) {
    case ComplexityClass::Low: return "low";
    case ComplexityClass::Medium: return "medium";
    case ComplexityClass::High: return "high";
  }
  return "unknown";
}

const char* to_string(ModelTier t) {
  switch (t) {
    case ModelTier::Small: return "small";
    case ModelTier::Medium: return "medium";
    case ModelTier::Large: return "large";
  }
  return "unknown";
}

const char* to_string(ClassifierSource s) {
  switch (s) {
    case ClassifierSource::Keyword: return "keyword";
    case ClassifierSource::Semantic: return "semantic";
    case ClassifierSource::Hybrid: return "hybrid";
  }
  return "unknown";
}

std::optional<ComplexityClass> complexity_from_string(std::string_view s) {
  if (s == "low") return ComplexityClass::Low;
  if (s == "medium") return ComplexityClass::Medium;
  if (s == "high") return ComplexityClass::High;
  return std::nullopt;
}

std::optional<ModelTier> tier_from_string(std::string_view s) {
  if (s == "small") return ModelTier::Small;
  if (s == "medium") return ModelTier::Medium;
  if (s == "large") return ModelTier::Large;
  return std::nullopt;
}

Prompt Prompt::make(std::string id, std::string text, double arrival_time,
                    std::optional<std::string> benchmark_tag) {
  Prompt p;
  p.id = std::move(id);
  p.text = std::move(text);
  p.token_count = count_tokens(p.text);
  p.benchmark_tag = std::move(benchmark_tag);
  p.arrival_time = arrival_time;
  return p;
}

std::size_t count_tokens(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++count;
    }
  }
  return count;
}

std::vector<std::string> word_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (is_word_char(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

ComplexityClass argmax_class(const std::array<double, 3>& probabilities) {
  int best = 0;
  for (int k = 1; k < 3; ++k) {
    if (probabilities[k] > probabilities[best]) best = k;
  }
  return static_cast<ComplexityClass>(best);
}

KeywordRuleSet KeywordRuleSet::defaults() {
  KeywordRuleSet rules;
  rules.low_keywords = {"sum", "list", "define"};
  rules.high_keywords = {"prove", "derive", "explain why"};
  return rules;
}

void KeywordRuleSet::validate() const {
  for (const auto& low : low_keywords) {
    for (const auto& high : high_keywords) {
      if (word_tokens(low) == word_tokens(high)) {
        throw ConfigError("keyword '" + low +
                          "' appears in both low and high sets");
      }
    }
  }
}

ClassifierOutput keyword_classify(const Prompt& prompt,
                                  const KeywordRuleSet& rules) {
  const std::vector<std::string> tokens = word_tokens(prompt.text);
  // High dominates on conflicting matches.
  if (matches_any(tokens, rules.high_keywords)) {
    return one_hot(ComplexityClass::High, ClassifierSource::Keyword);
  }
  if (matches_any(tokens, rules.low_keywords)) {
    return one_hot(ComplexityClass::Low, ClassifierSource::Keyword);
  }
  return one_hot(ComplexityClass::Medium, ClassifierSource::Keyword);
}

ClassifierOutput semantic_classify(const Prompt& prompt,
                                   const SemanticClassifier& model) {
  return model.classify(prompt.text);
}

ClassifierOutput hybrid_classify(const Prompt& prompt,
                                 const KeywordRuleSet& rules,
                                 const SemanticClassifier* model,
                                 double confidence_threshold) {
  if (!(confidence_threshold > 0.0 && confidence_threshold <= 1.0)) {
    throw std::invalid_argument("confidence threshold must be in (0,1]");
  }
  ClassifierOutput keyword = keyword_classify(prompt, rules);
  // A keyword result other than Medium means a rule fired: short-circuit
  // without consulting the semantic model.
  if (keyword.predicted != ComplexityClass::Medium) return keyword;
  if (model == nullptr) return keyword;

  ClassifierOutput semantic;
  try {
    semantic = semantic_classify(prompt, *model);
  } catch (const ClassifierUnavailableError&) {
    return keyword;
  }

  const double max_prob =
      semantic.probabilities[static_cast<int>(semantic.predicted)];
  if (max_prob < confidence_threshold) {
    // Not confident enough: fall back to the Medium tier while keeping
    // the semantic distribution for auditability.
    semantic.predicted = ComplexityClass::Medium;
    semantic.source = ClassifierSource::Hybrid;
  }
  return semantic;
}

RelevanceTable RelevanceTable::defaults() {
  RelevanceTable t;
  //                       Small  Medium  Large
  t.value[0] /* Low    */ = {1.0, 0.8, 0.5};
  t.value[1] /* Medium */ = {0.5, 1.0, 0.8};
  t.value[2] /* High   */ = {0.2, 0.6, 1.0};
  return t;
}

void RelevanceTable::validate() const {
  for (const auto& row : value) {
    for (double v : row) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ConfigError("relevance table entry outside [0,1]");
      }
    }
  }
  const auto& high = value[static_cast<int>(ComplexityClass::High)];
  if (high[static_cast<int>(ModelTier::Large)] <
      std::max(high[0], std::max(high[1], high[2])) -
          1e-12) {
    throw ConfigError(
        "large tier must be the row maximum for high complexity");
  }
}

double relevance(const ClassifierOutput& output, ModelTier tier,
                 const RelevanceTable& table) {
  double sum = 0.0;
  for (int k = 0; k < 3; ++k) {
    sum += output.probabilities[k] *
           table.at(static_cast<ComplexityClass>(k), tier);
  }
  return std::clamp(sum, 0.0, 1.0);
}

ComplexityClass token_bucket(const Prompt& prompt, std::size_t t1,
                             std::size_t t2) {
  if (!(t1 > 0 && t1 < t2)) {
    throw std::invalid_argument("token thresholds must satisfy 0 < t1 < t2");
  }
  if (prompt.token_count < t1) return ComplexityClass::Low;
  if (prompt.token_count < t2) return ComplexityClass::Medium;
  return ComplexityClass::High;
}

}  // namespace ps
