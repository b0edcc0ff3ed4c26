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

#include <cmath>
#include <random>

#include <doctest.h>

#include "ps/errors.hpp"
#include "ps/scoring.hpp"

using namespace ps;

namespace {

WeightProfile balanced() { return {"balanced", 0.5, 0.3, 0.3}; }

// Independent oracle: plain argmax scan with its own arithmetic.
std::size_t brute_force_best(const std::vector<ScoredCandidate>& cands,
                             const WeightProfile& p) {
  const double sum = p.alpha + p.lambda + p.mu;
  std::size_t best = 0;
  auto value = [&](const ScoredCandidate& c) {
    return (p.alpha * c.components.relevance_hat +
            p.lambda * c.components.latency_hat +
            p.mu * c.components.cost_hat) /
           sum;
  };
  for (std::size_t i = 1; i < cands.size(); ++i) {
    const double vi = value(cands[i]);
    const double vb = value(cands[best]);
    if (vi > vb ||
        (vi == vb && (cands[i].raw_cost < cands[best].raw_cost ||
                      (cands[i].raw_cost == cands[best].raw_cost &&
                       cands[i].service_id < cands[best].service_id)))) {
      best = i;
    }
  }
  return best;
}

}  // namespace

TEST_SUITE("scoring") {

TEST_CASE("weight normalization divides by the coefficient sum") {
  const auto quality = normalize_weights({"quality", 1.0, 0.1, 0.1});
  CHECK(quality.relevance == doctest::Approx(1.0 / 1.2).epsilon(1e-12));
  CHECK(quality.latency == doctest::Approx(0.1 / 1.2).epsilon(1e-12));
  CHECK(quality.cost == doctest::Approx(0.1 / 1.2).epsilon(1e-12));

  const auto bal = normalize_weights(balanced());
  CHECK(bal.relevance == doctest::Approx(0.5 / 1.1).epsilon(1e-12));
  CHECK(bal.latency == doctest::Approx(0.3 / 1.1).epsilon(1e-12));
  CHECK(bal.cost == doctest::Approx(0.3 / 1.1).epsilon(1e-12));

  const auto degenerate = normalize_weights({"only-r", 1.0, 0.0, 0.0});
  CHECK(degenerate.relevance == 1.0);
  CHECK(degenerate.latency == 0.0);
  CHECK(degenerate.cost == 0.0);
}

TEST_CASE("weights sum to one within 1e-12 and lie in [0,1]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coeff(0.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    WeightProfile p{"r", coeff(rng), coeff(rng), coeff(rng)};
    if (p.alpha + p.lambda + p.mu == 0.0) continue;
    const auto w = normalize_weights(p);
    CHECK(std::abs(w.relevance + w.latency + w.cost - 1.0) <= 1e-12);
    for (double v : {w.relevance, w.latency, w.cost}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("all-zero and negative profiles are rejected") {
  CHECK_THROWS_AS(normalize_weights({"zero", 0, 0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(normalize_weights({"neg", 1.0, -0.1, 0.1}),
                  std::invalid_argument);
}

TEST_CASE("metric normalization endpoints and cold-cache default") {
  NormalizationStats stats;
  stats.add(2.0);
  stats.add(8.0);
  stats.add(5.0);
  CHECK(normalize_metric(2.0, stats) == 0.0);
  CHECK(normalize_metric(8.0, stats) == 1.0);
  CHECK(normalize_metric(5.0, stats) == doctest::Approx(0.5));
  CHECK(normalize_metric(-10.0, stats) == 0.0);   // clamped
  CHECK(normalize_metric(100.0, stats) == 1.0);   // clamped

  const NormalizationStats empty;
  CHECK(normalize_metric(123.0, empty) == 0.5);

  NormalizationStats single;
  single.add(4.0);
  CHECK(normalize_metric(4.0, single) == 0.5);

  NormalizationStats flat;
  flat.add(3.0);
  flat.add(3.0);
  CHECK(normalize_metric(3.0, flat) == 0.5);  // min == max guard
}

TEST_CASE("normalize_metric is non-decreasing in value") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> metric(0.0, 50.0);
  for (int trial = 0; trial < 200; ++trial) {
    NormalizationStats stats;
    const int n = 2 + static_cast<int>(rng() % 20);
    for (int i = 0; i < n; ++i) stats.add(metric(rng));
    double a = metric(rng), b = metric(rng);
    if (a > b) std::swap(a, b);
    CHECK(normalize_metric(a, stats) <= normalize_metric(b, stats));
  }
}

TEST_CASE("score is the convex combination") {
  const WeightProfile p = balanced();
  CHECK(score({1, 1, 1}, p) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(score({0, 0, 0}, p) == doctest::Approx(0.0).epsilon(1e-12));
  // Hand oracle: (0.5*0.9 + 0.3*0.4 + 0.3*0.6) / 1.1 = 7.5/11.
  CHECK(score({0.9, 0.4, 0.6}, p) ==
        doctest::Approx(7.5 / 11.0).epsilon(1e-12));
}

TEST_CASE("components outside [0,1] violate the contract") {
  CHECK_THROWS_AS(score({1.5, 0.5, 0.5}, balanced()), std::invalid_argument);
  CHECK_THROWS_AS(score({0.5, -0.2, 0.5}, balanced()), std::invalid_argument);
  CHECK_NOTHROW(score({1.0 + 1e-12, 0.5, 0.5}, balanced()));  // slack
}

TEST_CASE("legacy raw rule matches alpha*R - lambda*normT - mu*normC") {
  const WeightProfile p{"x", 0.7, 0.4, 0.2};
  const ScoreComponents c{0.8, 0.3, 0.9};
  const double expected = 0.7 * 0.8 - 0.4 * (1.0 - 0.3) - 0.2 * (1.0 - 0.9);
  CHECK(score(c, p, ScoreRule::LegacyRaw) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("boundedness over 10k random draws") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> coeff(0.0, 5.0);
  for (int i = 0; i < 10000; ++i) {
    WeightProfile p{"r", coeff(rng), coeff(rng), coeff(rng)};
    if (p.alpha + p.lambda + p.mu <= 0.0) p.alpha = 1.0;
    const double s = score({unit(rng), unit(rng), unit(rng)}, p);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
  }
}

TEST_CASE("power-of-two coefficient scaling leaves weights bit-identical") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coeff(0.01, 4.0);
  for (int i = 0; i < 2000; ++i) {
    const WeightProfile p{"p", coeff(rng), coeff(rng), coeff(rng)};
    const int exp = static_cast<int>(rng() % 17) - 8;
    const double c = std::ldexp(1.0, exp);
    const WeightProfile scaled{"p", c * p.alpha, c * p.lambda, c * p.mu};
    const auto w1 = normalize_weights(p);
    const auto w2 = normalize_weights(scaled);
    CHECK(w1.relevance == w2.relevance);
    CHECK(w1.latency == w2.latency);
    CHECK(w1.cost == w2.cost);
  }
}

TEST_CASE("random positive scaling never changes the selected candidate") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> coeff(0.01, 4.0);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<ScoredCandidate> cands;
    const int n = 2 + static_cast<int>(rng() % 10);
    for (int i = 0; i < n; ++i) {
      cands.push_back({"svc-" + std::to_string(i),
                       {unit(rng), unit(rng), unit(rng)},
                       unit(rng)});
    }
    const WeightProfile p{"p", coeff(rng), coeff(rng), coeff(rng)};
    const double c = scale(rng);
    const WeightProfile scaled{"p", c * p.alpha, c * p.lambda, c * p.mu};
    CHECK(select_best(cands, p).service_id ==
          select_best(cands, scaled).service_id);
  }
}

TEST_CASE("select_best basics and tie-breaking") {
  const WeightProfile p = balanced();
  std::vector<ScoredCandidate> one = {{"only", {0.2, 0.2, 0.2}, 1.0}};
  CHECK(select_best(one, p).service_id == "only");

  std::vector<ScoredCandidate> two = {{"weak", {0.3, 0.3, 0.3}, 0.1},
                                      {"strong", {0.7, 0.7, 0.7}, 9.0}};
  CHECK(select_best(two, p).service_id == "strong");

  // Identical components: cheaper raw cost wins, then lexicographic id.
  std::vector<ScoredCandidate> tie = {{"b", {0.5, 0.5, 0.5}, 0.020},
                                      {"a", {0.5, 0.5, 0.5}, 0.015}};
  CHECK(select_best(tie, p).service_id == "a");
  std::vector<ScoredCandidate> tie2 = {{"b", {0.5, 0.5, 0.5}, 0.015},
                                       {"a", {0.5, 0.5, 0.5}, 0.015}};
  CHECK(select_best(tie2, p).service_id == "a");

  const std::vector<ScoredCandidate> empty;
  CHECK_THROWS_AS(select_best(empty, p), NoHealthyServiceError);
}

TEST_CASE("select_best agrees with an exhaustive-scan oracle") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> coeff(0.01, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ScoredCandidate> cands;
    for (int i = 0; i < 50; ++i) {
      cands.push_back({"svc-" + std::to_string(i),
                       {unit(rng), unit(rng), unit(rng)},
                       unit(rng)});
    }
    const WeightProfile p{"p", coeff(rng), coeff(rng), coeff(rng)};
    CHECK(select_best(cands, p).service_id ==
          cands[brute_force_best(cands, p)].service_id);
  }
}

TEST_CASE("raising a winner's relevance never dethrones it") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> coeff(0.01, 3.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ScoredCandidate> cands;
    const int n = 2 + static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
      cands.push_back({"svc-" + std::to_string(i),
                       {unit(rng), unit(rng), unit(rng)},
                       unit(rng)});
    }
    const WeightProfile p{"p", coeff(rng), coeff(rng), coeff(rng)};
    const std::string winner = select_best(cands, p).service_id;
    for (auto& c : cands) {
      if (c.service_id == winner) {
        c.components.relevance_hat =
            std::min(1.0, c.components.relevance_hat + unit(rng) *
                              (1.0 - c.components.relevance_hat));
      }
    }
    CHECK(select_best(cands, p).service_id == winner);
  }
}

}  // TEST_SUITE
