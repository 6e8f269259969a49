/**
 * Copyright 2026 The ambiloc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "ambiloc/metrics.hpp"
#include "oracles.hpp"

namespace ambiloc {
namespace {

double total(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

TEST(MatchErrors, NamedCases) {
  EXPECT_TRUE(match_errors({}, std::vector<Direction>{{0, 0}}).empty());
  const std::vector<Direction> a{{10, 0}, {-50, 20}, {100, -30}};
  const std::vector<Direction> shuffled{a[2], a[0], a[1]};
  for (const double e : match_errors(a, shuffled)) EXPECT_NEAR(e, 0.0, 1e-6);

  const auto five = match_errors(std::vector<Direction>{{20, 0}}, std::vector<Direction>{{25, 0}});
  ASSERT_EQ(five.size(), 1u);
  EXPECT_NEAR(five[0], 5.0, 1e-9);
}

TEST(MatchErrors, BeatsGreedy) {
  // Greedy takes the 9 degree pair first and is left with 40; optimal is 11 + 20.
  const std::vector<Direction> truth{{0, 0}, {20, 0}};
  const std::vector<Direction> est{{11, 0}, {40, 0}};
  const auto e = match_errors(truth, est);
  EXPECT_NEAR(total(e), 31.0, 1e-9);
  EXPECT_NEAR(e[0], 11.0, 1e-9);
  EXPECT_NEAR(e[1], 20.0, 1e-9);
  EXPECT_NEAR(total(e), oracle::best_assignment_total(truth, est), 1e-9);
}

TEST(MatchErrors, OptimalOnAllSmallSizes) {
  std::mt19937_64 rng(1);
  for (std::size_t nt = 0; nt <= 3; ++nt) {
    for (std::size_t ne = 0; ne <= 3; ++ne) {
      for (int trial = 0; trial < 200; ++trial) {
        std::vector<Direction> t, e;
        for (std::size_t i = 0; i < nt; ++i) t.push_back(oracle::random_direction(rng));
        for (std::size_t i = 0; i < ne; ++i) e.push_back(oracle::random_direction(rng));
        const auto got = match_errors(t, e);
        ASSERT_EQ(got.size(), std::min(nt, ne));
        ASSERT_NEAR(total(got), oracle::best_assignment_total(t, e), 1e-9);
      }
    }
  }
}

TEST(MatchPairs, IndicesAndLimits) {
  const std::vector<Direction> truth{{0, 0}, {90, 0}};
  const std::vector<Direction> est{{91, 0}, {5, 0}, {-90, 0}};
  const auto p = match_pairs(truth, est);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0].truth_index, 0u);
  EXPECT_EQ(p[0].estimate_index, 1u);
  EXPECT_EQ(p[1].estimate_index, 0u);
  const std::vector<Direction> four(4, Direction{0, 0});
  EXPECT_THROW(match_pairs(four, four), std::invalid_argument);
}

std::vector<EvalRecord> records_with_errors(const std::vector<double>& errors) {
  std::vector<EvalRecord> out;
  for (const double e : errors) out.push_back(EvalRecord::make("r", {{0, 0}}, {{e, 0}}));
  return out;
}

TEST(Summarize, HandComputedFixture) {
  const auto s = summarize(records_with_errors({5, 12, 30}));
  ASSERT_EQ(s.accuracy_percent.size(), 3u);
  EXPECT_NEAR(s.accuracy_percent[0], 100.0 / 3.0, 1e-9);
  EXPECT_NEAR(s.accuracy_percent[1], 200.0 / 3.0, 1e-9);
  EXPECT_NEAR(s.mean_error, 47.0 / 3.0, 1e-9);
  EXPECT_NEAR(s.median_error, 12.0, 1e-9);
}

TEST(Summarize, PerfectAndSingle) {
  const auto perfect = summarize(records_with_errors({0, 0, 0, 0}));
  for (const double a : perfect.accuracy_percent) EXPECT_EQ(a, 100.0);
  EXPECT_NEAR(perfect.mean_error, 0.0, 1e-9);
  EXPECT_NEAR(perfect.median_error, 0.0, 1e-9);

  const auto one = summarize(records_with_errors({17}));
  EXPECT_NEAR(one.mean_error, 17.0, 1e-9);
  EXPECT_EQ(one.mean_error, one.median_error);
  EXPECT_THROW(summarize(std::span<const EvalRecord>{}), std::invalid_argument);
}

TEST(Summarize, MonotoneInTolerance) {
  std::mt19937_64 rng(2);
  std::exponential_distribution<double> skew(1.0 / 12.0);
  std::vector<double> errors(300);
  for (auto& e : errors) e = std::min(179.0, skew(rng));
  const auto s = summarize(records_with_errors(errors), {1, 5, 10, 15, 20, 45, 90});
  for (std::size_t i = 1; i < s.accuracy_percent.size(); ++i) {
    EXPECT_GE(s.accuracy_percent[i], s.accuracy_percent[i - 1]);
  }
  // Right-skewed fixture.
  EXPECT_LE(s.median_error, s.mean_error);
}

TEST(Summarize, AllSourcesModeAndDetection) {
  std::vector<EvalRecord> r;
  r.push_back(EvalRecord::make("a", {{0, 0}, {90, 0}}, {{2, 0}, {120, 0}}));  // errors 2, 30
  r.push_back(EvalRecord::make("b", {{0, 0}}, {{3, 0}, {60, 0}}));            // error 3, spurious estimate
  r.push_back(EvalRecord::make("c", {{0, 0}, {90, 0}}, {{1, 0}}));            // one source missed
  const auto pooled = summarize(r, {10});
  EXPECT_NEAR(pooled.accuracy_percent[0], 75.0, 1e-9);
  const auto strict = summarize(r, {10}, AccuracyMode::AllSourcesPerSequence);
  EXPECT_NEAR(strict.accuracy_percent[0], 100.0 / 3.0, 1e-9);
  EXPECT_EQ(pooled.truth_total, 5u);
  EXPECT_EQ(pooled.estimate_total, 5u);
  EXPECT_NEAR(pooled.recall, 3.0 / 5.0, 1e-12);
  EXPECT_NEAR(pooled.precision, 3.0 / 5.0, 1e-12);
}

TEST(Median, EvenAndOdd) {
  EXPECT_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(median({4, 1, 2, 3}), 2.5);
  EXPECT_THROW(median({}), std::invalid_argument);
}

}  // namespace
}  // namespace ambiloc
