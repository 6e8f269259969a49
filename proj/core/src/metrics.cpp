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

#include "ambiloc/metrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ambiloc {

namespace {

constexpr std::size_t kMaxAssignedSources = 3;

struct Search {
  const std::vector<std::vector<double>>* cost;  // small x large
  std::vector<std::size_t> current;
  std::vector<bool> used;
  std::vector<std::size_t> best;
  double best_total = std::numeric_limits<double>::infinity();

  void run(std::size_t row, double total) {
    const auto& c = *cost;
    if (row == c.size()) {
      if (total < best_total) {
        best_total = total;
        best = current;
      }
      return;
    }
    for (std::size_t col = 0; col < used.size(); ++col) {
      if (used[col]) continue;
      used[col] = true;
      current[row] = col;
      run(row + 1, total + c[row][col]);
      used[col] = false;
    }
  }
};

}  // namespace

std::vector<MatchedPair> match_pairs(std::span<const Direction> truth, std::span<const Direction> estimates) {
  if (truth.empty() || estimates.empty()) return {};
  const bool truth_smaller = truth.size() <= estimates.size();
  const auto small = truth_smaller ? truth : estimates;
  const auto large = truth_smaller ? estimates : truth;
  if (small.size() > kMaxAssignedSources) {
    throw std::invalid_argument("match: more than 3 sources on both sides");
  }
  std::vector<std::vector<double>> cost(small.size(), std::vector<double>(large.size()));
  for (std::size_t i = 0; i < small.size(); ++i) {
    for (std::size_t j = 0; j < large.size(); ++j) cost[i][j] = angular_distance(small[i], large[j]);
  }
  Search s{&cost, std::vector<std::size_t>(small.size()), std::vector<bool>(large.size(), false), {}};
  s.run(0, 0.0);

  std::vector<MatchedPair> pairs;
  for (std::size_t i = 0; i < small.size(); ++i) {
    const std::size_t j = s.best[i];
    pairs.push_back(truth_smaller ? MatchedPair{i, j, cost[i][j]} : MatchedPair{j, i, cost[i][j]});
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const MatchedPair& a, const MatchedPair& b) { return a.truth_index < b.truth_index; });
  return pairs;
}

std::vector<double> match_errors(std::span<const Direction> truth, std::span<const Direction> estimates) {
  std::vector<double> out;
  for (const auto& p : match_pairs(truth, estimates)) out.push_back(p.error_deg);
  return out;
}

EvalRecord EvalRecord::make(std::string id, std::vector<Direction> truth, std::vector<Direction> estimates) {
  EvalRecord r{std::move(id), std::move(truth), std::move(estimates), {}};
  r.errors = match_errors(r.truth, r.estimates);
  return r;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median: empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

Summary summarize(std::span<const EvalRecord> records, const std::vector<double>& tolerances, AccuracyMode mode) {
  if (records.empty()) throw std::invalid_argument("summarize: no records");
  Summary s;
  s.tolerances = tolerances;
  std::vector<double> all_errors;
  for (const auto& r : records) {
    all_errors.insert(all_errors.end(), r.errors.begin(), r.errors.end());
    s.truth_total += r.truth.size();
    s.estimate_total += r.estimates.size();
  }
  s.matched = all_errors.size();

  for (const double tol : tolerances) {
    double hits = 0.0, total = 0.0;
    if (mode == AccuracyMode::PooledSources) {
      total = static_cast<double>(all_errors.size());
      hits = static_cast<double>(std::count_if(all_errors.begin(), all_errors.end(), [&](double e) { return e < tol; }));
    } else {
      total = static_cast<double>(records.size());
      for (const auto& r : records) {
        const bool complete = r.errors.size() == r.truth.size();
        const bool within = std::all_of(r.errors.begin(), r.errors.end(), [&](double e) { return e < tol; });
        if (complete && within) hits += 1.0;
      }
    }
    s.accuracy_percent.push_back(total > 0.0 ? 100.0 * hits / total : 0.0);
  }

  if (!all_errors.empty()) {
    s.mean_error = std::accumulate(all_errors.begin(), all_errors.end(), 0.0) / static_cast<double>(all_errors.size());
    s.median_error = median(all_errors);
  }
  if (!tolerances.empty()) {
    const double tol = tolerances.front();
    const auto hits = static_cast<double>(std::count_if(all_errors.begin(), all_errors.end(), [&](double e) { return e < tol; }));
    s.recall = s.truth_total ? hits / static_cast<double>(s.truth_total) : 0.0;
    s.precision = s.estimate_total ? hits / static_cast<double>(s.estimate_total) : 0.0;
  }
  return s;
}

}  // namespace ambiloc
