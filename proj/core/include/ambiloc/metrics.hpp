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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ambiloc/geometry.hpp"

namespace ambiloc {

struct MatchedPair {
  std::size_t truth_index = 0;
  std::size_t estimate_index = 0;
  double error_deg = 0.0;
};

/// Minimum-total-error one-to-one assignment between the shorter list and
/// the longer one, found exhaustively. Pairs are ordered by truth index.
/// Throws std::invalid_argument if both lists hold more than 3 entries.
std::vector<MatchedPair> match_pairs(std::span<const Direction> truth, std::span<const Direction> estimates);

/// Errors of match_pairs, in truth order.
std::vector<double> match_errors(std::span<const Direction> truth, std::span<const Direction> estimates);

struct EvalRecord {
  std::string id;
  std::vector<Direction> truth;
  std::vector<Direction> estimates;
  std::vector<double> errors;

  static EvalRecord make(std::string id, std::vector<Direction> truth, std::vector<Direction> estimates);
};

enum class AccuracyMode {
  /// Every matched source counts once.
  PooledSources,
  /// A sequence counts as correct only if all its sources are estimated
  /// within tolerance.
  AllSourcesPerSequence,
};

inline const std::vector<double> kDefaultTolerances{10.0, 15.0, 20.0};

struct Summary {
  std::vector<double> tolerances;
  std::vector<double> accuracy_percent;  // one per tolerance, "error < tolerance"
  double mean_error = 0.0;
  double median_error = 0.0;
  std::size_t matched = 0;
  std::size_t truth_total = 0;
  std::size_t estimate_total = 0;
  /// Side report at the first tolerance: hits / truth_total and
  /// hits / estimate_total.
  double recall = 0.0;
  double precision = 0.0;
};

/// Throws std::invalid_argument for an empty record list.
Summary summarize(std::span<const EvalRecord> records, const std::vector<double>& tolerances = kDefaultTolerances,
                  AccuracyMode mode = AccuracyMode::PooledSources);

/// Median of a non-empty list (mean of the middle pair for even sizes).
double median(std::vector<double> values);

}  // namespace ambiloc
