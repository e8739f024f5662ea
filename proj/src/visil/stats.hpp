// Copyright 2026 The visil Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Validation statistics relating scores to task correctness.

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "visil/core.hpp"

namespace visil {

inline constexpr int kDefaultShuffles = 10000;

double pearson_r(const std::vector<double>& x, const std::vector<double>& y);

struct PermutationResult {
  double r_obs = 0.0;
  double p_value = 1.0;
  int n_shuffles = 0;
  std::int64_t seed = 0;
};

/// Two-sided permutation test on Pearson's r:
///   p = (1 + #{k : |r_k| >= |r_obs|}) / (1 + n_shuffles).
/// Shuffle k permutes y with a uniform Fisher-Yates draw from an
/// std::mt19937_64 seeded by substream_seed(seed, k), so the result does not
/// depend on `threads`.
PermutationResult permutation_test(const std::vector<double>& x, const std::vector<double>& y,
                                   int n_shuffles, std::int64_t seed, int threads = 1);

struct LogisticFit {
  double beta0 = 0.0;
  double beta1 = 0.0;
  double se0 = 0.0;
  double se1 = 0.0;
  double wald_p = 1.0;
  bool converged = false;
  int iterations = 0;
  double log_likelihood = 0.0;
  std::vector<std::string> warnings;
};

/// Maximum-likelihood fit of P(y = 1 | x) = 1 / (1 + exp(-b0 - b1 x)) by
/// iteratively reweighted least squares. Stops when the log-likelihood changes
/// by less than 1e-8 or after 100 iterations. Separable data (or |beta| > 1e3)
/// returns converged = false with a "Separation" warning.
LogisticFit logistic_fit(const std::vector<double>& x, const std::vector<double>& y);

/// True when some threshold splits the classes of y along x, allowing ties at
/// the threshold (quasi-complete separation).
bool is_separable(const std::vector<double>& x, const std::vector<double>& y);

struct CorrectnessLabel {
  std::string video_id;
  std::string summary_id;
  int correct = 0;
};

std::vector<CorrectnessLabel> parse_correctness(std::string_view json_text);
Json to_json(const CorrectnessLabel& label);

struct PairedSample {
  std::vector<double> x;
  std::vector<double> y;
  std::string evaluator_model;
  std::vector<std::pair<std::string, std::string>> keys;  // (video_id, summary_id)
  std::size_t dropped = 0;
};

/// Joins score records with correctness labels on (video_id, summary_id).
/// Every matching label contributes one sample; records without a label are
/// dropped and counted. Mixed evaluator models throw EvaluatorMismatch unless
/// `force` is set.
PairedSample pool_records(const std::vector<ScoreRecord>& records,
                          const std::vector<CorrectnessLabel>& labels, bool force = false);

/// Removes the first sample holding the maximum score and the first holding
/// the minimum.
PairedSample trim_extremes(const PairedSample& sample);

struct StatReport {
  std::size_t n = 0;
  double beta0 = 0.0;
  double beta1 = 0.0;
  double se1 = 0.0;
  double wald_p = 1.0;
  double pearson_r = 0.0;
  double perm_p = 1.0;
  int n_shuffles = 0;
  std::int64_t seed = 0;
  bool converged = false;
  std::string evaluator_model;
  std::size_t dropped = 0;
  std::vector<std::string> warnings;
};

StatReport build_report(const PairedSample& sample, int n_shuffles, std::int64_t seed,
                        int threads = 1);

Json to_json(const StatReport& r);

/// Aligned text table: Dataset, Sample Size, Pearson's r, p-value (with
/// * p < 0.05, ** p < 0.01), beta1, Wald p.
std::string format_report_table(const std::vector<std::pair<std::string, StatReport>>& rows,
                                int n_shuffles);

}  // namespace visil
