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

// Information-loss score of a summary:
//
//   visil = log P(C | V) - log P(C | S),   log P(C | X) ~= sum_i log p(k_i | X)
//
// where k_i are the masked keywords of caption C. Each p(k_i | X) is the
// geometric mean over `runs` repeated backend calls of the floored keyword
// probability. Lower is better; the value is not clamped and may be negative.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "visil/backend.hpp"

namespace visil {

struct ScoringConfig {
  int runs = 3;
  std::int64_t seed = 0;
  double epsilon_floor = kDefaultEpsilonFloor;
  int top_k = kDefaultTopK;
  /// Backend calls issued concurrently inside one score; 0 means 2 * runs.
  int call_concurrency = 0;

  void validate() const;
};

/// Column-wise geometric mean of a [runs x n] probability matrix, computed as
/// exp(mean(log p)). Throws DomainError for entries outside (0, 1].
std::vector<double> geometric_mean_probs(const std::vector<std::vector<double>>& samples);

/// Mean of one column of log values, shifted by the first entry so identical
/// samples reproduce their value exactly.
double mean_of_logs(const std::vector<std::vector<double>>& logs, std::size_t column);

struct CaptionLogprob {
  double total = 0.0;
  std::vector<double> per_keyword;                 // log of geometric-mean probability
  std::vector<std::vector<double>> per_run;        // [runs x n] floored log-probabilities
  int floored_runs = 0;
  std::optional<std::int64_t> prompt_tokens;
};

CaptionLogprob conditional_caption_logprob(const Backend& backend, const MediaContext& context,
                                           const MaskedCaption& masked,
                                           const ScoringConfig& cfg);

ScoreRecord visil_score(const Backend& backend, const MediaContext& video_ctx,
                        const MediaContext& summary_ctx, const MaskedCaption& masked,
                        const ScoringConfig& cfg, const std::string& summary_id = "");

}  // namespace visil
