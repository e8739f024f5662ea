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

// Trade-off between information loss and processing load. A candidate is
// selected by minimising visil + alpha * token_cost; sweeping alpha visits the
// convex hull of the Pareto frontier, which is also available directly.

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "visil/core.hpp"

namespace visil {

struct CandidatePoint {
  std::string summary_id;
  double visil = 0.0;
  std::int64_t token_cost = 0;

  bool operator==(const CandidatePoint&) const = default;
};

/// True when `p` is no worse than `q` on both axes and better on one.
bool dominates(const CandidatePoint& p, const CandidatePoint& q);

/// argmin visil + alpha * token_cost; ties go to lower visil, then lower
/// token_cost, then the lexicographically smaller summary_id.
CandidatePoint select_summary(const std::vector<CandidatePoint>& candidates, double alpha);

/// Every non-dominated point (duplicates of a frontier point included),
/// ordered by token_cost, then visil, then summary_id.
std::vector<CandidatePoint> pareto_frontier(std::vector<CandidatePoint> candidates);

/// select_summary at each alpha; `alphas` must be ascending and non-negative.
std::vector<std::pair<double, CandidatePoint>> alpha_sweep(
    const std::vector<CandidatePoint>& candidates, const std::vector<double>& alphas);

Json to_json(const CandidatePoint& p);

}  // namespace visil
