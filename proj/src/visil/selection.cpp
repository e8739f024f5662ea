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

#include "visil/selection.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace visil {

namespace {

bool frontier_order(const CandidatePoint& a, const CandidatePoint& b) {
  return std::tie(a.token_cost, a.visil, a.summary_id) <
         std::tie(b.token_cost, b.visil, b.summary_id);
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    fail(ErrorCode::kInvalidArgument, "alpha must be a finite non-negative number");
  }
}

}  // namespace

bool dominates(const CandidatePoint& p, const CandidatePoint& q) {
  return p.visil <= q.visil && p.token_cost <= q.token_cost &&
         (p.visil < q.visil || p.token_cost < q.token_cost);
}

CandidatePoint select_summary(const std::vector<CandidatePoint>& candidates, double alpha) {
  if (candidates.empty()) fail(ErrorCode::kEmptyInput, "no candidates to select from");
  check_alpha(alpha);
  const CandidatePoint* best = nullptr;
  double best_obj = 0.0;
  for (const auto& c : candidates) {
    if (c.token_cost < 0) fail(ErrorCode::kInvalidArgument, "negative token cost");
    const double obj = c.visil + alpha * static_cast<double>(c.token_cost);
    if (!best || obj < best_obj ||
        (obj == best_obj && std::tie(c.visil, c.token_cost, c.summary_id) <
                                std::tie(best->visil, best->token_cost, best->summary_id))) {
      best = &c;
      best_obj = obj;
    }
  }
  return *best;
}

std::vector<CandidatePoint> pareto_frontier(std::vector<CandidatePoint> candidates) {
  // Sweep by ascending cost; within one cost only the minimum visil can
  // survive, and it survives iff it beats every cheaper point's visil.
  std::sort(candidates.begin(), candidates.end(), frontier_order);
  std::vector<CandidatePoint> out;
  double best_cheaper = INFINITY;
  std::size_t i = 0;
  while (i < candidates.size()) {
    std::size_t j = i;
    while (j < candidates.size() && candidates[j].token_cost == candidates[i].token_cost) ++j;
    const double group_min = candidates[i].visil;
    if (group_min < best_cheaper) {
      for (std::size_t k = i; k < j && candidates[k].visil == group_min; ++k) {
        out.push_back(candidates[k]);
      }
      best_cheaper = group_min;
    }
    i = j;
  }
  return out;
}

std::vector<std::pair<double, CandidatePoint>> alpha_sweep(
    const std::vector<CandidatePoint>& candidates, const std::vector<double>& alphas) {
  if (!std::is_sorted(alphas.begin(), alphas.end())) {
    fail(ErrorCode::kInvalidArgument, "alphas must be sorted ascending");
  }
  std::vector<std::pair<double, CandidatePoint>> out;
  out.reserve(alphas.size());
  for (double a : alphas) out.emplace_back(a, select_summary(candidates, a));
  return out;
}

Json to_json(const CandidatePoint& p) {
  return Json{{"summary_id", p.summary_id}, {"visil", p.visil}, {"token_cost", p.token_cost}};
}

}  // namespace visil
