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

// Hand-rolled random generators for property tests.

#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "visil/selection.hpp"

namespace visil::testing {

/// Up to `max_n` candidates. Half the sets draw from a coarse grid so equal
/// costs, equal scores and exact duplicates are common.
inline std::vector<CandidatePoint> random_candidates(std::mt19937_64& gen, std::size_t max_n = 50) {
  const std::size_t n = 1 + gen() % max_n;
  const bool coarse = gen() % 2 == 0;
  std::uniform_real_distribution<double> v(-2.0, 30.0);
  std::vector<CandidatePoint> out;
  for (std::size_t i = 0; i < n; ++i) {
    CandidatePoint p;
    p.summary_id = "s" + std::to_string(gen() % (n * 2));
    if (coarse) {
      p.visil = static_cast<double>(gen() % 8) * 0.5;
      p.token_cost = static_cast<std::int64_t>(gen() % 8) * 100;
    } else {
      p.visil = v(gen);
      p.token_cost = static_cast<std::int64_t>(gen() % 10000);
    }
    out.push_back(p);
  }
  return out;
}

/// Logistic data: x ~ N(0, sd), y ~ Bernoulli(sigmoid(b0 + b1 x)).
inline void random_logistic_data(std::mt19937_64& gen, std::size_t n, double b0, double b1,
                                 std::vector<double>& x, std::vector<double>& y) {
  std::normal_distribution<double> nx(0.0, 1.5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  x.assign(n, 0.0);
  y.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = nx(gen);
    y[i] = u(gen) < 1.0 / (1.0 + std::exp(-(b0 + b1 * x[i]))) ? 1.0 : 0.0;
  }
}

}  // namespace visil::testing
