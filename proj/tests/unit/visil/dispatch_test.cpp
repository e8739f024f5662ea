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

#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <map>
#include <set>
#include <thread>

#include "visil/dispatch.hpp"
#include "visil/rng.hpp"

namespace visil {
namespace {

TEST(Dispatch, OrderPreservedAndFailuresIsolated) {
  std::vector<std::function<int()>> reqs;
  for (int i = 0; i < 50; ++i) {
    reqs.emplace_back([i] {
      if (i % 7 == 3) fail(ErrorCode::kBackendUnavailable, "down " + std::to_string(i));
      if (i == 10) throw std::runtime_error("boom");
      return i * i;
    });
  }
  auto out = rate_limited_dispatch(reqs, {8, std::nullopt});
  ASSERT_EQ(out.size(), 50u);
  for (int i = 0; i < 50; ++i) {
    if (i % 7 == 3) {
      EXPECT_FALSE(out[i].ok());
      EXPECT_EQ(out[i].code, ErrorCode::kBackendUnavailable);
    } else if (i == 10) {
      EXPECT_EQ(out[i].code, ErrorCode::kInternal);
    } else {
      EXPECT_EQ(*out[i].value, i * i);
    }
  }
}

TEST(Dispatch, ConcurrencyCap) {
  std::atomic<int> in_flight{0}, peak{0};
  std::vector<std::function<int()>> reqs(24, [&] {
    int now = ++in_flight;
    int p = peak.load();
    while (now > p && !peak.compare_exchange_weak(p, now)) {}
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    --in_flight;
    return 0;
  });
  rate_limited_dispatch(reqs, {3, std::nullopt});
  EXPECT_LE(peak.load(), 3);
  EXPECT_GE(peak.load(), 2);
  EXPECT_THROW(rate_limited_dispatch(reqs, {0, std::nullopt}), Error);
}

TEST(Dispatch, RateLimit) {
  std::vector<std::function<int()>> reqs(5, [] { return 1; });
  const auto t0 = std::chrono::steady_clock::now();
  rate_limited_dispatch(reqs, {4, 1200});  // one per 50 ms
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0).count();
  EXPECT_GE(ms, 4 * 50 - 5);
  EXPECT_THROW(RateLimiter(0), Error);
}

TEST(Rng, SubstreamsAreDistinctAndStable) {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t k = 0; k < 10000; ++k) seeds.insert(substream_seed(7, k));
  EXPECT_EQ(seeds.size(), 10000u);
  EXPECT_NE(substream_seed(7, 0), substream_seed(8, 0));
  // splitmix64 reference value for input 0.
  EXPECT_EQ(splitmix64(0), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Rng, UniformRangeAndBelow) {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(rng.below(7), 7u);
  }
}

// Every ordering of 4 elements appears with frequency close to 1/24.
TEST(Rng, ShuffleIsUniform) {
  std::map<std::vector<int>, int> counts;
  const int trials = 48000;
  for (int t = 0; t < trials; ++t) {
    Rng rng(substream_seed(3, static_cast<std::uint64_t>(t)));
    std::vector<int> v = {0, 1, 2, 3};
    rng.shuffle(v);
    ++counts[v];
  }
  ASSERT_EQ(counts.size(), 24u);
  double chi2 = 0;
  for (const auto& [_, c] : counts) chi2 += (c - 2000.0) * (c - 2000.0) / 2000.0;
  EXPECT_LT(chi2, 49.7);  // 23 dof, p = 0.001
}

}  // namespace
}  // namespace visil
