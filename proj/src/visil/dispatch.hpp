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

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "visil/error.hpp"

namespace visil {

/// Token bucket with capacity one: the k-th acquisition returns no earlier
/// than k * 60 / rpm seconds after the first.
class RateLimiter {
 public:
  explicit RateLimiter(int requests_per_minute) {
    if (requests_per_minute <= 0) {
      fail(ErrorCode::kInvalidArgument, "requests_per_minute must be positive");
    }
    interval_ = std::chrono::duration_cast<Clock::duration>(
        std::chrono::duration<double>(60.0 / requests_per_minute));
  }

  void acquire() {
    Clock::time_point slot;
    {
      std::lock_guard lock(mu_);
      slot = std::max(Clock::now(), next_);
      next_ = slot + interval_;
    }
    std::this_thread::sleep_until(slot);
  }

 private:
  using Clock = std::chrono::steady_clock;
  std::mutex mu_;
  Clock::duration interval_{};
  Clock::time_point next_{};
};

struct DispatchLimits {
  int max_concurrent = 1;
  std::optional<int> requests_per_minute;
};

template <typename T>
struct Outcome {
  std::optional<T> value;
  ErrorCode code = ErrorCode::kOk;
  std::string message;

  bool ok() const { return value.has_value(); }
};

/// Runs every request with at most `max_concurrent` in flight and an optional
/// rate cap. Results come back in request order; a failing request yields an
/// error outcome and never aborts the batch.
template <typename T>
std::vector<Outcome<T>> rate_limited_dispatch(const std::vector<std::function<T()>>& requests,
                                              const DispatchLimits& limits) {
  if (limits.max_concurrent <= 0) {
    fail(ErrorCode::kInvalidArgument, "max_concurrent must be positive");
  }
  std::optional<RateLimiter> limiter;
  if (limits.requests_per_minute) limiter.emplace(*limits.requests_per_minute);

  std::vector<Outcome<T>> results(requests.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= requests.size()) return;
      if (limiter) limiter->acquire();
      try {
        results[i].value.emplace(requests[i]());
      } catch (const Error& e) {
        results[i].code = e.code();
        results[i].message = e.what();
      } catch (const std::exception& e) {
        results[i].code = ErrorCode::kInternal;
        results[i].message = e.what();
      }
    }
  };
  const std::size_t n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(limits.max_concurrent), requests.size());
  if (n_workers <= 1) {
    worker();
    return results;
  }
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace visil
