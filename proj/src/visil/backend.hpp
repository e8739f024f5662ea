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

// The model-backend contract. Implementations must be callable concurrently
// from several threads once constructed.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "visil/core.hpp"
#include "visil/masking.hpp"

namespace visil {

inline constexpr double kDefaultEpsilonFloor = 1e-6;
inline constexpr int kDefaultTopK = 20;

struct Usage {
  std::optional<std::int64_t> prompt_tokens;
};

struct TextResponse {
  std::string text;
  Usage usage;
};

struct KeywordScores {
  /// One natural-log probability per slot, each in [ln floor, 0].
  std::vector<double> logprobs;
  Usage usage;
  /// True when the response yielded no parseable guess and every slot was
  /// floored.
  bool empty_recovery = false;
  std::string raw_text;
};

/// What a generate_text request is for. Remote backends ignore it; the
/// synthetic backend dispatches on it.
enum class Task {
  kOther,
  kCaption,
  kKeywords,
  kKeyframes,
  kSummary,
  kDistractors,
  kCorrespondence,
  kVqa,
};

class Backend {
 public:
  virtual ~Backend() = default;

  virtual std::string model_id() const = 0;

  virtual TextResponse generate_text(const MediaContext& context, std::string_view prompt,
                                     std::int64_t seed, Task task = Task::kOther) const = 0;

  virtual KeywordScores score_keywords(const MediaContext& context,
                                       const MaskedCaption& masked,
                                       std::int64_t seed) const = 0;
};

struct ModelRoles {
  std::string captioner = "captioner";
  std::string keyword_extractor = "keyword-extractor";
  std::string summarizer = "summarizer";
  std::string evaluator = "evaluator";
  std::string answerer = "answerer";
  std::string judge = "judge";

  /// Throws RoleViolation when the evaluator shares a model with the
  /// captioner or summarizer and `allow_shared_evaluator` is false.
  void validate(bool allow_shared_evaluator = false) const;
  bool operator==(const ModelRoles&) const = default;
};

Json to_json(const ModelRoles& roles);
ModelRoles roles_from_json(const Json& j, ModelRoles defaults = {});

inline double clamp_logprob(double lp, double epsilon_floor) {
  const double lo = std::log(epsilon_floor);
  if (!(lp >= lo)) return lo;  // also catches NaN
  return lp > 0.0 ? 0.0 : lp;
}

}  // namespace visil
