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

// Prompt assets shipped under prompts/ and compiled into the library. The
// text of every asset is sent to models unchanged except for `{name}`
// placeholder substitution.

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "visil/core.hpp"

namespace visil {

inline constexpr std::string_view kMaskSentinel = "[MASK]";

enum class PromptId {
  kCaptioning,
  kKeywords,
  kKeyframes,
  kSummary,
  kDistractors,
  kCorrespondence,
  kVisilScore,
  kVqa,
};

struct PromptAsset {
  std::string_view name;
  std::string_view text;
};

namespace detail {
const std::vector<PromptAsset>& embedded_prompts();
}

std::string_view prompt_name(PromptId id);
std::string_view prompt_text(PromptId id);
const std::vector<PromptId>& all_prompt_ids();

/// Single-pass `{name}` substitution; substituted values are never rescanned.
/// Unknown placeholders throw InvalidArgument.
std::string fill_template(std::string_view tmpl,
                          const std::map<std::string, std::string, std::less<>>& values);

enum class ScoreModality { kVideo, kThreeImage, kOneImage, kTextOnly };

/// Modality implied by a context: any video part wins, otherwise the number of
/// images (0, 1 or 3).
ScoreModality score_modality(const MediaContext& ctx);

/// Masked-word recovery prompt restricted to the input line for `modality`.
std::string visil_prompt(ScoreModality modality, std::string_view summary_text,
                         std::string_view masked_caption);

std::string_view vqa_input_format(SummaryFormat format);
std::string format_options(const std::vector<std::string>& options);
std::string vqa_prompt(SummaryFormat format, std::string_view summary_text,
                       std::string_view question, const std::vector<std::string>& options);

std::string distractor_prompt(int count = 3, std::string_view format = "JSON array of strings");

}  // namespace visil
