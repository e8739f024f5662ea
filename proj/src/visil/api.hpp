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

// Chat-completions client with per-token log-probabilities.
//
// Request payload:
//   {"model": M, "seed": S, "temperature": T,
//    "messages": [{"role": "user", "content": [PART..., {"type": "text", "text": PROMPT}]}],
//    "logprobs": true, "top_logprobs": K}          (scoring requests only)
// PART is {"type": "text", "text": ...}, {"type": "image_url", "image_url": {"url": U}}
// or {"type": "video_url", "video_url": {"url": U}}. U is the file path itself
// (MediaEncoding::kReference) or a base64 data URL (MediaEncoding::kInline).
// Scoring and VQA prompts already embed the summary text, so those requests
// carry only the media parts of the context.

#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "visil/backend.hpp"
#include "visil/dispatch.hpp"
#include "visil/transport.hpp"

namespace visil {

enum class MediaEncoding { kReference, kInline };

struct ApiOptions {
  std::string model_id;
  double temperature = 0.0;
  int top_k = kDefaultTopK;
  double epsilon_floor = kDefaultEpsilonFloor;
  int retries = 3;
  std::chrono::milliseconds backoff_base{1000};
  MediaEncoding media = MediaEncoding::kReference;
  /// Shared across every client talking to the same endpoint; may be null.
  std::shared_ptr<RateLimiter> limiter;
};

struct TokenLogprob {
  std::string token;
  double logprob = 0.0;
  std::vector<std::pair<std::string, double>> top;
};

struct ChatResponse {
  std::string content;
  std::string finish_reason;
  std::vector<TokenLogprob> tokens;
  std::optional<std::int64_t> prompt_tokens;

  bool refused() const;
};

ChatResponse parse_chat_response(const Json& body);

struct KeywordReadout {
  std::vector<double> logprobs;
  bool empty_recovery = false;
};

/// Maps generated tokens onto mask slots. Tokens are grouped into words (a
/// token starting with whitespace opens a new word); word i answers slot i.
/// Slot i scores the generated word's summed log-probability when it equals
/// the keyword, else the log-sum-exp of the first-position alternatives that
/// equal it, else ln(epsilon_floor).
KeywordReadout keyword_logprobs_from_tokens(const std::vector<TokenLogprob>& tokens,
                                            const std::vector<std::string>& keywords,
                                            double epsilon_floor);

class ApiBackend final : public Backend {
 public:
  ApiBackend(std::shared_ptr<const Transport> transport, ApiOptions options);

  std::string model_id() const override { return options_.model_id; }

  TextResponse generate_text(const MediaContext& context, std::string_view prompt,
                             std::int64_t seed, Task task) const override;
  KeywordScores score_keywords(const MediaContext& context, const MaskedCaption& masked,
                               std::int64_t seed) const override;

  Json build_payload(const MediaContext& context, std::string_view prompt, std::int64_t seed,
                     bool with_logprobs, bool include_text = true) const;

 private:
  ChatResponse send(const Json& payload) const;

  std::shared_ptr<const Transport> transport_;
  ApiOptions options_;
};

}  // namespace visil
