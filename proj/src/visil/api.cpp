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

#include "visil/api.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <thread>

#include "visil/io.hpp"
#include "visil/prompts.hpp"

namespace visil {
namespace {

std::string mime_for(const std::string& path, bool video) {
  auto dot = path.rfind('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (video) return ext == "webm" ? "video/webm" : "video/mp4";
  if (ext == "jpg" || ext == "jpeg") return "image/jpeg";
  if (ext == "webp") return "image/webp";
  return "image/png";
}

bool starts_with_space(const std::string& s) {
  return !s.empty() && std::isspace(static_cast<unsigned char>(s.front()));
}

double log_sum_exp(const std::vector<double>& xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

bool retryable_status(int status) { return status == 408 || status == 429 || status >= 500; }

}  // namespace

bool ChatResponse::refused() const {
  return finish_reason == "content_filter" || finish_reason == "safety" ||
         finish_reason == "refusal";
}

ChatResponse parse_chat_response(const Json& body) {
  ChatResponse out;
  try {
    const auto& choice = body.at("choices").at(0);
    const auto& message = choice.at("message");
    if (message.contains("content") && message["content"].is_string()) {
      out.content = message["content"].get<std::string>();
    }
    if (choice.contains("finish_reason") && choice["finish_reason"].is_string()) {
      out.finish_reason = choice["finish_reason"].get<std::string>();
    }
    if (message.contains("refusal") && message["refusal"].is_string() && out.content.empty()) {
      out.finish_reason = "refusal";
    }
    if (choice.contains("logprobs") && choice["logprobs"].is_object() &&
        choice["logprobs"].contains("content") && choice["logprobs"]["content"].is_array()) {
      for (const auto& t : choice["logprobs"]["content"]) {
        TokenLogprob tok{t.at("token").get<std::string>(), t.at("logprob").get<double>(), {}};
        if (t.contains("top_logprobs") && t["top_logprobs"].is_array()) {
          for (const auto& alt : t["top_logprobs"]) {
            tok.top.emplace_back(alt.at("token").get<std::string>(),
                                 alt.at("logprob").get<double>());
          }
        }
        out.tokens.push_back(std::move(tok));
      }
    }
    if (body.contains("usage") && body["usage"].is_object() &&
        body["usage"].contains("prompt_tokens")) {
      out.prompt_tokens = body["usage"]["prompt_tokens"].get<std::int64_t>();
    }
  } catch (const Json::exception& e) {
    fail(ErrorCode::kParseError, std::string("malformed chat response: ") + e.what());
  }
  return out;
}

KeywordReadout keyword_logprobs_from_tokens(const std::vector<TokenLogprob>& tokens,
                                            const std::vector<std::string>& keywords,
                                            double epsilon_floor) {
  struct Word {
    std::string text;
    std::vector<std::size_t> token_idx;
  };
  std::vector<Word> words;
  bool open = false;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& tok = tokens[i].token;
    const bool blank = std::all_of(tok.begin(), tok.end(),
                                   [](unsigned char c) { return std::isspace(c) != 0; });
    if (blank) {
      open = false;
      continue;
    }
    if (!open || starts_with_space(tok)) {
      words.push_back({});
      open = true;
    }
    words.back().text += tok;
    words.back().token_idx.push_back(i);
    if (std::isspace(static_cast<unsigned char>(tok.back()))) open = false;
  }

  KeywordReadout out;
  const double floor_lp = std::log(epsilon_floor);
  std::size_t recovered = 0;
  for (std::size_t slot = 0; slot < keywords.size(); ++slot) {
    const std::string& kw = keywords[slot];
    double lp = floor_lp;
    if (slot < words.size()) {
      const Word& w = words[slot];
      ++recovered;
      if (normalize_token(w.text) == kw) {
        lp = 0.0;
        for (auto i : w.token_idx) lp += tokens[i].logprob;
      } else {
        std::vector<double> mass;
        for (const auto& [alt, alt_lp] : tokens[w.token_idx.front()].top) {
          if (normalize_token(alt) == kw) mass.push_back(alt_lp);
        }
        if (!mass.empty()) lp = log_sum_exp(mass);
      }
    }
    out.logprobs.push_back(clamp_logprob(lp, epsilon_floor));
  }
  out.empty_recovery = recovered == 0 && !keywords.empty();
  return out;
}

ApiBackend::ApiBackend(std::shared_ptr<const Transport> transport, ApiOptions options)
    : transport_(std::move(transport)), options_(std::move(options)) {
  if (!transport_) fail(ErrorCode::kInvalidArgument, "api backend needs a transport");
  if (options_.model_id.empty()) fail(ErrorCode::kInvalidArgument, "api backend needs a model id");
  if (options_.top_k <= 0) fail(ErrorCode::kInvalidArgument, "top_k must be positive");
  if (!(options_.epsilon_floor > 0.0 && options_.epsilon_floor < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "epsilon_floor must lie in (0, 1)");
  }
}

Json ApiBackend::build_payload(const MediaContext& context, std::string_view prompt,
                               std::int64_t seed, bool with_logprobs, bool include_text) const {
  auto media_url = [&](const std::string& path, bool video) -> std::string {
    if (options_.media == MediaEncoding::kReference) return path;
    return "data:" + mime_for(path, video) + ";base64," + base64_encode(read_file(path));
  };
  Json content = Json::array();
  for (const auto& part : context.parts) {
    if (const auto* t = std::get_if<TextPart>(&part)) {
      if (!include_text) continue;
      content.push_back({{"type", "text"}, {"text", t->text}});
    } else if (const auto* img = std::get_if<ImagePart>(&part)) {
      if (img->frame.path.empty()) {
        fail(ErrorCode::kInvalidArgument, "image part has no resolved frame path");
      }
      content.push_back(
          {{"type", "image_url"}, {"image_url", {{"url", media_url(img->frame.path, false)}}}});
    } else if (const auto* v = std::get_if<VideoPart>(&part)) {
      if (!v->video.video_path) {
        fail(ErrorCode::kInvalidArgument, "video '" + v->video.id + "' has no video_path");
      }
      content.push_back({{"type", "video_url"},
                         {"video_url", {{"url", media_url(*v->video.video_path, true)}}}});
    }
  }
  content.push_back({{"type", "text"}, {"text", std::string(prompt)}});

  Json payload{{"model", options_.model_id},
               {"seed", seed},
               {"temperature", options_.temperature},
               {"messages", Json::array({{{"role", "user"}, {"content", std::move(content)}}})}};
  if (with_logprobs) {
    payload["logprobs"] = true;
    payload["top_logprobs"] = options_.top_k;
  }
  return payload;
}

ChatResponse ApiBackend::send(const Json& payload) const {
  std::string last_error;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    if (attempt > 0 && options_.backoff_base.count() > 0) {
      std::this_thread::sleep_for(options_.backoff_base * (1 << (attempt - 1)));
    }
    if (options_.limiter) options_.limiter->acquire();
    HttpResult res;
    try {
      res = transport_->post(payload);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kBackendUnavailable) throw;
      last_error = e.what();
      continue;
    }
    if (res.status != 200) {
      last_error = "HTTP " + std::to_string(res.status);
      if (retryable_status(res.status)) continue;
      fail(ErrorCode::kBackendUnavailable, last_error + ": " + res.body.substr(0, 200));
    }
    Json body;
    try {
      body = Json::parse(res.body);
    } catch (const Json::exception& e) {
      last_error = std::string("unparseable response body: ") + e.what();
      continue;
    }
    ChatResponse parsed = parse_chat_response(body);
    if (parsed.refused()) {
      last_error = "model refused (" + parsed.finish_reason + ")";
      continue;
    }
    return parsed;
  }
  fail(ErrorCode::kBackendUnavailable,
       "giving up after " + std::to_string(options_.retries) + " retries: " + last_error);
}

TextResponse ApiBackend::generate_text(const MediaContext& context, std::string_view prompt,
                                       std::int64_t seed, Task task) const {
  auto res = send(build_payload(context, prompt, seed, false, task != Task::kVqa));
  return TextResponse{std::move(res.content), Usage{res.prompt_tokens}};
}

KeywordScores ApiBackend::score_keywords(const MediaContext& context,
                                         const MaskedCaption& masked,
                                         std::int64_t seed) const {
  const auto prompt =
      visil_prompt(score_modality(context), context.joined_text(), masked.masked_text);
  auto res = send(build_payload(context, prompt, seed, true, false));
  auto readout =
      keyword_logprobs_from_tokens(res.tokens, masked.slot_keywords(), options_.epsilon_floor);
  KeywordScores out;
  out.logprobs = std::move(readout.logprobs);
  out.empty_recovery = readout.empty_recovery;
  out.usage.prompt_tokens = res.prompt_tokens;
  out.raw_text = std::move(res.content);
  return out;
}

}  // namespace visil
