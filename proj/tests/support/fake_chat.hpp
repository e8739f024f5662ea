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

// Deterministic stand-in for a chat-completions endpoint. Responses depend
// only on the request payload.

#pragma once

#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "visil/masking.hpp"
#include "visil/rng.hpp"
#include "visil/transport.hpp"

namespace visil::testing {

struct FakeChatOptions {
  double p_hit = 0.8;
  double p_miss = 0.05;
  double jitter = 0.1;  // log-scale spread across seeds
  // Masked caption text -> keywords in slot order.
  std::map<std::string, std::vector<std::string>> answers;
  // Image URL -> words visible in that frame.
  std::map<std::string, std::set<std::string>> frame_facts;
};

inline std::set<std::string> word_set(std::string_view text) {
  std::set<std::string> out;
  std::istringstream in{std::string(text)};
  std::string w;
  while (in >> w) {
    auto n = normalize_token(w);
    if (!n.empty()) out.insert(n);
  }
  return out;
}

inline double unit_hash(std::string_view a, std::int64_t b) {
  const auto h = splitmix64(fnv1a64(a) ^ static_cast<std::uint64_t>(b));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

inline Json fake_chat_body(const Json& payload, const FakeChatOptions& opt) {
  const auto& content = payload.at("messages").at(0).at("content");
  const std::string prompt = content.back().at("text").get<std::string>();
  const std::int64_t seed = payload.value("seed", std::int64_t{0});
  bool has_video = false;
  std::set<std::string> visible;
  std::int64_t prompt_tokens = 0;
  for (std::size_t i = 0; i < content.size(); ++i) {
    const auto& part = content[i];
    const auto type = part.at("type").get<std::string>();
    if (type == "video_url") {
      has_video = true;
      prompt_tokens += 258 * 10;
    } else if (type == "image_url") {
      prompt_tokens += 258;
      auto it = opt.frame_facts.find(part.at("image_url").at("url").get<std::string>());
      if (it != opt.frame_facts.end()) visible.insert(it->second.begin(), it->second.end());
    } else {
      const auto text = part.at("text").get<std::string>();
      prompt_tokens += static_cast<std::int64_t>(word_set(text).size());
      if (i + 1 < content.size()) {
        auto ws = word_set(text);
        visible.insert(ws.begin(), ws.end());
      }
    }
  }

  Json choice{{"index", 0}, {"finish_reason", "stop"}};
  std::string text;
  if (payload.value("logprobs", false)) {
    const std::string marker = "masked caption of the video: ";
    const auto pos = prompt.find(marker);
    const auto end = prompt.find(".\n\nTask", pos);
    const std::string masked =
        pos == std::string::npos ? "" : prompt.substr(pos + marker.size(), end - pos - marker.size());
    auto summary_words = word_set(prompt.substr(0, pos == std::string::npos ? 0 : pos));
    visible.insert(summary_words.begin(), summary_words.end());
    std::vector<std::string> answers;
    if (auto it = opt.answers.find(masked); it != opt.answers.end()) answers = it->second;
    Json tokens = Json::array();
    for (std::size_t i = 0; i < answers.size(); ++i) {
      const auto& kw = answers[i];
      const bool seen = has_video || visible.contains(kw);
      const double u = 2.0 * unit_hash(kw + "|" + masked, seed) - 1.0;
      const double p = std::min(0.95, (seen ? opt.p_hit : opt.p_miss) * std::exp(opt.jitter * u));
      const std::string lead = i ? " " : "";
      std::string emitted = seen ? lead + kw : lead + "thing";
      Json top = Json::array();
      if (seen) {
        top.push_back({{"token", lead + kw}, {"logprob", std::log(0.7 * p)}});
        std::string cap = kw;
        cap[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(cap[0])));
        top.push_back({{"token", lead + cap}, {"logprob", std::log(0.3 * p)}});
        tokens.push_back({{"token", emitted}, {"logprob", std::log(0.7 * p)}, {"top_logprobs", top}});
      } else {
        top.push_back({{"token", emitted}, {"logprob", std::log(0.5)}});
        top.push_back({{"token", lead + kw}, {"logprob", std::log(p)}});
        tokens.push_back({{"token", emitted}, {"logprob", std::log(0.5)}, {"top_logprobs", top}});
      }
      text += emitted;
    }
    choice["logprobs"] = {{"content", tokens}};
  } else if (prompt.find("Respond only with the letter") != std::string::npos) {
    const auto opos = prompt.find("Options: ");
    std::vector<std::string> options;
    std::istringstream lines{opos == std::string::npos ? "" : prompt.substr(opos + 9)};
    std::string line;
    while (std::getline(lines, line)) {
      if (line.size() > 3 && line[1] == '.') options.push_back(line.substr(3));
    }
    auto summary_words = word_set(prompt.substr(0, prompt.find("Respond only")));
    visible.insert(summary_words.begin(), summary_words.end());
    std::size_t pick = static_cast<std::size_t>(unit_hash(prompt, seed) * 1e6) %
                       std::max<std::size_t>(options.size(), 1);
    for (std::size_t i = 0; i < options.size(); ++i) {
      bool all = true;
      for (const auto& w : word_set(options[i])) {
        if (w != "a" && w != "the" && w != "on" && w != "in") all = all && visible.contains(w);
      }
      if (all && !has_video) pick = i;
      if (all && has_video && unit_hash(options[i], seed) < 0.5) pick = i;
    }
    const char letter = static_cast<char>('A' + pick);
    const double style = unit_hash("style|" + prompt, seed);
    if (style < 0.1) {
      text = std::string("The answer is ") + letter;
    } else if (style < 0.3) {
      text = std::string(" ") + static_cast<char>(std::tolower(letter)) + ". ";
    } else {
      text = std::string(1, letter);
    }
  } else {
    text = "ok";
  }
  choice["message"] = {{"role", "assistant"}, {"content", text}};
  return Json{{"id", "fake-" + fixture_key(payload).substr(0, 12)},
              {"object", "chat.completion"},
              {"model", payload.at("model")},
              {"choices", Json::array({choice})},
              {"usage", {{"prompt_tokens", prompt_tokens}, {"completion_tokens", 8}}}};
}

/// Transport answering through a callable; counts calls.
class FunctionTransport final : public Transport {
 public:
  using Fn = std::function<HttpResult(const Json&)>;
  explicit FunctionTransport(Fn fn) : fn_(std::move(fn)) {}
  HttpResult post(const Json& payload) const override {
    ++calls_;
    return fn_(payload);
  }
  int calls() const { return calls_.load(); }

 private:
  Fn fn_;
  mutable std::atomic<int> calls_{0};
};

inline std::shared_ptr<FunctionTransport> fake_chat_transport(FakeChatOptions opt = {}) {
  return std::make_shared<FunctionTransport>([opt](const Json& payload) {
    return HttpResult{200, fake_chat_body(payload, opt).dump()};
  });
}

}  // namespace visil::testing
