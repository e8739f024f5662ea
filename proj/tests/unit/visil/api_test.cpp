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

#include <cmath>

#include "support/fake_chat.hpp"
#include "visil/api.hpp"
#include "visil/prompts.hpp"

namespace visil {
namespace {

using testing::FunctionTransport;

ApiOptions opts(std::string model = "m") {
  ApiOptions o;
  o.model_id = std::move(model);
  o.backoff_base = std::chrono::milliseconds(0);
  return o;
}

Json ok_body(const std::string& content, Json logprobs = nullptr) {
  Json choice{{"index", 0}, {"finish_reason", "stop"},
              {"message", {{"role", "assistant"}, {"content", content}}}};
  if (!logprobs.is_null()) choice["logprobs"] = {{"content", logprobs}};
  return Json{{"choices", Json::array({choice})}, {"usage", {{"prompt_tokens", 42}}}};
}

TokenLogprob tok(std::string t, double lp, std::vector<std::pair<std::string, double>> top = {}) {
  return {std::move(t), lp, std::move(top)};
}

TEST(Payload, Shape) {
  auto transport = std::make_shared<FunctionTransport>([](const Json&) { return HttpResult{}; });
  auto o = opts();
  o.top_k = 5;
  o.temperature = 0.25;
  ApiBackend be(transport, o);
  VideoRef v;
  v.id = "v";
  v.video_path = "clip.mp4";
  MediaContext ctx{"v", {ImagePart{{"v", 1, "f.png"}}, TextPart{"sum"}, VideoPart{v}}};
  auto p = be.build_payload(ctx, "PROMPT", 9, true);
  EXPECT_EQ(p["model"], "m");
  EXPECT_EQ(p["seed"], 9);
  EXPECT_EQ(p["temperature"], 0.25);
  EXPECT_EQ(p["logprobs"], true);
  EXPECT_EQ(p["top_logprobs"], 5);
  const auto& content = p["messages"][0]["content"];
  ASSERT_EQ(content.size(), 4u);
  EXPECT_EQ(content[0]["image_url"]["url"], "f.png");
  EXPECT_EQ(content[1]["text"], "sum");
  EXPECT_EQ(content[2]["video_url"]["url"], "clip.mp4");
  EXPECT_EQ(content[3]["text"], "PROMPT");

  auto q = be.build_payload(ctx, "PROMPT", 9, false, false);
  EXPECT_FALSE(q.contains("logprobs"));
  EXPECT_EQ(q["messages"][0]["content"].size(), 3u);
}

TEST(Payload, ImageWithoutPathRejected) {
  auto transport = std::make_shared<FunctionTransport>([](const Json&) { return HttpResult{}; });
  ApiBackend be(transport, opts());
  MediaContext ctx{"v", {ImagePart{{"v", 1, ""}}}};
  EXPECT_THROW(be.build_payload(ctx, "p", 0, false), Error);
}

TEST(Response, Parse) {
  auto r = parse_chat_response(ok_body("hi", Json::array({{{"token", "hi"}, {"logprob", -0.5},
                                                            {"top_logprobs", Json::array({{{"token", "Hi"}, {"logprob", -1.0}}})}}})));
  EXPECT_EQ(r.content, "hi");
  EXPECT_EQ(r.prompt_tokens, 42);
  ASSERT_EQ(r.tokens.size(), 1u);
  EXPECT_EQ(r.tokens[0].top[0].first, "Hi");
  EXPECT_FALSE(r.refused());
  EXPECT_THROW(parse_chat_response(Json{{"choices", Json::array()}}), Error);
  Json refusal{{"choices", Json::array({{{"message", {{"refusal", "no"}}}}})}};
  EXPECT_TRUE(parse_chat_response(refusal).refused());
}

TEST(Readout, ExactWordsSumTheirTokens) {
  auto r = keyword_logprobs_from_tokens({tok("fris", -0.1), tok("bee", -0.2), tok(" park", -0.3)},
                                        {"frisbee", "park"}, 1e-6);
  EXPECT_NEAR(r.logprobs[0], -0.3, 1e-15);
  EXPECT_EQ(r.logprobs[1], -0.3);
  EXPECT_FALSE(r.empty_recovery);
}

TEST(Readout, AlternativesAndFloor) {
  const double a = std::log(0.2), b = std::log(0.1);
  auto r = keyword_logprobs_from_tokens(
      {tok("cat", -0.1, {{"cat", -0.1}, {"dog", a}, {" Dog", b}}), tok(" zz", -0.1)},
      {"dog", "park", "ball"}, 1e-6);
  EXPECT_NEAR(r.logprobs[0], std::log(0.3), 1e-12);
  EXPECT_EQ(r.logprobs[1], std::log(1e-6));
  EXPECT_EQ(r.logprobs[2], std::log(1e-6));
}

TEST(Readout, PunctuationAndCaseNormalized) {
  auto r = keyword_logprobs_from_tokens({tok("Dog", -0.5), tok(",", -0.01), tok(" park.", -0.2)},
                                        {"dog", "park"}, 1e-6);
  EXPECT_NEAR(r.logprobs[0], -0.51, 1e-12);
  EXPECT_EQ(r.logprobs[1], -0.2);
}

TEST(Readout, EmptyRecovery) {
  auto r = keyword_logprobs_from_tokens({}, {"dog"}, 1e-3);
  EXPECT_TRUE(r.empty_recovery);
  EXPECT_EQ(r.logprobs[0], std::log(1e-3));
}

TEST(Retries, TransientThenSuccess) {
  int n = 0;
  auto transport = std::make_shared<FunctionTransport>([&](const Json&) {
    ++n;
    if (n == 1) return HttpResult{429, "slow down"};
    if (n == 2) return HttpResult{503, ""};
    if (n == 3) return HttpResult{200, "not json"};
    return HttpResult{200, ok_body("fine").dump()};
  });
  ApiBackend be(transport, opts());
  auto res = be.generate_text(MediaContext{"v", {TextPart{"x"}}}, "p", 0, Task::kOther);
  EXPECT_EQ(res.text, "fine");
  EXPECT_EQ(res.usage.prompt_tokens, 42);
  EXPECT_EQ(transport->calls(), 4);
}

TEST(Retries, ExhaustedAndPermanent) {
  auto always = std::make_shared<FunctionTransport>([](const Json&) { return HttpResult{500, ""}; });
  auto o = opts();
  o.retries = 2;
  ApiBackend be(always, o);
  try {
    be.generate_text(MediaContext{"v", {TextPart{"x"}}}, "p", 0, Task::kOther);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBackendUnavailable);
  }
  EXPECT_EQ(always->calls(), 3);

  auto bad = std::make_shared<FunctionTransport>([](const Json&) { return HttpResult{401, "no"}; });
  ApiBackend be2(bad, o);
  EXPECT_THROW(be2.generate_text(MediaContext{"v", {TextPart{"x"}}}, "p", 0, Task::kOther), Error);
  EXPECT_EQ(bad->calls(), 1);
}

TEST(Retries, RefusalRetried) {
  int n = 0;
  auto transport = std::make_shared<FunctionTransport>([&](const Json&) {
    Json b = ok_body("");
    if (n++ == 0) b["choices"][0]["finish_reason"] = "content_filter";
    else b["choices"][0]["message"]["content"] = "ok";
    return HttpResult{200, b.dump()};
  });
  ApiBackend be(transport, opts());
  EXPECT_EQ(be.generate_text(MediaContext{"v", {TextPart{"x"}}}, "p", 0, Task::kOther).text, "ok");
}

TEST(Retries, BackoffDoubles) {
  auto always = std::make_shared<FunctionTransport>([](const Json&) { return HttpResult{500, ""}; });
  auto o = opts();
  o.retries = 3;
  o.backoff_base = std::chrono::milliseconds(20);
  ApiBackend be(always, o);
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_THROW(be.generate_text(MediaContext{"v", {TextPart{"x"}}}, "p", 0, Task::kOther), Error);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - t0).count();
  EXPECT_GE(ms, 20 + 40 + 80);
}

TEST(ScoreKeywords, PromptAndReadout) {
  Json seen;
  auto transport = std::make_shared<FunctionTransport>([&](const Json& p) {
    seen = p;
    Json lp = Json::array({{{"token", "dog"}, {"logprob", -0.2}, {"top_logprobs", Json::array()}},
                           {{"token", " park"}, {"logprob", -0.4}, {"top_logprobs", Json::array()}}});
    return HttpResult{200, ok_body("dog park", lp).dump()};
  });
  ApiBackend be(transport, opts());
  auto masked = build_masked_caption("A dog in a park", {"dog", "park"});
  MediaContext ctx{"v", {TextPart{"SUMMARY TEXT"}}};
  auto s = be.score_keywords(ctx, masked, 3);
  EXPECT_EQ(s.logprobs, (std::vector<double>{-0.2, -0.4}));
  EXPECT_EQ(s.usage.prompt_tokens, 42);
  const auto& content = seen["messages"][0]["content"];
  ASSERT_EQ(content.size(), 1u);
  const auto prompt = content[0]["text"].get<std::string>();
  EXPECT_EQ(prompt, visil_prompt(ScoreModality::kTextOnly, "SUMMARY TEXT", "A [MASK] in a [MASK]"));
  EXPECT_EQ(seen["seed"], 3);
}

TEST(FakeChat, IdentityThroughApiBackend) {
  auto transport = testing::fake_chat_transport();
  ApiBackend be(transport, opts());
  auto masked = build_masked_caption("A dog in a park", {"dog", "park"});
  MediaContext ctx{"v", {TextPart{"a dog"}}};
  auto a = be.score_keywords(ctx, masked, 1);
  auto b = be.score_keywords(ctx, masked, 1);
  EXPECT_EQ(a.logprobs, b.logprobs);
}

}  // namespace
}  // namespace visil
