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

#include "visil/prompts.hpp"
#include "visil/scoring.hpp"
#include "visil/synthetic.hpp"

namespace visil {
namespace {

VideoRef toy_video(const std::string& id) {
  VideoRef v;
  v.id = id;
  v.video_path = id + ".mp4";
  v.duration_s = 4;
  return v;
}

TEST(ToyWorld, Validation) {
  EXPECT_NO_THROW(ToyWorld{}.validate());
  EXPECT_THROW((ToyWorld{10, 0.1, 0.9, 0}.validate()), Error);
  EXPECT_THROW((ToyWorld{0, 0.9, 0.1, 0}.validate()), Error);
  EXPECT_THROW((ToyWorld{10, 0.9, 0.0, 0}.validate()), Error);
  EXPECT_THROW(world_from_json(Json{{"bogus", 1}}), Error);
  auto w = world_from_json(Json{{"p_hit", 0.8}, {"seed", 4}});
  EXPECT_EQ(w.p_hit, 0.8);
  EXPECT_EQ(w.seed, 4);
  EXPECT_EQ(w.facts_per_video, 10);
}

TEST(SyntheticBackend, GeneratedFactsDependOnIdAndSeed) {
  SyntheticBackend a(ToyWorld{5, 0.9, 0.1, 1});
  SyntheticBackend b(ToyWorld{5, 0.9, 0.1, 2});
  EXPECT_EQ(a.facts_for("v").size(), 5u);
  EXPECT_EQ(a.facts_for("v"), a.facts_for("v"));
  EXPECT_NE(a.facts_for("v"), a.facts_for("w"));
  EXPECT_NE(a.facts_for("v"), b.facts_for("v"));
  a.add_video("v", {"x", "y"});
  EXPECT_EQ(a.facts_for("v"), (std::vector<std::string>{"x", "y"}));
}

TEST(SyntheticBackend, ScoresAreHitOrMiss) {
  const ToyWorld w{4, 0.9, 0.1, 0};
  SyntheticBackend be(w);
  be.add_video("v", {"dog", "park", "ball", "kite"});
  auto masked = build_masked_caption("dog park ball kite", {"dog", "park", "ball", "kite"});
  MediaContext ctx{"v", {TextPart{"A dog in the park."}}};
  auto s = be.score_keywords(ctx, masked, 0);
  ASSERT_EQ(s.logprobs.size(), 4u);
  EXPECT_EQ(s.logprobs[0], std::log(0.9));
  EXPECT_EQ(s.logprobs[1], std::log(0.9));
  EXPECT_EQ(s.logprobs[2], std::log(0.1));
  EXPECT_EQ(s.logprobs[3], std::log(0.1));

  be.add_frame_facts({"v", 30, "f.png"}, {"ball"});
  ctx.parts.insert(ctx.parts.begin(), ImagePart{{"v", 30, "f.png"}});
  s = be.score_keywords(ctx, masked, 0);
  EXPECT_EQ(s.logprobs[2], std::log(0.9));

  auto video = be.score_keywords(video_context(toy_video("v")), masked, 0);
  for (double lp : video.logprobs) EXPECT_EQ(lp, std::log(0.9));
}

TEST(SyntheticBackend, UnknownFact) {
  SyntheticBackend be(ToyWorld{});
  be.add_video("v", {"dog"});
  auto masked = build_masked_caption("a zebra", {"zebra"});
  try {
    be.score_keywords(MediaContext{"v", {TextPart{"x"}}}, masked, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownFact);
  }
  be.add_vocabulary({"zebra"});
  EXPECT_NO_THROW(be.score_keywords(MediaContext{"v", {TextPart{"x"}}}, masked, 0));
}

// Closed form: visil = (#keywords missing from the summary) * ln(p_hit / p_miss).
TEST(SyntheticBackend, ClosedFormOverCoverage) {
  const ToyWorld w{10, 0.9, 0.1, 3};
  SyntheticBackend be(w);
  const auto vid = toy_video("toy");
  const auto facts = be.facts_for("toy");
  std::string caption;
  for (const auto& f : facts) caption += f + " ";
  const auto masked = build_masked_caption(caption, facts);
  ScoringConfig cfg;
  cfg.runs = 2;
  double prev = INFINITY;
  for (int m = 0; m <= 10; ++m) {
    std::string text = "summary";
    for (int i = 0; i < m; ++i) text += " " + facts[i];
    auto rec = visil_score(be, video_context(vid), MediaContext{"toy", {TextPart{text}}}, masked, cfg);
    EXPECT_NEAR(rec.visil, (10 - m) * std::log(9.0), 1e-9);
    EXPECT_LT(rec.visil, prev);
    prev = rec.visil;
  }
}

TEST(SyntheticBackend, TextTasks) {
  SyntheticBackend be(ToyWorld{4, 0.9, 0.1, 0});
  be.add_video("v", {"dog", "park", "ball", "kite"});
  const auto v = toy_video("v");
  EXPECT_EQ(be.generate_text(video_context(v), "", 0, Task::kCaption).text, "dog park ball kite");
  MediaContext cap{"v", {TextPart{"The dog and the Dog at the park"}}};
  EXPECT_EQ(be.generate_text(cap, "", 0, Task::kKeywords).text, R"(["dog","park"])");
  auto kf = Json::parse(be.generate_text(video_context(v), "", 0, Task::kKeyframes).text);
  EXPECT_EQ(kf.size(), 3u);
  EXPECT_EQ(kf[1]["timestamp"], "00:00:02:00");
  auto prompt = vqa_prompt(SummaryFormat::kFullVideo, "", "Which is seen: ball?", {"kite", "ball"});
  EXPECT_EQ(be.generate_text(video_context(v), prompt, 0, Task::kVqa).text.size(), 1u);
  auto usage = be.generate_text(video_context(v), "", 0, Task::kCaption).usage;
  EXPECT_EQ(usage.prompt_tokens, 4 * 258);
}

}  // namespace
}  // namespace visil
