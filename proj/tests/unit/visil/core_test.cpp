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

#include "visil/core.hpp"

namespace visil {
namespace {

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kOk;
}

VideoRef video(const std::string& id = "v") {
  VideoRef v;
  v.id = id;
  v.video_path = "media/" + id + ".mp4";
  v.frame_dir = "frames/" + id;
  v.fps = 25;
  v.duration_s = 12.5;
  v.dataset_tag = "t";
  return v;
}

SummaryRecord summary(SummaryFormat f, std::size_t frames, const std::string& text = "a b c") {
  SummaryRecord s;
  s.summary_id = "v/x";
  s.video_id = "v";
  s.format = f;
  s.text = text;
  for (std::size_t i = 0; i < frames; ++i) {
    s.keyframes.push_back({"v", static_cast<std::int64_t>(i * 10), "f" + std::to_string(i) + ".png"});
  }
  return s;
}

TEST(VideoRef, Validation) {
  EXPECT_NO_THROW(video().validate());
  auto v = video();
  v.frame_dir.reset();
  v.video_path.reset();
  EXPECT_EQ(code_of([&] { v.validate(); }), ErrorCode::kInvalidArgument);
  v = video();
  v.fps = 0;
  EXPECT_EQ(code_of([&] { v.validate(); }), ErrorCode::kInvalidArgument);
  v = video();
  v.id.clear();
  EXPECT_EQ(code_of([&] { v.validate(); }), ErrorCode::kInvalidArgument);
}

TEST(SummaryRecord, KeyframeCountMatchesFormat) {
  EXPECT_NO_THROW(summary(SummaryFormat::kTextOnly, 0).validate());
  EXPECT_NO_THROW(summary(SummaryFormat::kOneImage, 1).validate());
  EXPECT_NO_THROW(summary(SummaryFormat::kThreeImage, 3).validate());
  EXPECT_NO_THROW(summary(SummaryFormat::kFullVideo, 0, "").validate());
  EXPECT_THROW(summary(SummaryFormat::kThreeImage, 2).validate(), Error);
  EXPECT_THROW(summary(SummaryFormat::kOneImage, 0).validate(), Error);
  EXPECT_THROW(summary(SummaryFormat::kTextOnly, 0, "").validate(), Error);
  auto s = summary(SummaryFormat::kThreeImage, 3);
  s.keyframes.push_back(s.keyframes[0]);
  EXPECT_THROW(s.validate(), Error);
}

TEST(Format, NamesRoundTrip) {
  for (auto f : {SummaryFormat::kTextOnly, SummaryFormat::kOneImage, SummaryFormat::kThreeImage,
                 SummaryFormat::kFullVideo}) {
    EXPECT_EQ(parse_format(format_name(f)), f);
  }
  EXPECT_EQ(code_of([] { parse_format("two_image"); }), ErrorCode::kParseError);
}

TEST(MediaContext, SummaryContextOrderAndVideo) {
  auto s = summary(SummaryFormat::kThreeImage, 3, "text");
  auto ctx = summary_context(s);
  ASSERT_EQ(ctx.parts.size(), 4u);
  EXPECT_TRUE(std::holds_alternative<ImagePart>(ctx.parts[0]));
  EXPECT_TRUE(std::holds_alternative<TextPart>(ctx.parts[3]));
  EXPECT_EQ(ctx.image_count(), 3u);
  EXPECT_FALSE(ctx.has_video());
  EXPECT_EQ(ctx.joined_text(), "text");

  auto full = summary(SummaryFormat::kFullVideo, 0, "");
  auto fctx = summary_context(full, video());
  ASSERT_EQ(fctx.parts.size(), 1u);
  EXPECT_TRUE(fctx.has_video());
  EXPECT_EQ(code_of([&] { summary_context(full, video("w")); }), ErrorCode::kIdentityMismatch);
  EXPECT_THROW(MediaContext{}.validate(), Error);
}

TEST(TokenCost, WordsPlusImages) {
  EXPECT_EQ(estimate_token_cost(summary(SummaryFormat::kTextOnly, 0, "one two  three\nfour")), 4);
  EXPECT_EQ(estimate_token_cost(summary(SummaryFormat::kThreeImage, 3, "a b")), 2 + 3 * 258);
  EXPECT_EQ(estimate_token_cost(summary(SummaryFormat::kOneImage, 1, "a"), 100), 101);
  EXPECT_EQ(estimate_token_cost(summary(SummaryFormat::kOneImage, 1, "a"), 258, 999), 999);
  auto full = summary(SummaryFormat::kFullVideo, 0, "");
  EXPECT_EQ(code_of([&] { estimate_token_cost(full); }), ErrorCode::kCostUnavailable);
  EXPECT_EQ(estimate_token_cost(full, 258, std::nullopt, 10), 2580);
  EXPECT_THROW(estimate_token_cost(full, 0), Error);
  EXPECT_THROW(estimate_token_cost(full, 258, -1), Error);
}

TEST(WordCount, Whitespace) {
  EXPECT_EQ(word_count(""), 0u);
  EXPECT_EQ(word_count("   "), 0u);
  EXPECT_EQ(word_count(" a\tb\n c "), 3u);
}

TEST(Caption, Validation) {
  CaptionRecord c{"v", "A dog.", "m", {"dog"}};
  EXPECT_NO_THROW(c.validate());
  c.keywords = {"Dog"};
  EXPECT_THROW(c.validate(), Error);
  c.keywords = {"dog", "dog"};
  EXPECT_THROW(c.validate(), Error);
  c.keywords = {"video"};
  EXPECT_THROW(c.validate(), Error);
  c.keywords.assign(21, "x");
  EXPECT_THROW(c.validate(), Error);
}

ScoreRecord score() {
  ScoreRecord r;
  r.video_id = "v";
  r.summary_id = "v/x";
  r.evaluator_model = "e";
  r.runs = 2;
  r.seed = 3;
  r.keywords = {"a", "b"};
  r.per_keyword_logp_video = {{-0.1, -0.2}, {-0.1, -0.2}};
  r.per_keyword_logp_summary = {{-1.0, -2.0}, {-1.0, -2.0}};
  r.logp_c_given_v = -0.30000000000000004;
  r.logp_c_given_s = -3.0;
  r.visil = r.logp_c_given_v - r.logp_c_given_s;
  return r;
}

TEST(ScoreRecord, ValidationAndRoundTrip) {
  auto r = score();
  EXPECT_NO_THROW(r.validate());
  EXPECT_DOUBLE_EQ(r.visil_per_keyword(), r.visil / 2);
  auto back = score_from_json(Json::parse(to_json(r).dump()));
  EXPECT_EQ(back, r);
  auto text = serialize_records({r, r});
  EXPECT_EQ(parse_records(text), (std::vector<ScoreRecord>{r, r}));

  auto bad = r;
  bad.visil += 1e-9;
  EXPECT_THROW(bad.validate(), Error);
  bad = r;
  bad.per_keyword_logp_video.pop_back();
  EXPECT_THROW(bad.validate(), Error);
  bad = r;
  bad.per_keyword_logp_summary[0][0] = 0.5;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Json, RecordsRoundTrip) {
  auto v = video();
  EXPECT_EQ(video_from_json(to_json(v)), v);
  auto s = summary(SummaryFormat::kThreeImage, 3);
  s.provenance = Provenance::kManual;
  s.token_cost = 777;
  EXPECT_EQ(summary_from_json(to_json(s)), s);
  CaptionRecord c{"v", "A dog.", "m", {"dog"}};
  EXPECT_EQ(caption_from_json(to_json(c)), c);
}

TEST(Json, Manifest) {
  auto vs = parse_manifest(R"([{"id": "a", "video_path": "a.mp4", "fps": 24, "duration_s": 3}])");
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_EQ(vs[0].fps, 24);
  EXPECT_EQ(code_of([] { parse_manifest("{}"); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([] {
              parse_manifest(R"([{"id": "a", "video_path": "a"}, {"id": "a", "video_path": "b"}])");
            }),
            ErrorCode::kParseError);
}

TEST(Jsonl, BlankLinesSkippedAndErrorsCarryLineNumbers) {
  std::vector<int> seen;
  for_each_jsonl("1\n\n2\r\n", [&](const Json& j) { seen.push_back(j.get<int>()); });
  EXPECT_EQ(seen, (std::vector<int>{1, 2}));
  try {
    for_each_jsonl("1\n{bad\n", [](const Json&) {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(ErrorNames, Stable) {
  EXPECT_EQ(error_name(ErrorCode::kUsage), "UsageError");
  EXPECT_EQ(error_name(ErrorCode::kEvaluatorMismatch), "EvaluatorMismatch");
  EXPECT_EQ(error_name(ErrorCode::kFixtureMiss), "FixtureMiss");
}

}  // namespace
}  // namespace visil
