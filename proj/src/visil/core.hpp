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

// Domain types shared by every module. All log-probabilities are natural
// logarithms (nats).

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "visil/error.hpp"

namespace visil {

using Json = nlohmann::json;

inline constexpr int kDefaultImageTokenCost = 258;
inline constexpr std::size_t kMaxKeyframes = 3;
inline constexpr std::size_t kMaxKeywords = 20;

/// A source video. Only the visual stream is modelled; frames are either
/// pre-extracted under `frame_dir` or resolved from `video_path` by an
/// external extractor.
struct VideoRef {
  std::string id;
  std::optional<std::string> frame_dir;
  std::optional<std::string> video_path;
  double fps = 30.0;
  double duration_s = 0.0;
  std::string dataset_tag;

  void validate() const;
  bool operator==(const VideoRef&) const = default;
};

struct FrameRef {
  std::string video_id;
  std::int64_t index = 0;
  std::string path;

  bool operator==(const FrameRef&) const = default;
};

enum class SummaryFormat { kTextOnly, kOneImage, kThreeImage, kFullVideo };

std::string_view format_name(SummaryFormat format);
SummaryFormat parse_format(std::string_view name);
std::size_t expected_keyframes(SummaryFormat format);

enum class Provenance { kGenerated, kManual };

struct SummaryRecord {
  std::string summary_id;
  std::string video_id;
  SummaryFormat format = SummaryFormat::kTextOnly;
  std::vector<FrameRef> keyframes;
  std::string text;
  std::int64_t token_cost = 0;
  Provenance provenance = Provenance::kGenerated;

  void validate() const;
  bool operator==(const SummaryRecord&) const = default;
};

struct TextPart {
  std::string text;
  bool operator==(const TextPart&) const = default;
};
struct ImagePart {
  FrameRef frame;
  bool operator==(const ImagePart&) const = default;
};
struct VideoPart {
  VideoRef video;
  bool operator==(const VideoPart&) const = default;
};

using ContentPart = std::variant<TextPart, ImagePart, VideoPart>;

/// Ordered multimodal input handed to a backend. `video_id` labels which
/// source video the context describes; it is never sent to a model.
struct MediaContext {
  std::string video_id;
  std::vector<ContentPart> parts;

  void validate() const;
  std::size_t image_count() const;
  bool has_video() const;
  std::string joined_text() const;
  bool operator==(const MediaContext&) const = default;
};

MediaContext video_context(const VideoRef& video);
MediaContext summary_context(const SummaryRecord& summary);
/// As above; a FullVideo summary additionally carries the video itself.
MediaContext summary_context(const SummaryRecord& summary, const VideoRef& video);

struct CaptionRecord {
  std::string video_id;
  std::string text;
  std::string generator_model;
  std::vector<std::string> keywords;

  void validate() const;
  bool operator==(const CaptionRecord&) const = default;
};

struct ScoreRecord {
  std::string video_id;
  std::string summary_id;
  std::string evaluator_model;
  int runs = 1;
  std::int64_t seed = 0;
  std::vector<std::string> keywords;
  std::vector<std::vector<double>> per_keyword_logp_video;
  std::vector<std::vector<double>> per_keyword_logp_summary;
  double logp_c_given_v = 0.0;
  double logp_c_given_s = 0.0;
  double visil = 0.0;
  int excluded_keywords = 0;
  // Runs (over both contexts) in which every slot fell to the floor.
  int floored_runs = 0;

  void validate() const;
  /// Per-keyword mean loss, for comparisons across videos with different
  /// keyword counts. The canonical score is `visil`.
  double visil_per_keyword() const;
  bool operator==(const ScoreRecord&) const = default;
};

/// Processing-load proxy. A backend-reported count always wins; otherwise
/// words of text plus a fixed budget per keyframe. FullVideo summaries need
/// either a reported count or `full_video_frames`.
std::int64_t estimate_token_cost(const SummaryRecord& summary,
                                 int image_token_cost = kDefaultImageTokenCost,
                                 std::optional<std::int64_t> reported = {},
                                 std::optional<std::int64_t> full_video_frames = {});

std::size_t word_count(std::string_view text);

// JSON conversions. Parsing is strict: unknown keys are rejected.
Json to_json(const VideoRef& v);
Json to_json(const FrameRef& f);
Json to_json(const SummaryRecord& s);
Json to_json(const CaptionRecord& c);
Json to_json(const ScoreRecord& r);
Json to_json(const MediaContext& ctx);

VideoRef video_from_json(const Json& j);
FrameRef frame_from_json(const Json& j);
SummaryRecord summary_from_json(const Json& j);
CaptionRecord caption_from_json(const Json& j);
ScoreRecord score_from_json(const Json& j);

std::string serialize_records(const std::vector<ScoreRecord>& records);
std::vector<ScoreRecord> parse_records(std::string_view text);

std::vector<VideoRef> parse_manifest(std::string_view text);

/// Splits line-delimited JSON and applies `fn` to each non-empty line. Any
/// failure is rethrown as ParseError carrying the 1-based line number.
template <typename Fn>
void for_each_jsonl(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    try {
      fn(Json::parse(line));
    } catch (const std::exception& e) {
      fail(ErrorCode::kParseError,
           "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

template <typename T, typename Conv>
std::vector<T> parse_jsonl(std::string_view text, Conv&& conv) {
  std::vector<T> out;
  for_each_jsonl(text, [&](const Json& j) { out.push_back(conv(j)); });
  return out;
}

template <typename T>
std::string to_jsonl(const std::vector<T>& items) {
  std::string out;
  for (const auto& item : items) {
    out += to_json(item).dump();
    out += '\n';
  }
  return out;
}

}  // namespace visil
