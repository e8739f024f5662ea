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

#include "visil/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <initializer_list>
#include <set>

namespace visil {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOk: return "Ok";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kUsage: return "UsageError";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kCostUnavailable: return "CostUnavailable";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kEmptyRecovery: return "EmptyRecovery";
    case ErrorCode::kUnknownFact: return "UnknownFact";
    case ErrorCode::kFixtureMiss: return "FixtureMiss";
    case ErrorCode::kKeywordParseError: return "KeywordParseError";
    case ErrorCode::kNothingToMask: return "NothingToMask";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kIdentityMismatch: return "IdentityMismatch";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kEvaluatorMismatch: return "EvaluatorMismatch";
    case ErrorCode::kCaptionUnavailable: return "CaptionUnavailable";
    case ErrorCode::kInvalidFrameField: return "InvalidFrameField";
    case ErrorCode::kTimecodeParseError: return "TimecodeParseError";
    case ErrorCode::kKeyframeParseError: return "KeyframeParseError";
    case ErrorCode::kDistractorShortfall: return "DistractorShortfall";
    case ErrorCode::kRoleViolation: return "RoleViolation";
    case ErrorCode::kInternal: return "InternalError";
  }
  return "Unknown";
}

namespace {

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                std::string_view type) {
  if (!j.is_object()) {
    fail(ErrorCode::kParseError, std::string(type) + ": expected a JSON object");
  }
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(ErrorCode::kParseError,
           std::string(type) + ": unknown field '" + key + "'");
    }
  }
}

template <typename T>
T required(const Json& j, const char* key, std::string_view type) {
  auto it = j.find(key);
  if (it == j.end()) {
    fail(ErrorCode::kParseError,
         std::string(type) + ": missing field '" + key + "'");
  }
  try {
    return it->get<T>();
  } catch (const Json::exception&) {
    fail(ErrorCode::kParseError,
         std::string(type) + ": field '" + key + "' has the wrong type");
  }
}

std::optional<std::string> optional_string(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    fail(ErrorCode::kParseError, std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

// ---------------------------------------------------------------------------
// Validation

void VideoRef::validate() const {
  if (id.empty()) fail(ErrorCode::kInvalidArgument, "video id is empty");
  if (!frame_dir && !video_path) {
    fail(ErrorCode::kInvalidArgument,
         "video '" + id + "' needs frame_dir or video_path");
  }
  if (!(fps > 0.0) || !std::isfinite(fps)) {
    fail(ErrorCode::kInvalidArgument, "video '" + id + "' fps must be positive");
  }
  if (!(duration_s >= 0.0) || !std::isfinite(duration_s)) {
    fail(ErrorCode::kInvalidArgument,
         "video '" + id + "' duration must be non-negative");
  }
}

std::string_view format_name(SummaryFormat format) {
  switch (format) {
    case SummaryFormat::kTextOnly: return "text_only";
    case SummaryFormat::kOneImage: return "one_image";
    case SummaryFormat::kThreeImage: return "three_image";
    case SummaryFormat::kFullVideo: return "full_video";
  }
  return "unknown";
}

SummaryFormat parse_format(std::string_view name) {
  for (auto f : {SummaryFormat::kTextOnly, SummaryFormat::kOneImage,
                 SummaryFormat::kThreeImage, SummaryFormat::kFullVideo}) {
    if (format_name(f) == name) return f;
  }
  fail(ErrorCode::kParseError, "unknown summary format '" + std::string(name) + "'");
}

std::size_t expected_keyframes(SummaryFormat format) {
  switch (format) {
    case SummaryFormat::kOneImage: return 1;
    case SummaryFormat::kThreeImage: return 3;
    default: return 0;
  }
}

void SummaryRecord::validate() const {
  if (summary_id.empty() || video_id.empty()) {
    fail(ErrorCode::kInvalidArgument, "summary needs summary_id and video_id");
  }
  if (keyframes.size() > kMaxKeyframes) {
    fail(ErrorCode::kInvalidArgument,
         "summary '" + summary_id + "' has more than 3 keyframes");
  }
  if (keyframes.size() != expected_keyframes(format)) {
    fail(ErrorCode::kInvalidArgument,
         "summary '" + summary_id + "' keyframe count does not match format " +
             std::string(format_name(format)));
  }
  if (format != SummaryFormat::kFullVideo && text.empty()) {
    fail(ErrorCode::kInvalidArgument, "summary '" + summary_id + "' has empty text");
  }
  if (token_cost < 0) {
    fail(ErrorCode::kInvalidArgument, "summary '" + summary_id + "' has negative token cost");
  }
}

void MediaContext::validate() const {
  if (parts.empty()) fail(ErrorCode::kInvalidArgument, "media context is empty");
}

std::size_t MediaContext::image_count() const {
  return static_cast<std::size_t>(std::count_if(parts.begin(), parts.end(), [](const auto& p) {
    return std::holds_alternative<ImagePart>(p);
  }));
}

bool MediaContext::has_video() const {
  return std::any_of(parts.begin(), parts.end(),
                     [](const auto& p) { return std::holds_alternative<VideoPart>(p); });
}

std::string MediaContext::joined_text() const {
  std::string out;
  for (const auto& p : parts) {
    if (const auto* t = std::get_if<TextPart>(&p)) {
      if (!out.empty()) out += ' ';
      out += t->text;
    }
  }
  return out;
}

MediaContext video_context(const VideoRef& video) {
  return MediaContext{video.id, {VideoPart{video}}};
}

MediaContext summary_context(const SummaryRecord& summary) {
  MediaContext ctx{summary.video_id, {}};
  for (const auto& f : summary.keyframes) ctx.parts.emplace_back(ImagePart{f});
  if (!summary.text.empty()) ctx.parts.emplace_back(TextPart{summary.text});
  return ctx;
}

MediaContext summary_context(const SummaryRecord& summary, const VideoRef& video) {
  if (summary.video_id != video.id) {
    fail(ErrorCode::kIdentityMismatch,
         "summary '" + summary.summary_id + "' belongs to '" + summary.video_id + "', not '" +
             video.id + "'");
  }
  MediaContext ctx = summary_context(summary);
  if (summary.format == SummaryFormat::kFullVideo) ctx.parts.emplace_back(VideoPart{video});
  return ctx;
}

void CaptionRecord::validate() const {
  if (video_id.empty()) fail(ErrorCode::kInvalidArgument, "caption has no video id");
  if (keywords.size() > kMaxKeywords) {
    fail(ErrorCode::kInvalidArgument, "caption has more than 20 keywords");
  }
  std::set<std::string> seen;
  for (const auto& k : keywords) {
    if (k.empty() || k == "video" ||
        std::any_of(k.begin(), k.end(), [](char c) {
          return is_space(c) || std::isupper(static_cast<unsigned char>(c));
        })) {
      fail(ErrorCode::kInvalidArgument, "invalid caption keyword '" + k + "'");
    }
    if (!seen.insert(k).second) {
      fail(ErrorCode::kInvalidArgument, "duplicate caption keyword '" + k + "'");
    }
  }
}

void ScoreRecord::validate() const {
  if (runs < 1) fail(ErrorCode::kInvalidArgument, "score record runs must be >= 1");
  auto check_matrix = [&](const std::vector<std::vector<double>>& m, const char* name) {
    if (m.size() != static_cast<std::size_t>(runs)) {
      fail(ErrorCode::kInvalidArgument, std::string(name) + " must have one row per run");
    }
    for (const auto& row : m) {
      if (row.size() != keywords.size()) {
        fail(ErrorCode::kInvalidArgument,
             std::string(name) + " must have one column per keyword");
      }
      for (double v : row) {
        if (!std::isfinite(v) || v > 0.0) {
          fail(ErrorCode::kInvalidArgument,
               std::string(name) + " entries must be finite log-probabilities <= 0");
        }
      }
    }
  };
  check_matrix(per_keyword_logp_video, "per_keyword_logp_video");
  check_matrix(per_keyword_logp_summary, "per_keyword_logp_summary");
  for (double v : {logp_c_given_v, logp_c_given_s}) {
    if (!std::isfinite(v) || v > 0.0) {
      fail(ErrorCode::kInvalidArgument, "caption log-probabilities must be finite and <= 0");
    }
  }
  if (visil != logp_c_given_v - logp_c_given_s) {
    fail(ErrorCode::kInvalidArgument, "visil must equal logp_c_given_v - logp_c_given_s");
  }
  if (excluded_keywords < 0 || floored_runs < 0) {
    fail(ErrorCode::kInvalidArgument, "counts must be non-negative");
  }
}

double ScoreRecord::visil_per_keyword() const {
  return keywords.empty() ? 0.0 : visil / static_cast<double>(keywords.size());
}

// ---------------------------------------------------------------------------
// Token cost

std::size_t word_count(std::string_view text) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : text) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++n;
    }
  }
  return n;
}

std::int64_t estimate_token_cost(const SummaryRecord& summary, int image_token_cost,
                                 std::optional<std::int64_t> reported,
                                 std::optional<std::int64_t> full_video_frames) {
  if (image_token_cost <= 0) {
    fail(ErrorCode::kInvalidArgument, "image_token_cost must be positive");
  }
  if (reported) {
    if (*reported < 0) fail(ErrorCode::kInvalidArgument, "reported token count is negative");
    return *reported;
  }
  if (summary.format == SummaryFormat::kFullVideo) {
    if (!full_video_frames) {
      fail(ErrorCode::kCostUnavailable,
           "full-video summary '" + summary.summary_id +
               "' has no reported token count and no frame inventory");
    }
    return static_cast<std::int64_t>(word_count(summary.text)) +
           *full_video_frames * image_token_cost;
  }
  return static_cast<std::int64_t>(word_count(summary.text)) +
         static_cast<std::int64_t>(summary.keyframes.size()) * image_token_cost;
}

// ---------------------------------------------------------------------------
// JSON

Json to_json(const VideoRef& v) {
  Json j{{"id", v.id}, {"fps", v.fps}, {"duration_s", v.duration_s},
         {"dataset_tag", v.dataset_tag}};
  if (v.frame_dir) j["frame_dir"] = *v.frame_dir;
  if (v.video_path) j["video_path"] = *v.video_path;
  return j;
}

VideoRef video_from_json(const Json& j) {
  check_keys(j, {"id", "frame_dir", "video_path", "fps", "duration_s", "dataset_tag"},
             "VideoRef");
  VideoRef v;
  v.id = required<std::string>(j, "id", "VideoRef");
  v.frame_dir = optional_string(j, "frame_dir");
  v.video_path = optional_string(j, "video_path");
  v.fps = required<double>(j, "fps", "VideoRef");
  v.duration_s = j.contains("duration_s") ? required<double>(j, "duration_s", "VideoRef") : 0.0;
  v.dataset_tag = optional_string(j, "dataset_tag").value_or("");
  try {
    v.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kParseError, e.what());
  }
  return v;
}

Json to_json(const FrameRef& f) {
  return Json{{"video_id", f.video_id}, {"index", f.index}, {"path", f.path}};
}

FrameRef frame_from_json(const Json& j) {
  check_keys(j, {"video_id", "index", "path"}, "FrameRef");
  return FrameRef{required<std::string>(j, "video_id", "FrameRef"),
                  required<std::int64_t>(j, "index", "FrameRef"),
                  optional_string(j, "path").value_or("")};
}

Json to_json(const SummaryRecord& s) {
  Json frames = Json::array();
  for (const auto& f : s.keyframes) frames.push_back(to_json(f));
  return Json{{"summary_id", s.summary_id},
              {"video_id", s.video_id},
              {"format", format_name(s.format)},
              {"keyframes", std::move(frames)},
              {"text", s.text},
              {"token_cost", s.token_cost},
              {"provenance", s.provenance == Provenance::kManual ? "manual" : "generated"}};
}

SummaryRecord summary_from_json(const Json& j) {
  constexpr std::string_view kType = "SummaryRecord";
  check_keys(j, {"summary_id", "video_id", "format", "keyframes", "text", "token_cost",
                 "provenance"},
             kType);
  SummaryRecord s;
  s.summary_id = required<std::string>(j, "summary_id", kType);
  s.video_id = required<std::string>(j, "video_id", kType);
  s.format = parse_format(required<std::string>(j, "format", kType));
  if (auto it = j.find("keyframes"); it != j.end()) {
    if (!it->is_array()) fail(ErrorCode::kParseError, "keyframes must be an array");
    for (const auto& f : *it) s.keyframes.push_back(frame_from_json(f));
  }
  s.text = optional_string(j, "text").value_or("");
  s.token_cost = j.contains("token_cost") ? required<std::int64_t>(j, "token_cost", kType) : 0;
  auto prov = optional_string(j, "provenance").value_or("generated");
  if (prov == "manual") {
    s.provenance = Provenance::kManual;
  } else if (prov == "generated") {
    s.provenance = Provenance::kGenerated;
  } else {
    fail(ErrorCode::kParseError, "unknown provenance '" + prov + "'");
  }
  try {
    s.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kParseError, e.what());
  }
  return s;
}

Json to_json(const CaptionRecord& c) {
  return Json{{"video_id", c.video_id},
              {"text", c.text},
              {"generator_model", c.generator_model},
              {"keywords", c.keywords}};
}

CaptionRecord caption_from_json(const Json& j) {
  constexpr std::string_view kType = "CaptionRecord";
  check_keys(j, {"video_id", "text", "generator_model", "keywords"}, kType);
  CaptionRecord c{required<std::string>(j, "video_id", kType),
                  required<std::string>(j, "text", kType),
                  optional_string(j, "generator_model").value_or(""),
                  required<std::vector<std::string>>(j, "keywords", kType)};
  try {
    c.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kParseError, e.what());
  }
  return c;
}

Json to_json(const ScoreRecord& r) {
  return Json{{"video_id", r.video_id},
              {"summary_id", r.summary_id},
              {"evaluator_model", r.evaluator_model},
              {"runs", r.runs},
              {"seed", r.seed},
              {"keywords", r.keywords},
              {"per_keyword_logp_video", r.per_keyword_logp_video},
              {"per_keyword_logp_summary", r.per_keyword_logp_summary},
              {"logp_c_given_v", r.logp_c_given_v},
              {"logp_c_given_s", r.logp_c_given_s},
              {"visil", r.visil},
              {"excluded_keywords", r.excluded_keywords},
              {"floored_runs", r.floored_runs}};
}

ScoreRecord score_from_json(const Json& j) {
  constexpr std::string_view kType = "ScoreRecord";
  check_keys(j, {"video_id", "summary_id", "evaluator_model", "runs", "seed", "keywords",
                 "per_keyword_logp_video", "per_keyword_logp_summary", "logp_c_given_v",
                 "logp_c_given_s", "visil", "excluded_keywords", "floored_runs"},
             kType);
  using Matrix = std::vector<std::vector<double>>;
  ScoreRecord r;
  r.video_id = required<std::string>(j, "video_id", kType);
  r.summary_id = required<std::string>(j, "summary_id", kType);
  r.evaluator_model = required<std::string>(j, "evaluator_model", kType);
  r.runs = required<int>(j, "runs", kType);
  r.seed = required<std::int64_t>(j, "seed", kType);
  r.keywords = required<std::vector<std::string>>(j, "keywords", kType);
  r.per_keyword_logp_video = required<Matrix>(j, "per_keyword_logp_video", kType);
  r.per_keyword_logp_summary = required<Matrix>(j, "per_keyword_logp_summary", kType);
  r.logp_c_given_v = required<double>(j, "logp_c_given_v", kType);
  r.logp_c_given_s = required<double>(j, "logp_c_given_s", kType);
  r.visil = required<double>(j, "visil", kType);
  r.excluded_keywords = required<int>(j, "excluded_keywords", kType);
  r.floored_runs = j.contains("floored_runs") ? required<int>(j, "floored_runs", kType) : 0;
  try {
    r.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kParseError, e.what());
  }
  return r;
}

Json to_json(const MediaContext& ctx) {
  Json parts = Json::array();
  for (const auto& p : ctx.parts) {
    std::visit(
        [&](const auto& part) {
          using T = std::decay_t<decltype(part)>;
          if constexpr (std::is_same_v<T, TextPart>) {
            parts.push_back({{"text", part.text}});
          } else if constexpr (std::is_same_v<T, ImagePart>) {
            parts.push_back({{"image", to_json(part.frame)}});
          } else {
            parts.push_back({{"video", to_json(part.video)}});
          }
        },
        p);
  }
  return Json{{"video_id", ctx.video_id}, {"parts", std::move(parts)}};
}

std::string serialize_records(const std::vector<ScoreRecord>& records) {
  return to_jsonl(records);
}

std::vector<ScoreRecord> parse_records(std::string_view text) {
  return parse_jsonl<ScoreRecord>(text, score_from_json);
}

std::vector<VideoRef> parse_manifest(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    fail(ErrorCode::kParseError, std::string("manifest: ") + e.what());
  }
  if (!j.is_array()) fail(ErrorCode::kParseError, "manifest must be a JSON array");
  std::vector<VideoRef> out;
  std::set<std::string> ids;
  for (const auto& item : j) {
    out.push_back(video_from_json(item));
    if (!ids.insert(out.back().id).second) {
      fail(ErrorCode::kParseError, "manifest: duplicate video id '" + out.back().id + "'");
    }
  }
  return out;
}

}  // namespace visil
