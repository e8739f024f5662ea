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

#include "visil/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <tuple>

#include "visil/masking.hpp"
#include "visil/prompts.hpp"
#include "visil/rng.hpp"

namespace visil {
namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

// Lowercased alphanumeric runs.
std::vector<std::string> alnum_words(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                std::string_view what) {
  if (!j.is_object()) fail(ErrorCode::kParseError, std::string(what) + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(ErrorCode::kParseError, std::string(what) + ": unknown field '" + key + "'");
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Timecodes

Timecode parse_timecode_fields(std::string_view tc) {
  if (tc.size() != 11 || tc[2] != ':' || tc[5] != ':' || tc[8] != ':') {
    fail(ErrorCode::kTimecodeParseError, "timecode '" + std::string(tc) + "' is not HH:MM:SS:FF");
  }
  int f[4];
  for (int i = 0; i < 4; ++i) {
    const char a = tc[static_cast<std::size_t>(3 * i)];
    const char b = tc[static_cast<std::size_t>(3 * i + 1)];
    if (!is_digit(a) || !is_digit(b)) {
      fail(ErrorCode::kTimecodeParseError,
           "timecode '" + std::string(tc) + "' has a non-digit field");
    }
    f[i] = (a - '0') * 10 + (b - '0');
  }
  if (f[1] >= 60 || f[2] >= 60) {
    fail(ErrorCode::kTimecodeParseError,
         "timecode '" + std::string(tc) + "' has minutes or seconds >= 60");
  }
  return Timecode{f[0], f[1], f[2], f[3]};
}

std::int64_t parse_timecode(std::string_view tc, double fps) {
  if (!(fps > 0.0) || !std::isfinite(fps)) fail(ErrorCode::kInvalidArgument, "fps must be positive");
  const Timecode t = parse_timecode_fields(tc);
  if (t.frames >= static_cast<int>(std::ceil(fps))) {
    fail(ErrorCode::kInvalidFrameField, "frame field " + std::to_string(t.frames) +
                                            " is not below the frame rate in '" +
                                            std::string(tc) + "'");
  }
  const double secs = 3600.0 * t.hours + 60.0 * t.minutes + t.seconds;
  return std::llround(fps * secs) + t.frames;
}

// ---------------------------------------------------------------------------
// Frames

std::string frame_file_name(std::int64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%06lld.png", static_cast<long long>(index));
  return buf;
}

FrameRef FrameResolver::resolve(const VideoRef& video, std::int64_t index) const {
  if (index < 0) fail(ErrorCode::kInvalidArgument, "negative frame index");
  if (!video.frame_dir) {
    fail(ErrorCode::kInvalidArgument, "video '" + video.id + "' has no frame_dir");
  }
  const auto path = std::filesystem::path(*video.frame_dir) / frame_file_name(index);
  if (extractor_ && !std::filesystem::exists(path)) {
    std::string cmd = *extractor_;
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.6f", static_cast<double>(index) / video.fps);
    cmd = replace_all(cmd, "{video}", video.video_path.value_or(""));
    cmd = replace_all(cmd, "{index}", std::to_string(index));
    cmd = replace_all(cmd, "{seconds}", secs);
    cmd = replace_all(cmd, "{output}", path.string());
    std::filesystem::create_directories(path.parent_path());
    if (std::system(cmd.c_str()) != 0 || !std::filesystem::exists(path)) {
      fail(ErrorCode::kIo, "frame extractor failed for " + path.string());
    }
  }
  return FrameRef{video.id, index, path.string()};
}

// ---------------------------------------------------------------------------
// Captioning

CaptionRecord run_captioning(const Backend& captioner, const Backend& keyword_extractor,
                             const VideoRef& video, std::int64_t seed) {
  video.validate();
  CaptionRecord rec;
  rec.video_id = video.id;
  rec.generator_model = captioner.model_id();
  try {
    rec.text = trim(captioner
                        .generate_text(video_context(video), prompt_text(PromptId::kCaptioning),
                                       seed, Task::kCaption)
                        .text);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kBackendUnavailable) throw;
    fail(ErrorCode::kCaptionUnavailable,
         "no caption for '" + video.id + "': " + std::string(e.what()));
  }
  if (rec.text.empty()) {
    fail(ErrorCode::kCaptionUnavailable, "empty caption for '" + video.id + "'");
  }
  const MediaContext text_ctx{video.id, {TextPart{rec.text}}};
  auto raw = keyword_extractor.generate_text(text_ctx, prompt_text(PromptId::kKeywords), seed,
                                             Task::kKeywords);
  rec.keywords = parse_keywords(raw.text).keywords;
  rec.validate();
  return rec;
}

// ---------------------------------------------------------------------------
// Summaries

std::vector<Keyframe> parse_keyframes(std::string_view response) {
  Json j;
  try {
    j = Json::parse(strip_code_fence(response));
  } catch (const Json::exception& e) {
    fail(ErrorCode::kKeyframeParseError, std::string("keyframe response: ") + e.what());
  }
  if (j.is_object()) j = Json::array({j});
  if (!j.is_array()) fail(ErrorCode::kKeyframeParseError, "keyframe response is not an array");
  std::vector<Keyframe> out;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("timestamp") || !item["timestamp"].is_string()) {
      fail(ErrorCode::kKeyframeParseError, "keyframe entry lacks a string timestamp");
    }
    Keyframe k;
    k.timestamp = item["timestamp"].get<std::string>();
    if (item.contains("description") && item["description"].is_string()) {
      k.description = item["description"].get<std::string>();
    }
    out.push_back(std::move(k));
  }
  if (out.empty()) fail(ErrorCode::kKeyframeParseError, "keyframe response is empty");
  return out;
}

std::size_t count_placeholders(std::string_view text, std::size_t n) {
  std::size_t found = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (text.find("[KEYFRAME" + std::to_string(i) + "]") != std::string_view::npos) ++found;
  }
  return found;
}

std::string summary_id_for(const std::string& video_id, SummaryFormat format) {
  return video_id + "/" + std::string(format_name(format));
}

SummaryBatch build_summaries(const Backend& summarizer, const VideoRef& video,
                             const std::set<SummaryFormat>& formats, std::int64_t seed,
                             const FrameResolver& frames) {
  video.validate();
  SummaryBatch out;
  const MediaContext vctx = video_context(video);
  const bool wants_images =
      formats.contains(SummaryFormat::kOneImage) || formats.contains(SummaryFormat::kThreeImage);

  std::optional<Usage> video_usage;
  std::vector<FrameRef> keyframes;
  if (wants_images) {
    auto resp = summarizer.generate_text(vctx, prompt_text(PromptId::kKeyframes), seed,
                                         Task::kKeyframes);
    video_usage = resp.usage;
    auto parsed = parse_keyframes(resp.text);
    if (parsed.size() > kMaxKeyframes) {
      out.warnings.push_back(video.id + ": " + std::to_string(parsed.size()) +
                             " keyframes returned; keeping the first 3");
      parsed.resize(kMaxKeyframes);
    }
    for (const auto& k : parsed) {
      keyframes.push_back(frames.resolve(video, parse_timecode(k.timestamp, video.fps)));
    }
  }

  auto summarize = [&](const std::vector<FrameRef>& kf) {
    MediaContext ctx = vctx;
    for (const auto& f : kf) ctx.parts.emplace_back(ImagePart{f});
    auto resp = summarizer.generate_text(ctx, prompt_text(PromptId::kSummary), seed, Task::kSummary);
    if (kf.empty()) video_usage = resp.usage;
    return resp;
  };

  auto emit = [&](SummaryFormat format, std::vector<FrameRef> kf) {
    SummaryRecord rec;
    rec.summary_id = summary_id_for(video.id, format);
    rec.video_id = video.id;
    rec.format = format;
    rec.keyframes = std::move(kf);
    rec.text = trim(summarize(rec.keyframes).text);
    if (rec.text.empty()) {
      out.warnings.push_back(rec.summary_id + ": empty summary text; skipped");
      return;
    }
    const std::size_t n = rec.keyframes.size();
    if (n > 0 && count_placeholders(rec.text, n) != n) {
      out.warnings.push_back(rec.summary_id + ": expected placeholders [KEYFRAME1..." +
                             std::to_string(n) + "], found " +
                             std::to_string(count_placeholders(rec.text, n)));
    }
    rec.token_cost = estimate_token_cost(rec);
    rec.validate();
    out.records.push_back(std::move(rec));
  };

  for (SummaryFormat format : formats) {
    switch (format) {
      case SummaryFormat::kTextOnly:
        emit(format, {});
        break;
      case SummaryFormat::kOneImage:
        emit(format, {keyframes.front()});
        break;
      case SummaryFormat::kThreeImage:
        if (keyframes.size() < 3) {
          out.warnings.push_back(video.id + ": only " + std::to_string(keyframes.size()) +
                                 " keyframe(s) parsed for three_image");
          if (!formats.contains(SummaryFormat::kOneImage)) {
            emit(SummaryFormat::kOneImage, {keyframes.front()});
          }
          break;
        }
        emit(format, keyframes);
        break;
      case SummaryFormat::kFullVideo: {
        SummaryRecord rec;
        rec.summary_id = summary_id_for(video.id, format);
        rec.video_id = video.id;
        rec.format = format;
        if (!video_usage) summarize({});
        std::optional<std::int64_t> frames_sampled;
        if (video.duration_s > 0) {
          frames_sampled = static_cast<std::int64_t>(std::ceil(video.duration_s));
        }
        rec.token_cost = estimate_token_cost(rec, kDefaultImageTokenCost,
                                             video_usage->prompt_tokens, frames_sampled);
        rec.validate();
        out.records.push_back(std::move(rec));
        break;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// VQA

void VqaItem::validate() const {
  if (video_id.empty()) fail(ErrorCode::kInvalidArgument, "VQA item has no video id");
  if (question.empty()) fail(ErrorCode::kInvalidArgument, "VQA item has no question");
  if (options.size() < 2 || options.size() > 4) {
    fail(ErrorCode::kInvalidArgument, "VQA item '" + item_id + "' needs 2 to 4 options");
  }
  if (answer_index < 0 || static_cast<std::size_t>(answer_index) >= options.size()) {
    fail(ErrorCode::kInvalidArgument, "VQA item '" + item_id + "' answer_index out of range");
  }
}

Json to_json(const VqaItem& item) {
  return Json{{"item_id", item.item_id},
              {"video_id", item.video_id},
              {"question", item.question},
              {"options", item.options},
              {"answer_index", item.answer_index}};
}

VqaItem vqa_item_from_json(const Json& j) {
  check_keys(j, {"item_id", "video_id", "question", "options", "answer_index"}, "VQA item");
  VqaItem item;
  try {
    if (j.contains("item_id")) item.item_id = j.at("item_id").get<std::string>();
    item.video_id = j.at("video_id").get<std::string>();
    item.question = j.at("question").get<std::string>();
    item.options = j.at("options").get<std::vector<std::string>>();
    item.answer_index = j.at("answer_index").get<int>();
  } catch (const Json::exception& e) {
    fail(ErrorCode::kParseError, std::string("VQA item: ") + e.what());
  }
  return item;
}

std::vector<VqaItem> parse_vqa_items(std::string_view json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::exception& e) {
    fail(ErrorCode::kParseError, std::string("VQA items: ") + e.what());
  }
  if (!j.is_array()) fail(ErrorCode::kParseError, "VQA items must be a JSON array");
  std::vector<VqaItem> out;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < j.size(); ++i) {
    VqaItem item = vqa_item_from_json(j[i]);
    if (item.item_id.empty()) item.item_id = item.video_id + "#" + std::to_string(i);
    item.validate();
    if (!ids.insert(item.item_id).second) {
      fail(ErrorCode::kParseError, "duplicate VQA item id '" + item.item_id + "'");
    }
    out.push_back(std::move(item));
  }
  return out;
}

Json to_json(const VqaResult& r) {
  return Json{{"item_id", r.item_id},
              {"video_id", r.video_id},
              {"summary_id", r.summary_id},
              {"format", format_name(r.format)},
              {"correct", r.correct},
              {"answer_index", r.answer_index ? Json(*r.answer_index) : Json()},
              {"raw_answer", r.raw_answer},
              {"anomaly", r.anomaly}};
}

std::optional<int> parse_answer_letter(std::string_view response) {
  std::string kept;
  for (char c : response) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isspace(u) || std::ispunct(u)) continue;
    kept += c;
  }
  if (kept.size() != 1) return std::nullopt;
  const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(kept[0])));
  if (c < 'A' || c > 'D') return std::nullopt;
  return c - 'A';
}

VqaResult run_vqa(const Backend& answerer, const VqaItem& item, const SummaryRecord& summary,
                  const VideoRef& video, std::int64_t seed) {
  item.validate();
  if (summary.video_id != item.video_id) {
    fail(ErrorCode::kIdentityMismatch, "VQA item '" + item.item_id + "' is about '" +
                                           item.video_id + "' but the summary is of '" +
                                           summary.video_id + "'");
  }
  const auto prompt = vqa_prompt(summary.format, summary.text, item.question, item.options);
  auto resp = answerer.generate_text(summary_context(summary, video), prompt, seed, Task::kVqa);
  VqaResult r;
  r.item_id = item.item_id;
  r.video_id = item.video_id;
  r.summary_id = summary.summary_id;
  r.format = summary.format;
  r.raw_answer = resp.text;
  r.answer_index = parse_answer_letter(resp.text);
  if (r.answer_index && *r.answer_index >= static_cast<int>(item.options.size())) {
    r.answer_index.reset();
  }
  r.anomaly = !r.answer_index.has_value();
  r.correct = r.answer_index && *r.answer_index == item.answer_index;
  return r;
}

// ---------------------------------------------------------------------------
// Correspondence test

std::string_view label_name(CorrespondenceLabel label) {
  switch (label) {
    case CorrespondenceLabel::kGroundTruth:
      return "ground_truth";
    case CorrespondenceLabel::kTextConfused:
      return "text_confused";
    case CorrespondenceLabel::kVisualConfused:
      return "visual_confused";
  }
  return "";
}

CorrespondenceLabel parse_label(std::string_view name) {
  for (auto l : {CorrespondenceLabel::kGroundTruth, CorrespondenceLabel::kTextConfused,
                 CorrespondenceLabel::kVisualConfused}) {
    if (label_name(l) == name) return l;
  }
  fail(ErrorCode::kParseError, "unknown correspondence label '" + std::string(name) + "'");
}

Json to_json(const CorrespondenceItem& item) {
  return Json{{"item_id", item.item_id},
              {"video_id", item.video_id},
              {"summary", to_json(item.summary)},
              {"label", label_name(item.label)},
              {"source_summary_id", item.source_summary_id}};
}

CorrespondenceItem correspondence_item_from_json(const Json& j) {
  check_keys(j, {"item_id", "video_id", "summary", "label", "source_summary_id"},
             "correspondence item");
  CorrespondenceItem item;
  try {
    item.item_id = j.at("item_id").get<std::string>();
    item.video_id = j.at("video_id").get<std::string>();
    item.summary = summary_from_json(j.at("summary"));
    item.label = parse_label(j.at("label").get<std::string>());
    item.source_summary_id = j.at("source_summary_id").get<std::string>();
  } catch (const Json::exception& e) {
    fail(ErrorCode::kParseError, std::string("correspondence item: ") + e.what());
  }
  return item;
}

std::vector<std::string> parse_distractors(std::string_view response) {
  Json j;
  try {
    j = Json::parse(strip_code_fence(response));
  } catch (const Json::exception&) {
    return {};
  }
  std::vector<std::string> out;
  if (!j.is_array()) return out;
  for (const auto& e : j) {
    if (!e.is_string()) continue;
    auto s = trim(e.get<std::string>());
    if (!s.empty()) out.push_back(std::move(s));
  }
  return out;
}

DistractorSet make_distractors(const Backend& generator, const std::vector<SummaryRecord>& batch,
                               std::size_t position, std::int64_t seed) {
  if (position >= batch.size()) fail(ErrorCode::kInvalidArgument, "position outside batch");
  const SummaryRecord& gt = batch[position];
  gt.validate();
  DistractorSet out;
  out.items.push_back({gt.summary_id + "#gt", gt.video_id, gt, CorrespondenceLabel::kGroundTruth,
                       gt.summary_id});

  if (!gt.text.empty()) {
    const MediaContext ctx{gt.video_id, {TextPart{gt.text}}};
    auto resp = generator.generate_text(ctx, distractor_prompt(3), seed, Task::kDistractors);
    auto texts = parse_distractors(resp.text);
    if (texts.size() > 3) texts.resize(3);
    if (texts.size() < 3) {
      out.shortfall = true;
      out.warnings.push_back(std::string(error_name(ErrorCode::kDistractorShortfall)) + ": " +
                             gt.summary_id + " yielded " + std::to_string(texts.size()) +
                             " of 3 distractors");
    }
    for (std::size_t k = 0; k < texts.size(); ++k) {
      SummaryRecord s = gt;
      s.summary_id = gt.summary_id + "#text" + std::to_string(k + 1);
      s.text = texts[k];
      s.token_cost = estimate_token_cost(s);
      out.items.push_back(
          {s.summary_id, gt.video_id, s, CorrespondenceLabel::kTextConfused, gt.summary_id});
    }
  }

  if (!gt.keyframes.empty()) {
    if (batch.size() < 2) {
      out.warnings.push_back(gt.summary_id + ": no other video; visual confusion skipped");
    } else {
      const SummaryRecord& donor = batch[(position + 1) % batch.size()];
      if (donor.keyframes.size() < gt.keyframes.size() || donor.video_id == gt.video_id) {
        out.warnings.push_back(gt.summary_id + ": '" + donor.summary_id +
                               "' cannot donate keyframes; visual confusion skipped");
      } else {
        SummaryRecord s = gt;
        s.summary_id = gt.summary_id + "#visual";
        for (std::size_t i = 0; i < s.keyframes.size(); ++i) s.keyframes[i] = donor.keyframes[i];
        out.items.push_back(
            {s.summary_id, gt.video_id, s, CorrespondenceLabel::kVisualConfused, gt.summary_id});
      }
    }
  }
  return out;
}

Judgment parse_judgment(std::string_view response) {
  Judgment j;
  for (const auto& w : alnum_words(response)) {
    if (!j.match && (w == "yes" || w == "no")) j.match = (w == "yes");
    if (!j.confidence && w.size() == 1 && w[0] >= '1' && w[0] <= '5') j.confidence = w[0] - '0';
  }
  return j;
}

Json to_json(const CorrespondenceResult& r) {
  return Json{{"item_id", r.item_id},
              {"video_id", r.video_id},
              {"summary_id", r.summary_id},
              {"label", label_name(r.label)},
              {"format", format_name(r.format)},
              {"judged_match", r.judged_match ? Json(*r.judged_match) : Json()},
              {"confidence", r.confidence ? Json(*r.confidence) : Json()},
              {"correct", r.correct},
              {"anomaly", r.anomaly},
              {"raw", r.raw}};
}

std::vector<CorrespondenceResult> run_correspondence(const Backend& judge, const VideoRef& video,
                                                     const std::vector<CorrespondenceItem>& items,
                                                     std::int64_t seed) {
  std::vector<CorrespondenceResult> out;
  for (const auto& item : items) {
    if (item.video_id != video.id) {
      fail(ErrorCode::kIdentityMismatch,
           "correspondence item '" + item.item_id + "' is not about '" + video.id + "'");
    }
    MediaContext ctx = video_context(video);
    for (const auto& f : item.summary.keyframes) ctx.parts.emplace_back(ImagePart{f});
    if (!item.summary.text.empty()) ctx.parts.emplace_back(TextPart{item.summary.text});
    auto resp = judge.generate_text(ctx, prompt_text(PromptId::kCorrespondence), seed,
                                    Task::kCorrespondence);
    const Judgment jd = parse_judgment(resp.text);
    CorrespondenceResult r;
    r.item_id = item.item_id;
    r.video_id = item.video_id;
    r.summary_id = item.summary.summary_id;
    r.label = item.label;
    r.format = item.summary.format;
    r.judged_match = jd.match;
    r.confidence = jd.confidence;
    r.anomaly = !jd.match.has_value();
    r.correct = jd.match && *jd.match == (item.label == CorrespondenceLabel::kGroundTruth);
    r.raw = resp.text;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CellAccuracy> correspondence_accuracy(
    const std::vector<CorrespondenceResult>& results) {
  std::map<std::pair<int, int>, CellAccuracy> cells;
  for (const auto& r : results) {
    auto& c = cells[{static_cast<int>(r.label), static_cast<int>(r.format)}];
    c.label = r.label;
    c.format = r.format;
    ++c.n;
    if (r.correct) ++c.correct;
  }
  std::vector<CellAccuracy> out;
  for (auto& [_, c] : cells) out.push_back(c);
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic experiment

SyntheticExperiment synthetic_experiment(const ToyWorld& world, int n_videos,
                                         const std::vector<SummaryFormat>& formats,
                                         const std::map<SummaryFormat, double>& coverage_by_format,
                                         std::int64_t seed, ScoringConfig scoring) {
  world.validate();
  if (n_videos < 0) fail(ErrorCode::kInvalidArgument, "n_videos must be non-negative");
  if (formats.empty()) fail(ErrorCode::kInvalidArgument, "no summary formats requested");
  for (auto f : formats) {
    auto it = coverage_by_format.find(f);
    if (f == SummaryFormat::kFullVideo) continue;
    if (it == coverage_by_format.end() || !(it->second >= 0.0 && it->second <= 1.0)) {
      fail(ErrorCode::kInvalidArgument,
           "coverage for " + std::string(format_name(f)) + " must be given and lie in [0, 1]");
    }
  }

  SyntheticBackend backend(world);
  SyntheticExperiment out;
  std::vector<MaskedCaption> masks;
  for (int i = 0; i < n_videos; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "toy%04d", i);
    VideoRef v;
    v.id = id;
    v.frame_dir = std::string("synthetic/") + id;
    v.video_path = std::string("synthetic/") + id + ".mp4";
    v.fps = 30.0;
    v.duration_s = 10.0;
    v.dataset_tag = "synthetic";
    const auto facts = backend.facts_for(v.id);

    CaptionRecord cap;
    cap.video_id = v.id;
    cap.generator_model = backend.model_id();
    for (const auto& f : facts) cap.text += (cap.text.empty() ? "" : " ") + f;
    cap.keywords.assign(facts.begin(),
                        facts.begin() + static_cast<std::ptrdiff_t>(
                                            std::min(facts.size(), kMaxKeywords)));
    masks.push_back(build_masked_caption(cap.text, cap.keywords));

    Rng rng(substream_seed(static_cast<std::uint64_t>(seed), static_cast<std::uint64_t>(i)));
    const SummaryFormat format = formats[static_cast<std::size_t>(i) % formats.size()];
    const std::size_t n_img = format == SummaryFormat::kFullVideo ? 0 : expected_keyframes(format);
    const double coverage =
        format == SummaryFormat::kFullVideo ? 1.0 : coverage_by_format.at(format);

    // Covered facts go round-robin to the text (bucket 0) and the keyframes.
    std::vector<std::vector<std::string>> buckets(n_img + 1);
    std::set<std::string> covered;
    for (const auto& f : facts) {
      if (!rng.bernoulli(coverage)) continue;
      buckets[covered.size() % buckets.size()].push_back(f);
      covered.insert(f);
    }

    SummaryRecord s;
    s.summary_id = summary_id_for(v.id, format);
    s.video_id = v.id;
    s.format = format;
    if (format != SummaryFormat::kFullVideo) {
      s.text = "summary";
      for (const auto& f : buckets[0]) s.text += " " + f;
      for (std::size_t k = 1; k <= n_img; ++k) {
        FrameRef fr{v.id, static_cast<std::int64_t>(k) * 30,
                    *v.frame_dir + "/" + frame_file_name(static_cast<std::int64_t>(k) * 30)};
        backend.add_frame_facts(fr, FactSet(buckets[k].begin(), buckets[k].end()));
        s.keyframes.push_back(fr);
        s.text += " [KEYFRAME" + std::to_string(k) + "]";
      }
    }
    s.token_cost = estimate_token_cost(s, kDefaultImageTokenCost, std::nullopt,
                                       static_cast<std::int64_t>(std::ceil(v.duration_s)));

    const auto& queried = facts[static_cast<std::size_t>(rng.below(facts.size()))];
    const bool visible = format == SummaryFormat::kFullVideo || covered.contains(queried);
    const bool correct = rng.bernoulli(visible ? world.p_hit : world.p_miss);
    out.labels.push_back({v.id, s.summary_id, correct ? 1 : 0});

    out.videos.push_back(std::move(v));
    out.captions.push_back(std::move(cap));
    out.summaries.push_back(std::move(s));
  }

  scoring.seed = seed;
  if (scoring.call_concurrency == 0) scoring.call_concurrency = 1;
  for (std::size_t i = 0; i < out.videos.size(); ++i) {
    out.records.push_back(visil_score(backend, video_context(out.videos[i]),
                                      summary_context(out.summaries[i], out.videos[i]), masks[i],
                                      scoring, out.summaries[i].summary_id));
  }
  return out;
}

}  // namespace visil
