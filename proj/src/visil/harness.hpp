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

// Pipeline steps: captioning, summary construction, VQA, the correspondence
// test, and a synthetic experiment generator.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "visil/backend.hpp"
#include "visil/scoring.hpp"
#include "visil/stats.hpp"
#include "visil/synthetic.hpp"

namespace visil {

// --- timecodes -------------------------------------------------------------

struct Timecode {
  int hours = 0;
  int minutes = 0;
  int seconds = 0;
  int frames = 0;
};

/// Parses "HH:MM:SS:FF" (two digits per field). Throws TimecodeParseError.
Timecode parse_timecode_fields(std::string_view tc);

/// round(fps * (3600 h + 60 m + s)) + f. Throws InvalidFrameField when
/// f >= ceil(fps).
std::int64_t parse_timecode(std::string_view tc, double fps);

// --- frames ----------------------------------------------------------------

/// Maps a frame index to `frame_dir/frame_{index:06}.png`. When the file is
/// absent and an extractor template is set, runs it once with {video},
/// {index}, {seconds} and {output} substituted.
class FrameResolver {
 public:
  FrameResolver() = default;
  explicit FrameResolver(std::optional<std::string> extractor_template)
      : extractor_(std::move(extractor_template)) {}

  FrameRef resolve(const VideoRef& video, std::int64_t index) const;

 private:
  std::optional<std::string> extractor_;
};

std::string frame_file_name(std::int64_t index);

// --- captioning ------------------------------------------------------------

/// Caption prompt on the video, then keyword prompt on the caption text.
/// A refusal that survives retries surfaces as CaptionUnavailable.
CaptionRecord run_captioning(const Backend& captioner, const Backend& keyword_extractor,
                             const VideoRef& video, std::int64_t seed);

// --- summaries -------------------------------------------------------------

struct Keyframe {
  std::string timestamp;
  std::string description;
};

/// Parses the keyframe response: a JSON array of {timestamp, description},
/// optionally fenced. Throws KeyframeParseError.
std::vector<Keyframe> parse_keyframes(std::string_view response);

/// Number of distinct [KEYFRAMEi] placeholders with 1 <= i <= n present in
/// `text`.
std::size_t count_placeholders(std::string_view text, std::size_t n);

struct SummaryBatch {
  std::vector<SummaryRecord> records;
  std::vector<std::string> warnings;
};

std::string summary_id_for(const std::string& video_id, SummaryFormat format);

/// One record per requested format, in enum order. FullVideo records carry no
/// text; their token cost is the prompt-token count the backend reports for
/// the video, falling back to one sampled frame per second of duration.
SummaryBatch build_summaries(const Backend& summarizer, const VideoRef& video,
                             const std::set<SummaryFormat>& formats, std::int64_t seed,
                             const FrameResolver& frames = {});

// --- VQA -------------------------------------------------------------------

struct VqaItem {
  std::string item_id;
  std::string video_id;
  std::string question;
  std::vector<std::string> options;
  int answer_index = 0;

  void validate() const;
};

Json to_json(const VqaItem& item);
VqaItem vqa_item_from_json(const Json& j);
std::vector<VqaItem> parse_vqa_items(std::string_view json_text);

struct VqaResult {
  std::string item_id;
  std::string video_id;
  std::string summary_id;
  SummaryFormat format = SummaryFormat::kTextOnly;
  bool correct = false;
  std::optional<int> answer_index;
  std::string raw_answer;
  bool anomaly = false;
};

Json to_json(const VqaResult& r);

/// Index of a single A-D letter after stripping whitespace and punctuation,
/// case-insensitive; nullopt otherwise.
std::optional<int> parse_answer_letter(std::string_view response);

VqaResult run_vqa(const Backend& answerer, const VqaItem& item, const SummaryRecord& summary,
                  const VideoRef& video, std::int64_t seed);

// --- correspondence test ---------------------------------------------------

enum class CorrespondenceLabel { kGroundTruth, kTextConfused, kVisualConfused };

std::string_view label_name(CorrespondenceLabel label);
CorrespondenceLabel parse_label(std::string_view name);

struct CorrespondenceItem {
  std::string item_id;
  std::string video_id;
  SummaryRecord summary;
  CorrespondenceLabel label = CorrespondenceLabel::kGroundTruth;
  // The ground-truth summary a confused item perturbs (its own id otherwise).
  std::string source_summary_id;
};

Json to_json(const CorrespondenceItem& item);
CorrespondenceItem correspondence_item_from_json(const Json& j);

struct DistractorSet {
  std::vector<CorrespondenceItem> items;
  std::vector<std::string> warnings;
  bool shortfall = false;
};

/// Parses a JSON array of strings, optionally fenced. Non-string and empty
/// entries are skipped.
std::vector<std::string> parse_distractors(std::string_view response);

/// Ground truth plus confused variants for batch[position]. Text distractors
/// come from the distractor prompt (fewer than 3 sets `shortfall`, keeping
/// what parsed). The visual variant keeps the text and takes the keyframes of
/// batch[(position + 1) % batch.size()].
DistractorSet make_distractors(const Backend& generator, const std::vector<SummaryRecord>& batch,
                               std::size_t position, std::int64_t seed);

struct Judgment {
  std::optional<bool> match;
  std::optional<int> confidence;
};

/// First standalone yes/no and first standalone digit 1-5.
Judgment parse_judgment(std::string_view response);

struct CorrespondenceResult {
  std::string item_id;
  std::string video_id;
  std::string summary_id;
  CorrespondenceLabel label = CorrespondenceLabel::kGroundTruth;
  SummaryFormat format = SummaryFormat::kTextOnly;
  std::optional<bool> judged_match;
  std::optional<int> confidence;
  bool correct = false;
  bool anomaly = false;
  std::string raw;
};

Json to_json(const CorrespondenceResult& r);

std::vector<CorrespondenceResult> run_correspondence(const Backend& judge, const VideoRef& video,
                                                     const std::vector<CorrespondenceItem>& items,
                                                     std::int64_t seed);

struct CellAccuracy {
  CorrespondenceLabel label = CorrespondenceLabel::kGroundTruth;
  SummaryFormat format = SummaryFormat::kTextOnly;
  std::size_t n = 0;
  std::size_t correct = 0;
  double accuracy() const { return n == 0 ? 0.0 : static_cast<double>(correct) / n; }
};

std::vector<CellAccuracy> correspondence_accuracy(const std::vector<CorrespondenceResult>& results);

// --- synthetic experiment --------------------------------------------------

struct SyntheticExperiment {
  std::vector<VideoRef> videos;
  std::vector<CaptionRecord> captions;
  std::vector<SummaryRecord> summaries;
  std::vector<ScoreRecord> records;
  std::vector<CorrectnessLabel> labels;
};

/// Video i is summarized in formats[i % formats.size()]; each fact is covered
/// with probability coverage_by_format[format]. Covered facts are spread over
/// the text and the keyframes. The queried fact is uniform over the video's
/// facts; the answer is correct with probability p_hit when it is covered and
/// p_miss otherwise. Deterministic in `seed`.
SyntheticExperiment synthetic_experiment(const ToyWorld& world, int n_videos,
                                         const std::vector<SummaryFormat>& formats,
                                         const std::map<SummaryFormat, double>& coverage_by_format,
                                         std::int64_t seed, ScoringConfig scoring = {});

}  // namespace visil
