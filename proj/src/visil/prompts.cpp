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

#include "visil/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace visil {

std::string_view prompt_name(PromptId id) {
  switch (id) {
    case PromptId::kCaptioning: return "captioning";
    case PromptId::kKeywords: return "keywords";
    case PromptId::kKeyframes: return "keyframes";
    case PromptId::kSummary: return "summary";
    case PromptId::kDistractors: return "distractors";
    case PromptId::kCorrespondence: return "correspondence";
    case PromptId::kVisilScore: return "visil_score";
    case PromptId::kVqa: return "vqa";
  }
  return "";
}

std::string_view prompt_text(PromptId id) {
  const auto name = prompt_name(id);
  for (const auto& asset : detail::embedded_prompts()) {
    if (asset.name == name) return asset.text;
  }
  fail(ErrorCode::kInternal, "prompt asset '" + std::string(name) + "' not embedded");
}

const std::vector<PromptId>& all_prompt_ids() {
  static const std::vector<PromptId> kIds = {
      PromptId::kCaptioning,  PromptId::kKeywords,       PromptId::kKeyframes,
      PromptId::kSummary,     PromptId::kDistractors,    PromptId::kCorrespondence,
      PromptId::kVisilScore,  PromptId::kVqa};
  return kIds;
}

std::string fill_template(std::string_view tmpl,
                          const std::map<std::string, std::string, std::less<>>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      auto close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        auto key = tmpl.substr(i + 1, close - i - 1);
        bool ident = !key.empty() && std::all_of(key.begin(), key.end(), [](char c) {
          return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
        });
        if (ident) {
          auto it = values.find(key);
          if (it == values.end()) {
            fail(ErrorCode::kInvalidArgument,
                 "no value for prompt placeholder {" + std::string(key) + "}");
          }
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

ScoreModality score_modality(const MediaContext& ctx) {
  if (ctx.has_video()) return ScoreModality::kVideo;
  switch (ctx.image_count()) {
    case 0: return ScoreModality::kTextOnly;
    case 1: return ScoreModality::kOneImage;
    case 3: return ScoreModality::kThreeImage;
    default:
      fail(ErrorCode::kInvalidArgument,
           "summary context must carry 0, 1 or 3 keyframes, got " +
               std::to_string(ctx.image_count()));
  }
}

std::string visil_prompt(ScoreModality modality, std::string_view summary_text,
                         std::string_view masked_caption) {
  std::string_view wanted;
  switch (modality) {
    case ScoreModality::kVideo: wanted = "- For video:"; break;
    case ScoreModality::kThreeImage: wanted = "- For 3-image summary:"; break;
    case ScoreModality::kOneImage: wanted = "- For 1-image summary:"; break;
    case ScoreModality::kTextOnly: wanted = "- For text-only summary:"; break;
  }
  // Keep every line except the input bullets that do not apply; the blank line
  // following a dropped bullet goes with it.
  std::istringstream in{std::string(prompt_text(PromptId::kVisilScore))};
  std::string line;
  std::string kept;
  bool skip_blank = false;
  while (std::getline(in, line)) {
    if (line.rfind("- For ", 0) == 0 && line.rfind(wanted, 0) != 0) {
      skip_blank = true;
      continue;
    }
    if (skip_blank && line.empty()) {
      skip_blank = false;
      continue;
    }
    skip_blank = false;
    kept += line;
    kept += '\n';
  }
  return fill_template(kept, {{"summary", std::string(summary_text)},
                              {"masked_caption", std::string(masked_caption)}});
}

std::string_view vqa_input_format(SummaryFormat format) {
  switch (format) {
    case SummaryFormat::kTextOnly: return "a textual description of a video";
    case SummaryFormat::kOneImage:
      return "one keyframe image and a textual description of a video";
    case SummaryFormat::kThreeImage:
      return "three keyframe images and a textual description of a video";
    case SummaryFormat::kFullVideo: return "a video";
  }
  return "";
}

std::string format_options(const std::vector<std::string>& options) {
  std::string out;
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (i) out += '\n';
    out += static_cast<char>('A' + i);
    out += ". ";
    out += options[i];
  }
  return out;
}

std::string vqa_prompt(SummaryFormat format, std::string_view summary_text,
                       std::string_view question, const std::vector<std::string>& options) {
  return fill_template(prompt_text(PromptId::kVqa),
                       {{"input_format", std::string(vqa_input_format(format))},
                        {"summary", std::string(summary_text)},
                        {"question", std::string(question)},
                        {"options", format_options(options)}});
}

std::string distractor_prompt(int count, std::string_view format) {
  return fill_template(prompt_text(PromptId::kDistractors),
                       {{"total_distractor_num", std::to_string(count)},
                        {"format", std::string(format)}});
}

}  // namespace visil
