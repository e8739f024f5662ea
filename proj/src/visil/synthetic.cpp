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

#include "visil/synthetic.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "visil/rng.hpp"

namespace visil {
namespace {

std::vector<std::string> words_of(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string w;
  while (in >> w) {
    auto n = normalize_token(w);
    if (!n.empty()) out.push_back(std::move(n));
  }
  return out;
}

std::string join(const std::vector<std::string>& words, std::size_t count) {
  std::string out;
  for (std::size_t i = 0; i < std::min(count, words.size()); ++i) {
    if (i) out += ' ';
    out += words[i];
  }
  return out;
}

double request_uniform(std::int64_t seed, std::string_view prompt, const MediaContext& ctx) {
  auto h = fnv1a64(prompt, fnv1a64(to_json(ctx).dump()));
  return static_cast<double>(splitmix64(static_cast<std::uint64_t>(seed) ^ h) >> 11) *
         0x1.0p-53;
}

std::int64_t synthetic_prompt_tokens(const MediaContext& ctx) {
  std::int64_t tokens = static_cast<std::int64_t>(word_count(ctx.joined_text()));
  for (const auto& p : ctx.parts) {
    if (std::holds_alternative<ImagePart>(p)) tokens += kDefaultImageTokenCost;
    if (const auto* v = std::get_if<VideoPart>(&p)) {
      tokens += kDefaultImageTokenCost *
                std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(v->video.duration_s)));
    }
  }
  return tokens;
}

const VideoRef* first_video(const MediaContext& ctx) {
  for (const auto& p : ctx.parts) {
    if (const auto* v = std::get_if<VideoPart>(&p)) return &v->video;
  }
  return nullptr;
}

}  // namespace

void ToyWorld::validate() const {
  if (facts_per_video < 1) {
    fail(ErrorCode::kInvalidArgument, "facts_per_video must be positive");
  }
  if (!(p_miss > 0.0 && p_miss < p_hit && p_hit <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "toy world needs 0 < p_miss < p_hit <= 1");
  }
}

Json to_json(const ToyWorld& w) {
  return Json{{"facts_per_video", w.facts_per_video},
              {"p_hit", w.p_hit},
              {"p_miss", w.p_miss},
              {"seed", w.seed}};
}

ToyWorld world_from_json(const Json& j, ToyWorld w) {
  if (!j.is_object()) fail(ErrorCode::kParseError, "toy world must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "facts_per_video") {
      w.facts_per_video = value.get<int>();
    } else if (key == "p_hit") {
      w.p_hit = value.get<double>();
    } else if (key == "p_miss") {
      w.p_miss = value.get<double>();
    } else if (key == "seed") {
      w.seed = value.get<std::int64_t>();
    } else {
      fail(ErrorCode::kParseError, "toy world: unknown field '" + key + "'");
    }
  }
  w.validate();
  return w;
}

std::vector<double> synthetic_score_keywords(const ToyWorld& world, const FactSet& vocabulary,
                                             const FactSet& context_facts,
                                             const MaskedCaption& masked) {
  world.validate();
  const double hit = std::log(world.p_hit);
  const double miss = std::log(world.p_miss);
  std::vector<double> out;
  out.reserve(masked.slots.size());
  for (const auto& slot : masked.slots) {
    if (!vocabulary.contains(slot.keyword)) {
      fail(ErrorCode::kUnknownFact, "keyword '" + slot.keyword + "' is not a fact of the world");
    }
    out.push_back(context_facts.contains(slot.keyword) ? hit : miss);
  }
  return out;
}

SyntheticBackend::SyntheticBackend(ToyWorld world, std::string model_id)
    : world_(world), model_id_(std::move(model_id)) {
  world_.validate();
}

void SyntheticBackend::add_video(const std::string& video_id, std::vector<std::string> facts) {
  videos_[video_id] = std::move(facts);
}

void SyntheticBackend::add_frame_facts(const FrameRef& frame, FactSet facts) {
  frame_facts_[{frame.video_id, frame.index}] = std::move(facts);
}

void SyntheticBackend::add_vocabulary(const FactSet& facts) {
  extra_vocabulary_.insert(facts.begin(), facts.end());
}

std::vector<std::string> SyntheticBackend::facts_for(const std::string& video_id) const {
  if (auto it = videos_.find(video_id); it != videos_.end()) return it->second;
  const auto tag = splitmix64(fnv1a64(video_id) ^ static_cast<std::uint64_t>(world_.seed));
  char hex[9];
  std::snprintf(hex, sizeof hex, "%08x", static_cast<unsigned>(tag & 0xffffffffu));
  std::vector<std::string> facts;
  for (int j = 0; j < world_.facts_per_video; ++j) {
    facts.push_back("fact" + std::to_string(j) + "_" + hex);
  }
  return facts;
}

FactSet SyntheticBackend::vocabulary_for(const MediaContext& context) const {
  FactSet vocab = extra_vocabulary_;
  for (const auto& [_, facts] : videos_) vocab.insert(facts.begin(), facts.end());
  if (!context.video_id.empty()) {
    auto own = facts_for(context.video_id);
    vocab.insert(own.begin(), own.end());
  }
  for (const auto& p : context.parts) {
    if (const auto* v = std::get_if<VideoPart>(&p)) {
      auto facts = facts_for(v->video.id);
      vocab.insert(facts.begin(), facts.end());
    }
  }
  return vocab;
}

FactSet SyntheticBackend::context_facts(const MediaContext& context) const {
  const FactSet vocab = vocabulary_for(context);
  FactSet out;
  for (const auto& p : context.parts) {
    if (const auto* t = std::get_if<TextPart>(&p)) {
      for (auto& w : words_of(t->text)) {
        if (vocab.contains(w)) out.insert(std::move(w));
      }
    } else if (const auto* img = std::get_if<ImagePart>(&p)) {
      auto it = frame_facts_.find({img->frame.video_id, img->frame.index});
      if (it != frame_facts_.end()) out.insert(it->second.begin(), it->second.end());
    } else if (const auto* v = std::get_if<VideoPart>(&p)) {
      auto facts = facts_for(v->video.id);
      out.insert(facts.begin(), facts.end());
    }
  }
  return out;
}

KeywordScores SyntheticBackend::score_keywords(const MediaContext& context,
                                               const MaskedCaption& masked,
                                               std::int64_t /*seed*/) const {
  KeywordScores out;
  out.logprobs =
      synthetic_score_keywords(world_, vocabulary_for(context), context_facts(context), masked);
  out.usage.prompt_tokens = synthetic_prompt_tokens(context);
  return out;
}

TextResponse SyntheticBackend::generate_text(const MediaContext& context,
                                             std::string_view prompt, std::int64_t seed,
                                             Task task) const {
  TextResponse out;
  out.usage.prompt_tokens = synthetic_prompt_tokens(context);
  const VideoRef* video = first_video(context);
  const std::string vid = video ? video->id : context.video_id;
  const auto facts = facts_for(vid);

  switch (task) {
    case Task::kCaption:
      out.text = join(facts, facts.size());
      break;
    case Task::kKeywords: {
      const FactSet vocab = vocabulary_for(context);
      Json arr = Json::array();
      FactSet seen;
      for (auto& w : words_of(context.joined_text())) {
        if (vocab.contains(w) && seen.insert(w).second) arr.push_back(w);
      }
      out.text = arr.dump();
      break;
    }
    case Task::kKeyframes: {
      Json arr = Json::array();
      for (int i = 0; i < 3; ++i) {
        char tc[16];
        std::snprintf(tc, sizeof tc, "00:00:%02d:00", i + 1);
        arr.push_back({{"timestamp", tc},
                       {"description", facts.empty() ? "" : facts[i % facts.size()]}});
      }
      out.text = arr.dump(4);
      break;
    }
    case Task::kSummary: {
      const std::size_t n = context.image_count();
      const std::size_t covered = std::max<std::size_t>(1, facts.size() * (n + 1) / 4);
      out.text = join(facts, covered);
      for (std::size_t i = 1; i <= n; ++i) out.text += " [KEYFRAME" + std::to_string(i) + "]";
      break;
    }
    case Task::kDistractors: {
      auto words = words_of(context.joined_text());
      Json arr = Json::array();
      for (int i = 0; i < 3; ++i) {
        auto altered = words;
        if (!altered.empty()) {
          altered[static_cast<std::size_t>(i) % altered.size()] =
              "altered" + std::to_string(i);
        }
        arr.push_back(join(altered, altered.size()));
      }
      out.text = arr.dump();
      break;
    }
    case Task::kCorrespondence: {
      const FactSet truth(facts.begin(), facts.end());
      bool match = true;
      for (const auto& p : context.parts) {
        if (const auto* img = std::get_if<ImagePart>(&p)) {
          match = match && img->frame.video_id == vid;
        } else if (const auto* t = std::get_if<TextPart>(&p)) {
          for (const auto& w : words_of(t->text)) {
            if (w.rfind("keyframe", 0) == 0) continue;
            match = match && truth.contains(w);
          }
        }
      }
      out.text = match ? "yes 5" : "no 4";
      break;
    }
    case Task::kVqa: {
      // Question names one fact; the correct option is the one equal to it.
      const FactSet vocab = vocabulary_for(context);
      auto q_pos = prompt.find("Question:");
      auto o_pos = prompt.find("Options:");
      std::string queried;
      if (q_pos != std::string_view::npos) {
        auto q_end = o_pos == std::string_view::npos ? prompt.size() : o_pos;
        for (auto& w : words_of(prompt.substr(q_pos + 9, q_end - q_pos - 9))) {
          if (vocab.contains(w)) {
            queried = w;
            break;
          }
        }
      }
      std::vector<std::string> options;
      if (o_pos != std::string_view::npos) {
        std::istringstream lines{std::string(prompt.substr(o_pos + 8))};
        std::string line;
        while (std::getline(lines, line)) {
          auto dot = line.find(". ");
          if (dot != std::string::npos) options.push_back(normalize_token(line.substr(dot + 2)));
        }
      }
      std::size_t correct = 0;
      for (std::size_t i = 0; i < options.size(); ++i) {
        if (options[i] == queried) correct = i;
      }
      const double p = context_facts(context).contains(queried) ? world_.p_hit : world_.p_miss;
      std::size_t pick = correct;
      if (request_uniform(seed, prompt, context) >= p && options.size() > 1) {
        pick = (correct + 1) % options.size();
      }
      out.text = std::string(1, static_cast<char>('A' + pick));
      break;
    }
    case Task::kOther:
      break;
  }
  return out;
}

}  // namespace visil
