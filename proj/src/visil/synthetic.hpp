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

// Closed-form toy backend. A video is a set of fact tokens; a keyword is
// recovered with probability p_hit when its fact is visible in the context
// and p_miss otherwise, so
//
//   log P(C | X) = n_hit * ln(p_hit) + n_miss * ln(p_miss)
//
// and the score of a summary is |missing keywords| * ln(p_hit / p_miss).

#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "visil/backend.hpp"

namespace visil {

struct ToyWorld {
  int facts_per_video = 10;
  double p_hit = 0.9;
  double p_miss = 0.1;
  std::int64_t seed = 0;

  void validate() const;
};

Json to_json(const ToyWorld& w);
ToyWorld world_from_json(const Json& j, ToyWorld defaults = {});

using FactSet = std::set<std::string>;

/// Per-slot log-probabilities for a known set of visible facts. Every slot
/// keyword must be in `vocabulary` (UnknownFact otherwise).
std::vector<double> synthetic_score_keywords(const ToyWorld& world, const FactSet& vocabulary,
                                             const FactSet& context_facts,
                                             const MaskedCaption& masked);

class SyntheticBackend final : public Backend {
 public:
  explicit SyntheticBackend(ToyWorld world, std::string model_id = "synthetic");

  // Registration is not thread-safe; finish it before sharing the backend.
  void add_video(const std::string& video_id, std::vector<std::string> facts);
  void add_frame_facts(const FrameRef& frame, FactSet facts);
  void add_vocabulary(const FactSet& facts);

  /// Registered facts, or `facts_per_video` generated tokens derived from the
  /// id and world seed.
  std::vector<std::string> facts_for(const std::string& video_id) const;
  FactSet context_facts(const MediaContext& context) const;
  const ToyWorld& world() const { return world_; }

  std::string model_id() const override { return model_id_; }
  TextResponse generate_text(const MediaContext& context, std::string_view prompt,
                             std::int64_t seed, Task task) const override;
  KeywordScores score_keywords(const MediaContext& context, const MaskedCaption& masked,
                               std::int64_t seed) const override;

 private:
  FactSet vocabulary_for(const MediaContext& context) const;

  ToyWorld world_;
  std::string model_id_;
  std::map<std::string, std::vector<std::string>> videos_;
  std::map<std::pair<std::string, std::int64_t>, FactSet> frame_facts_;
  FactSet extra_vocabulary_;
};

}  // namespace visil
