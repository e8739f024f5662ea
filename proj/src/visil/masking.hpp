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

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "visil/core.hpp"

namespace visil {

struct KeywordList {
  std::vector<std::string> keywords;
  std::vector<std::string> warnings;
};

/// Parses a keyword-extractor response (a JSON array of strings) into the
/// canonical keyword list: lowercase, single words, no "video", first
/// occurrence wins, at most 20 entries. Markdown code fences around the array
/// are tolerated.
/// Trims whitespace and removes a surrounding ``` fence, if any.
std::string_view strip_code_fence(std::string_view s);

KeywordList parse_keywords(std::string_view raw);

struct Span {
  std::size_t begin = 0;  // byte offset, inclusive
  std::size_t end = 0;    // byte offset, exclusive
  bool operator==(const Span&) const = default;
};

struct MaskSlot {
  std::string keyword;
  Span span;
  bool operator==(const MaskSlot&) const = default;
};

enum class ExclusionReason { kNotFound };

struct ExcludedKeyword {
  std::string keyword;
  ExclusionReason reason = ExclusionReason::kNotFound;
  bool operator==(const ExcludedKeyword&) const = default;
};

struct MaskedCaption {
  std::string original_text;
  std::string masked_text;
  std::vector<MaskSlot> slots;
  std::vector<ExcludedKeyword> excluded;

  std::vector<std::string> slot_keywords() const;
  bool operator==(const MaskedCaption&) const = default;
};

/// Replaces keyword i with "[MASK]" at its first case-insensitive whole-word
/// occurrence at or after the end of slot i-1. Keywords without such an
/// occurrence are excluded (NotFound). Throws NothingToMask if no slot
/// remains.
MaskedCaption build_masked_caption(std::string_view caption,
                                   const std::vector<std::string>& keywords);

/// Inverse of masking: puts slot keywords back at the "[MASK]" positions.
std::string unmask(const MaskedCaption& masked);

struct GuessAlignment {
  std::vector<std::optional<std::string>> guesses;  // one per slot
  std::size_t discarded = 0;
  std::vector<std::string> warnings;
};

GuessAlignment align_guesses(std::string_view response, std::size_t slot_count);

/// Lowercases and trims punctuation from both ends of a guessed token.
std::string normalize_token(std::string_view token);

}  // namespace visil
