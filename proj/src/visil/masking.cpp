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

#include "visil/masking.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "visil/prompts.hpp"

namespace visil {
namespace {

char lower(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

bool space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Bytes >= 0x80 belong to multi-byte UTF-8 letters and count as word bytes.
bool word_byte(char c) {
  auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u) || c == '_';
}

bool matches_at(std::string_view text, std::size_t pos, std::string_view keyword) {
  if (pos + keyword.size() > text.size()) return false;
  for (std::size_t i = 0; i < keyword.size(); ++i) {
    if (lower(text[pos + i]) != lower(keyword[i])) return false;
  }
  bool left_ok = pos == 0 || !word_byte(text[pos - 1]);
  std::size_t after = pos + keyword.size();
  bool right_ok = after == text.size() || !word_byte(text[after]);
  return left_ok && right_ok;
}

}  // namespace

std::string_view strip_code_fence(std::string_view s) {
  auto trim = [](std::string_view v) {
    while (!v.empty() && space(v.front())) v.remove_prefix(1);
    while (!v.empty() && space(v.back())) v.remove_suffix(1);
    return v;
  };
  s = trim(s);
  if (s.rfind("```", 0) == 0) {
    auto nl = s.find('\n');
    s = nl == std::string_view::npos ? std::string_view{} : s.substr(nl + 1);
    auto close = s.rfind("```");
    if (close != std::string_view::npos) s = s.substr(0, close);
  }
  return trim(s);
}

KeywordList parse_keywords(std::string_view raw) {
  Json j;
  try {
    j = Json::parse(strip_code_fence(raw));
  } catch (const Json::exception& e) {
    fail(ErrorCode::kKeywordParseError, std::string("keyword list is not JSON: ") + e.what());
  }
  if (!j.is_array()) fail(ErrorCode::kKeywordParseError, "keyword list is not a JSON array");

  KeywordList out;
  std::set<std::string> seen;
  for (const auto& item : j) {
    if (!item.is_string()) {
      fail(ErrorCode::kKeywordParseError, "keyword list contains a non-string entry");
    }
    std::string word = item.get<std::string>();
    std::transform(word.begin(), word.end(), word.begin(), lower);
    if (word.empty() || std::any_of(word.begin(), word.end(), space)) {
      out.warnings.push_back("dropped non-single-word keyword '" + word + "'");
      continue;
    }
    if (word == "video") continue;
    if (!seen.insert(word).second) continue;
    if (out.keywords.size() == kMaxKeywords) {
      out.warnings.push_back("truncated keyword list to 20 entries");
      break;
    }
    out.keywords.push_back(std::move(word));
  }
  return out;
}

std::vector<std::string> MaskedCaption::slot_keywords() const {
  std::vector<std::string> out;
  out.reserve(slots.size());
  for (const auto& s : slots) out.push_back(s.keyword);
  return out;
}

MaskedCaption build_masked_caption(std::string_view caption,
                                   const std::vector<std::string>& keywords) {
  MaskedCaption mc;
  mc.original_text = std::string(caption);
  std::size_t cursor = 0;
  for (const auto& kw : keywords) {
    std::optional<std::size_t> hit;
    if (!kw.empty()) {
      for (std::size_t pos = cursor; pos + kw.size() <= caption.size(); ++pos) {
        if (matches_at(caption, pos, kw)) {
          hit = pos;
          break;
        }
      }
    }
    if (!hit) {
      mc.excluded.push_back({kw, ExclusionReason::kNotFound});
      continue;
    }
    mc.slots.push_back({kw, {*hit, *hit + kw.size()}});
    cursor = *hit + kw.size();
  }
  if (mc.slots.empty()) {
    fail(ErrorCode::kNothingToMask, "no keyword occurs in the caption");
  }
  std::size_t prev = 0;
  for (const auto& slot : mc.slots) {
    mc.masked_text.append(caption.substr(prev, slot.span.begin - prev));
    mc.masked_text.append(kMaskSentinel);
    prev = slot.span.end;
  }
  mc.masked_text.append(caption.substr(prev));
  return mc;
}

std::string unmask(const MaskedCaption& masked) {
  std::string out;
  std::size_t prev = 0;
  std::size_t slot = 0;
  const std::string& text = masked.masked_text;
  while (slot < masked.slots.size()) {
    auto pos = text.find(kMaskSentinel, prev);
    if (pos == std::string::npos) break;
    out.append(text, prev, pos - prev);
    out += masked.slots[slot++].keyword;
    prev = pos + kMaskSentinel.size();
  }
  out.append(text, prev, std::string::npos);
  return out;
}

std::string normalize_token(std::string_view token) {
  auto is_trim = [](char c) {
    auto u = static_cast<unsigned char>(c);
    return space(c) || (u < 0x80 && std::ispunct(u) && c != '_');
  };
  while (!token.empty() && is_trim(token.front())) token.remove_prefix(1);
  while (!token.empty() && is_trim(token.back())) token.remove_suffix(1);
  std::string out(token);
  std::transform(out.begin(), out.end(), out.begin(), lower);
  return out;
}

GuessAlignment align_guesses(std::string_view response, std::size_t slot_count) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < response.size()) {
    while (i < response.size() && space(response[i])) ++i;
    std::size_t start = i;
    while (i < response.size() && !space(response[i])) ++i;
    if (i > start) words.emplace_back(response.substr(start, i - start));
  }
  GuessAlignment out;
  out.guesses.resize(slot_count);
  for (std::size_t k = 0; k < std::min(words.size(), slot_count); ++k) {
    out.guesses[k] = words[k];
  }
  if (words.size() > slot_count) {
    out.discarded = words.size() - slot_count;
    out.warnings.push_back("discarded " + std::to_string(out.discarded) + " surplus guesses");
  } else if (words.size() < slot_count) {
    out.warnings.push_back(std::to_string(slot_count - words.size()) +
                           " slots received no guess");
  }
  return out;
}

}  // namespace visil
