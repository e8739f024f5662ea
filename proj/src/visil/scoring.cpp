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

#include "visil/scoring.hpp"

#include <cmath>
#include <functional>

#include "visil/dispatch.hpp"

namespace visil {

void ScoringConfig::validate() const {
  if (runs < 1) fail(ErrorCode::kInvalidArgument, "runs must be >= 1");
  if (!(epsilon_floor > 0.0 && epsilon_floor < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "epsilon_floor must lie in (0, 1)");
  }
  if (top_k < 1) fail(ErrorCode::kInvalidArgument, "top_k must be >= 1");
  if (call_concurrency < 0) fail(ErrorCode::kInvalidArgument, "call_concurrency must be >= 0");
}

double mean_of_logs(const std::vector<std::vector<double>>& logs, std::size_t column) {
  const double anchor = logs.front()[column];
  double shift = 0.0;
  for (std::size_t r = 1; r < logs.size(); ++r) shift += logs[r][column] - anchor;
  return anchor + shift / static_cast<double>(logs.size());
}

std::vector<double> geometric_mean_probs(const std::vector<std::vector<double>>& samples) {
  if (samples.empty()) fail(ErrorCode::kDomainError, "geometric mean needs at least one run");
  const std::size_t n = samples.front().size();
  std::vector<std::vector<double>> logs;
  logs.reserve(samples.size());
  for (const auto& row : samples) {
    if (row.size() != n) fail(ErrorCode::kDomainError, "ragged probability matrix");
    std::vector<double> lrow;
    lrow.reserve(n);
    for (double p : row) {
      if (!(p > 0.0 && p <= 1.0)) {
        fail(ErrorCode::kDomainError,
             "probabilities must lie in (0, 1]; apply the floor before averaging");
      }
      lrow.push_back(std::log(p));
    }
    logs.push_back(std::move(lrow));
  }
  std::vector<double> out(n);
  for (std::size_t c = 0; c < n; ++c) out[c] = std::exp(mean_of_logs(logs, c));
  return out;
}

namespace {

std::vector<KeywordScores> run_calls(const Backend& backend,
                                     const std::vector<const MediaContext*>& contexts,
                                     const MaskedCaption& masked, const ScoringConfig& cfg) {
  // contexts.size() * runs calls; call (c, r) uses seed + r.
  std::vector<std::function<KeywordScores()>> calls;
  for (const auto* ctx : contexts) {
    for (int r = 0; r < cfg.runs; ++r) {
      calls.emplace_back([&backend, ctx, &masked, seed = cfg.seed + r] {
        return backend.score_keywords(*ctx, masked, seed);
      });
    }
  }
  const int limit = cfg.call_concurrency > 0 ? cfg.call_concurrency
                                             : static_cast<int>(calls.size());
  auto outcomes = rate_limited_dispatch(calls, DispatchLimits{limit, std::nullopt});
  std::vector<KeywordScores> out;
  out.reserve(outcomes.size());
  for (auto& o : outcomes) {
    if (!o.ok()) fail(o.code, o.message);
    out.push_back(std::move(*o.value));
  }
  return out;
}

CaptionLogprob aggregate(const std::vector<KeywordScores>& runs, const MaskedCaption& masked,
                         const ScoringConfig& cfg) {
  const std::size_t n = masked.slots.size();
  const double floor_lp = std::log(cfg.epsilon_floor);
  CaptionLogprob out;
  for (const auto& run : runs) {
    if (run.logprobs.size() != n) {
      fail(ErrorCode::kBackendUnavailable, "backend returned " +
                                               std::to_string(run.logprobs.size()) +
                                               " scores for " + std::to_string(n) + " slots");
    }
    std::vector<double> row;
    row.reserve(n);
    bool all_floored = true;
    for (double lp : run.logprobs) {
      row.push_back(clamp_logprob(lp, cfg.epsilon_floor));
      all_floored = all_floored && row.back() == floor_lp;
    }
    if (all_floored || run.empty_recovery) ++out.floored_runs;
    if (run.usage.prompt_tokens && !out.prompt_tokens) out.prompt_tokens = run.usage.prompt_tokens;
    out.per_run.push_back(std::move(row));
  }
  out.per_keyword.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    out.per_keyword[c] = mean_of_logs(out.per_run, c);
    out.total += out.per_keyword[c];
  }
  return out;
}

void check_masked(const MaskedCaption& masked) {
  if (masked.slots.empty()) fail(ErrorCode::kNothingToMask, "masked caption has no slots");
}

}  // namespace

CaptionLogprob conditional_caption_logprob(const Backend& backend, const MediaContext& context,
                                           const MaskedCaption& masked,
                                           const ScoringConfig& cfg) {
  cfg.validate();
  check_masked(masked);
  context.validate();
  return aggregate(run_calls(backend, {&context}, masked, cfg), masked, cfg);
}

ScoreRecord visil_score(const Backend& backend, const MediaContext& video_ctx,
                        const MediaContext& summary_ctx, const MaskedCaption& masked,
                        const ScoringConfig& cfg, const std::string& summary_id) {
  cfg.validate();
  check_masked(masked);
  video_ctx.validate();
  summary_ctx.validate();
  if (!video_ctx.video_id.empty() && !summary_ctx.video_id.empty() &&
      video_ctx.video_id != summary_ctx.video_id) {
    fail(ErrorCode::kIdentityMismatch, "video context is '" + video_ctx.video_id +
                                           "' but summary context is '" +
                                           summary_ctx.video_id + "'");
  }
  auto calls = run_calls(backend, {&video_ctx, &summary_ctx}, masked, cfg);
  const auto runs = static_cast<std::size_t>(cfg.runs);
  std::vector<KeywordScores> v_runs(std::make_move_iterator(calls.begin()),
                                    std::make_move_iterator(calls.begin() + runs));
  std::vector<KeywordScores> s_runs(std::make_move_iterator(calls.begin() + runs),
                                    std::make_move_iterator(calls.end()));
  auto v = aggregate(v_runs, masked, cfg);
  auto s = aggregate(s_runs, masked, cfg);

  ScoreRecord rec;
  rec.video_id = !video_ctx.video_id.empty() ? video_ctx.video_id : summary_ctx.video_id;
  rec.summary_id = summary_id;
  rec.evaluator_model = backend.model_id();
  rec.runs = cfg.runs;
  rec.seed = cfg.seed;
  rec.keywords = masked.slot_keywords();
  rec.per_keyword_logp_video = std::move(v.per_run);
  rec.per_keyword_logp_summary = std::move(s.per_run);
  rec.logp_c_given_v = v.total;
  rec.logp_c_given_s = s.total;
  rec.visil = rec.logp_c_given_v - rec.logp_c_given_s;
  rec.excluded_keywords = static_cast<int>(masked.excluded.size());
  rec.floored_runs = v.floored_runs + s.floored_runs;
  return rec;
}

}  // namespace visil
