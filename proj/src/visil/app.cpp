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

#include "visil/app.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <set>

#include "visil/api.hpp"
#include "visil/dispatch.hpp"
#include "visil/harness.hpp"
#include "visil/io.hpp"
#include "visil/masking.hpp"
#include "visil/prompts.hpp"
#include "visil/scoring.hpp"
#include "visil/selection.hpp"
#include "visil/stats.hpp"
#include "visil/synthetic.hpp"
#include "visil/transport.hpp"

namespace visil {
namespace fs = std::filesystem;

namespace {

struct Failure {
  std::string item;
  ErrorCode code = ErrorCode::kOk;
  std::string message;
};

// Collects per-item failures; the first one that is not skippable fails the
// command after successful items have been written.
struct Ledger {
  std::vector<std::string> warnings;
  std::optional<Failure> first_error;
  std::size_t skipped = 0;

  template <typename T>
  void absorb(const std::string& item, const Outcome<T>& o, std::set<ErrorCode> skippable = {}) {
    if (o.ok()) return;
    ++skipped;
    warnings.push_back(item + ": " + std::string(error_name(o.code)) + ": " + o.message);
    if (!skippable.contains(o.code) && !first_error) first_error = Failure{item, o.code, o.message};
  }

  void raise_if_failed() const {
    if (first_error) {
      fail(first_error->code, first_error->item + ": " + first_error->message);
    }
  }
};

std::string arg_string(const Json& args, const char* key, std::string fallback = {}) {
  if (!args.contains(key) || args[key].is_null()) return fallback;
  if (!args[key].is_string()) fail(ErrorCode::kUsage, std::string(key) + " must be a string");
  return args[key].get<std::string>();
}

bool arg_bool(const Json& args, const char* key, bool fallback = false) {
  if (!args.contains(key) || args[key].is_null()) return fallback;
  if (!args[key].is_boolean()) fail(ErrorCode::kUsage, std::string(key) + " must be a boolean");
  return args[key].get<bool>();
}

std::int64_t arg_int(const Json& args, const char* key, std::int64_t fallback) {
  if (!args.contains(key) || args[key].is_null()) return fallback;
  if (!args[key].is_number_integer()) fail(ErrorCode::kUsage, std::string(key) + " must be an integer");
  return args[key].get<std::int64_t>();
}

std::vector<VideoRef> load_manifest(const Json& args) {
  const auto path = arg_string(args, "manifest");
  if (path.empty()) fail(ErrorCode::kUsage, "missing manifest (--manifest)");
  if (!fs::exists(path)) fail(ErrorCode::kUsage, "manifest not found: " + path);
  return parse_manifest(read_file(path));
}

std::map<std::string, VideoRef> index_videos(const std::vector<VideoRef>& videos) {
  std::map<std::string, VideoRef> out;
  for (const auto& v : videos) out.emplace(v.id, v);
  return out;
}

std::vector<SummaryFormat> parse_formats(const Json& args, std::vector<SummaryFormat> fallback) {
  if (!args.contains("formats") || args["formats"].is_null()) return fallback;
  if (!args["formats"].is_array()) fail(ErrorCode::kUsage, "formats must be a list");
  std::vector<SummaryFormat> out;
  for (const auto& f : args["formats"]) {
    if (!f.is_string()) fail(ErrorCode::kUsage, "formats must be strings");
    try {
      out.push_back(parse_format(f.get<std::string>()));
    } catch (const Error& e) {
      fail(ErrorCode::kUsage, e.what());
    }
  }
  if (out.empty()) fail(ErrorCode::kUsage, "formats is empty");
  return out;
}

template <typename T, typename Conv>
std::vector<T> read_store(const fs::path& path, Conv&& conv) {
  if (!fs::exists(path)) fail(ErrorCode::kIo, "missing input " + path.string());
  return parse_jsonl<T>(read_file(path), conv);
}

Json result(std::string_view command, std::vector<std::string> outputs, std::size_t count,
            const std::vector<std::string>& warnings) {
  return Json{{"command", command}, {"outputs", outputs}, {"count", count}, {"warnings", warnings}};
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"caption", "keywords", "summarize",
                                                 "score",   "vqa",      "correspond",
                                                 "select",  "stats",    "synth"};
  return names;
}

App::App(ResolvedConfig resolved)
    : resolved_(std::move(resolved)), config_(run_config_from(resolved_.values)) {
  config_.validate();
}

fs::path App::store(std::string_view name) const { return fs::path(config_.store_dir) / name; }

const Backend& App::backend(const std::string& model_id) {
  std::lock_guard lock(mu_);
  auto& slot = backends_[model_id];
  if (slot) return *slot;
  if (config_.backend == BackendKind::kSynthetic) {
    slot = std::make_unique<SyntheticBackend>(config_.world, model_id);
    return *slot;
  }
  if (!transport_) {
    switch (config_.backend) {
      case BackendKind::kReplay:
        transport_ = std::make_shared<ReplayTransport>(config_.fixtures_dir);
        break;
      case BackendKind::kRecord:
        transport_ = std::make_shared<RecordingTransport>(
            std::make_shared<HttpTransport>(config_.endpoint, config_.api_key, config_.timeout_s),
            config_.fixtures_dir);
        break;
      default:
        transport_ =
            std::make_shared<HttpTransport>(config_.endpoint, config_.api_key, config_.timeout_s);
        break;
    }
    if (config_.dispatch.requests_per_minute) {
      limiter_ = std::make_shared<RateLimiter>(*config_.dispatch.requests_per_minute);
    }
  }
  ApiOptions opt;
  opt.model_id = model_id;
  opt.temperature = config_.temperature;
  opt.top_k = config_.scoring.top_k;
  opt.epsilon_floor = config_.scoring.epsilon_floor;
  opt.retries = config_.retries;
  opt.backoff_base = std::chrono::milliseconds(
      config_.backend == BackendKind::kReplay ? 0 : config_.backoff_ms);
  opt.media = config_.media;
  opt.limiter = limiter_;
  slot = std::make_unique<ApiBackend>(transport_, opt);
  return *slot;
}

Json App::run(std::string_view command, const Json& args) {
  if (!args.is_null() && !args.is_object()) fail(ErrorCode::kUsage, "args must be a JSON object");
  const Json a = args.is_null() ? Json::object() : args;
  using Handler = Json (App::*)(const Json&);
  static const std::map<std::string, Handler, std::less<>> handlers = {
      {"caption", &App::cmd_caption},     {"keywords", &App::cmd_keywords},
      {"summarize", &App::cmd_summarize}, {"score", &App::cmd_score},
      {"vqa", &App::cmd_vqa},             {"correspond", &App::cmd_correspond},
      {"select", &App::cmd_select},       {"stats", &App::cmd_stats},
      {"synth", &App::cmd_synth}};
  auto it = handlers.find(command);
  if (it == handlers.end()) fail(ErrorCode::kUsage, "unknown command '" + std::string(command) + "'");

  Json entry{{"command", command},
             {"config_hash", config_hash(resolved_)},
             {"backend", backend_name(config_.backend)},
             {"roles", to_json(config_.roles)},
             {"seed", config_.seed},
             {"runs", config_.scoring.runs},
             {"args", a}};
  try {
    Json out = (this->*(it->second))(a);
    entry["status"] = "ok";
    append_line(store("run_manifest.jsonl"), entry.dump());
    return out;
  } catch (const Error& e) {
    entry["status"] = error_name(e.code());
    try {
      append_line(store("run_manifest.jsonl"), entry.dump());
    } catch (const std::exception&) {
      // The original error is the one worth reporting.
    }
    throw;
  }
}

// ---------------------------------------------------------------------------

Json App::cmd_caption(const Json& args) {
  const auto videos = load_manifest(args);
  const Backend& captioner = backend(config_.roles.captioner);
  const Backend& extractor = backend(config_.roles.keyword_extractor);
  std::vector<std::function<CaptionRecord()>> calls;
  for (const auto& v : videos) {
    calls.emplace_back([&, v] { return run_captioning(captioner, extractor, v, config_.seed); });
  }
  auto outcomes = rate_limited_dispatch(calls, {config_.dispatch.max_concurrent, std::nullopt});
  Ledger ledger;
  std::vector<CaptionRecord> captions;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    ledger.absorb(videos[i].id, outcomes[i], {ErrorCode::kCaptionUnavailable});
    if (outcomes[i].ok()) captions.push_back(*outcomes[i].value);
  }
  write_file_atomic(store("captions.jsonl"), to_jsonl(captions));
  ledger.raise_if_failed();
  return result("caption", {store("captions.jsonl").string()}, captions.size(), ledger.warnings);
}

Json App::cmd_keywords(const Json& /*args*/) {
  auto captions = read_store<CaptionRecord>(store("captions.jsonl"), caption_from_json);
  const Backend& extractor = backend(config_.roles.keyword_extractor);
  std::vector<std::function<KeywordList()>> calls;
  for (const auto& c : captions) {
    calls.emplace_back([&, c] {
      const MediaContext ctx{c.video_id, {TextPart{c.text}}};
      return parse_keywords(
          extractor.generate_text(ctx, prompt_text(PromptId::kKeywords), config_.seed,
                                  Task::kKeywords)
              .text);
    });
  }
  auto outcomes = rate_limited_dispatch(calls, {config_.dispatch.max_concurrent, std::nullopt});
  Ledger ledger;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    ledger.absorb(captions[i].video_id, outcomes[i]);
    if (!outcomes[i].ok()) continue;
    captions[i].keywords = outcomes[i].value->keywords;
    for (const auto& w : outcomes[i].value->warnings) {
      ledger.warnings.push_back(captions[i].video_id + ": " + w);
    }
  }
  ledger.raise_if_failed();
  write_file_atomic(store("captions.jsonl"), to_jsonl(captions));
  return result("keywords", {store("captions.jsonl").string()}, captions.size(), ledger.warnings);
}

Json App::cmd_summarize(const Json& args) {
  const auto videos = load_manifest(args);
  const auto fmts = parse_formats(args, {SummaryFormat::kTextOnly, SummaryFormat::kOneImage,
                                         SummaryFormat::kThreeImage, SummaryFormat::kFullVideo});
  const std::set<SummaryFormat> formats(fmts.begin(), fmts.end());
  const Backend& summarizer = backend(config_.roles.summarizer);
  const FrameResolver frames(config_.frame_extractor);
  std::vector<std::function<SummaryBatch()>> calls;
  for (const auto& v : videos) {
    calls.emplace_back(
        [&, v] { return build_summaries(summarizer, v, formats, config_.seed, frames); });
  }
  auto outcomes = rate_limited_dispatch(calls, {config_.dispatch.max_concurrent, std::nullopt});
  Ledger ledger;
  std::vector<SummaryRecord> summaries;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    ledger.absorb(videos[i].id, outcomes[i]);
    if (!outcomes[i].ok()) continue;
    for (auto& r : outcomes[i].value->records) summaries.push_back(std::move(r));
    for (auto& w : outcomes[i].value->warnings) ledger.warnings.push_back(std::move(w));
  }
  write_file_atomic(store("summaries.jsonl"), to_jsonl(summaries));
  ledger.raise_if_failed();
  return result("summarize", {store("summaries.jsonl").string()}, summaries.size(),
                ledger.warnings);
}

Json App::cmd_score(const Json& args) {
  const auto videos = index_videos(load_manifest(args));
  const auto captions = read_store<CaptionRecord>(store("captions.jsonl"), caption_from_json);
  const auto summaries = read_store<SummaryRecord>(store("summaries.jsonl"), summary_from_json);
  std::map<std::string, const CaptionRecord*> caption_of;
  for (const auto& c : captions) caption_of[c.video_id] = &c;

  const Backend& evaluator = backend(config_.roles.evaluator);
  ScoringConfig cfg = config_.scoring;
  cfg.call_concurrency = config_.dispatch.max_concurrent;

  Ledger ledger;
  std::vector<std::string> item_ids;
  std::vector<std::function<ScoreRecord()>> calls;
  for (const auto& s : summaries) {
    auto v = videos.find(s.video_id);
    auto c = caption_of.find(s.video_id);
    if (v == videos.end() || c == caption_of.end()) {
      ledger.warnings.push_back(s.summary_id + ": no " +
                                std::string(v == videos.end() ? "manifest entry" : "caption") +
                                "; skipped");
      continue;
    }
    item_ids.push_back(s.summary_id);
    calls.emplace_back([&, s, video = v->second, caption = c->second] {
      const auto masked = build_masked_caption(caption->text, caption->keywords);
      auto rec = visil_score(evaluator, video_context(video), summary_context(s, video), masked,
                             cfg, s.summary_id);
      rec.validate();
      return rec;
    });
  }
  auto outcomes = rate_limited_dispatch(calls, {config_.dispatch.max_concurrent, std::nullopt});
  std::vector<ScoreRecord> records;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    ledger.absorb(item_ids[i], outcomes[i], {ErrorCode::kNothingToMask});
    if (outcomes[i].ok()) records.push_back(*outcomes[i].value);
  }
  write_file_atomic(store("scores.jsonl"), serialize_records(records));
  ledger.raise_if_failed();
  return result("score", {store("scores.jsonl").string()}, records.size(), ledger.warnings);
}

Json App::cmd_vqa(const Json& args) {
  const auto videos = index_videos(load_manifest(args));
  const auto items_path = arg_string(args, "items");
  if (items_path.empty()) fail(ErrorCode::kUsage, "missing VQA items file (--items)");
  if (!fs::exists(items_path)) fail(ErrorCode::kUsage, "VQA items not found: " + items_path);
  const auto items = parse_vqa_items(read_file(items_path));
  const auto summaries = read_store<SummaryRecord>(store("summaries.jsonl"), summary_from_json);
  const Backend& answerer = backend(config_.roles.answerer);

  Ledger ledger;
  std::vector<std::string> item_ids;
  std::vector<std::function<VqaResult()>> calls;
  for (const auto& item : items) {
    auto v = videos.find(item.video_id);
    if (v == videos.end()) {
      ledger.warnings.push_back(item.item_id + ": video not in manifest; skipped");
      continue;
    }
    for (const auto& s : summaries) {
      if (s.video_id != item.video_id) continue;
      item_ids.push_back(item.item_id + "@" + s.summary_id);
      calls.emplace_back([&, item, s, video = v->second] {
        return run_vqa(answerer, item, s, video, config_.seed);
      });
    }
  }
  auto outcomes = rate_limited_dispatch(calls, {config_.dispatch.max_concurrent, std::nullopt});
  std::vector<VqaResult> results;
  std::map<std::string, std::pair<std::size_t, std::size_t>> by_format;
  std::size_t anomalies = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    ledger.absorb(item_ids[i], outcomes[i]);
    if (!outcomes[i].ok()) continue;
    const auto& r = *outcomes[i].value;
    auto& cell = by_format[std::string(format_name(r.format))];
    ++cell.first;
    if (r.correct) ++cell.second;
    if (r.anomaly) ++anomalies;
    results.push_back(r);
  }
  write_file_atomic(store("vqa.jsonl"), to_jsonl(results));
  ledger.raise_if_failed();
  Json out = result("vqa", {store("vqa.jsonl").string()}, results.size(), ledger.warnings);
  Json acc = Json::object();
  for (const auto& [f, c] : by_format) {
    acc[f] = {{"n", c.first}, {"correct", c.second},
              {"accuracy", static_cast<double>(c.second) / static_cast<double>(c.first)}};
  }
  out["accuracy"] = acc;
  out["anomalies"] = anomalies;
  return out;
}

Json App::cmd_correspond(const Json& args) {
  const auto manifest = load_manifest(args);
  const auto videos = index_videos(manifest);
  const auto summaries = read_store<SummaryRecord>(store("summaries.jsonl"), summary_from_json);
  const Backend& generator = backend(config_.roles.summarizer);
  const Backend& judge = backend(config_.roles.judge);

  // One batch per format, in manifest order, so visual rotation is stable.
  std::map<SummaryFormat, std::vector<SummaryRecord>> batches;
  for (const auto& v : manifest) {
    for (const auto& s : summaries) {
      if (s.video_id == v.id && s.format != SummaryFormat::kFullVideo) batches[s.format].push_back(s);
    }
  }
  Ledger ledger;
  std::vector<std::string> ids;
  std::vector<std::function<DistractorSet()>> gen_calls;
  for (const auto& [format, batch] : batches) {
    for (std::size_t i = 0; i < batch.size(); ++i) {
      ids.push_back(batch[i].summary_id);
      gen_calls.emplace_back(
          [&, i, b = &batch] { return make_distractors(generator, *b, i, config_.seed); });
    }
  }
  auto sets = rate_limited_dispatch(gen_calls, {config_.dispatch.max_concurrent, std::nullopt});
  std::vector<CorrespondenceItem> items;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    ledger.absorb(ids[i], sets[i]);
    if (!sets[i].ok()) continue;
    for (auto& w : sets[i].value->warnings) ledger.warnings.push_back(std::move(w));
    for (auto& it : sets[i].value->items) items.push_back(std::move(it));
  }

  std::vector<std::function<std::vector<CorrespondenceResult>()>> judge_calls;
  for (const auto& item : items) {
    judge_calls.emplace_back([&, item] {
      return run_correspondence(judge, videos.at(item.video_id), {item}, config_.seed);
    });
  }
  auto judged = rate_limited_dispatch(judge_calls, {config_.dispatch.max_concurrent, std::nullopt});
  std::vector<CorrespondenceResult> results;
  std::size_t anomalies = 0;
  for (std::size_t i = 0; i < judged.size(); ++i) {
    ledger.absorb(items[i].item_id, judged[i]);
    if (!judged[i].ok()) continue;
    for (auto& r : *judged[i].value) {
      if (r.anomaly) ++anomalies;
      results.push_back(std::move(r));
    }
  }
  Json cells = Json::array();
  for (const auto& c : correspondence_accuracy(results)) {
    cells.push_back({{"label", label_name(c.label)},
                     {"format", format_name(c.format)},
                     {"n", c.n},
                     {"correct", c.correct},
                     {"accuracy", c.accuracy()}});
  }
  write_file_atomic(store("correspondence_items.jsonl"), to_jsonl(items));
  write_file_atomic(store("correspondence.jsonl"), to_jsonl(results));
  write_file_atomic(store("correspondence_accuracy.json"), cells.dump(2) + "\n");
  ledger.raise_if_failed();
  Json out = result("correspond",
                    {store("correspondence_items.jsonl").string(),
                     store("correspondence.jsonl").string(),
                     store("correspondence_accuracy.json").string()},
                    results.size(), ledger.warnings);
  out["accuracy"] = cells;
  out["anomalies"] = anomalies;
  return out;
}

Json App::cmd_select(const Json& args) {
  const auto records = parse_records(read_file(store("scores.jsonl")));
  const auto summaries = read_store<SummaryRecord>(store("summaries.jsonl"), summary_from_json);
  std::vector<double> alphas;
  if (args.contains("alphas") && !args["alphas"].is_null()) {
    if (!args["alphas"].is_array()) fail(ErrorCode::kUsage, "alphas must be a list");
    for (const auto& a : args["alphas"]) {
      if (!a.is_number()) fail(ErrorCode::kUsage, "alphas must be numbers");
      alphas.push_back(a.get<double>());
    }
  }
  if (alphas.empty()) alphas.push_back(0.0);
  std::sort(alphas.begin(), alphas.end());
  alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());
  for (double a : alphas) {
    if (!(a >= 0.0)) fail(ErrorCode::kUsage, "alpha must be non-negative");
  }

  std::map<std::string, const SummaryRecord*> summary_of;
  for (const auto& s : summaries) summary_of[s.summary_id] = &s;

  // VQA accuracy per summary, when answers exist.
  std::map<std::string, std::pair<std::size_t, std::size_t>> vqa;
  if (fs::exists(store("vqa.jsonl"))) {
    for_each_jsonl(read_file(store("vqa.jsonl")), [&](const Json& j) {
      auto& c = vqa[j.at("summary_id").get<std::string>()];
      ++c.first;
      if (j.at("correct").get<bool>()) ++c.second;
    });
  }

  std::vector<std::string> order;
  std::map<std::string, std::vector<CandidatePoint>> by_video;
  std::set<std::string> seen;
  std::vector<std::string> warnings;
  for (const auto& r : records) {
    if (!seen.insert(r.summary_id).second) {
      fail(ErrorCode::kInvalidArgument, "summary '" + r.summary_id + "' is scored more than once");
    }
    auto s = summary_of.find(r.summary_id);
    if (s == summary_of.end()) {
      warnings.push_back(r.summary_id + ": no summary record; skipped");
      continue;
    }
    if (!by_video.contains(r.video_id)) order.push_back(r.video_id);
    by_video[r.video_id].push_back({r.summary_id, r.visil, s->second->token_cost});
  }

  Json videos = Json::array();
  std::string tsv = "video_id\tsummary_id\tformat\tvisil\ttoken_cost\ton_frontier\tvqa_accuracy\n";
  for (const auto& vid : order) {
    const auto& cands = by_video[vid];
    const auto frontier = pareto_frontier(cands);
    std::set<std::string> on_frontier;
    for (const auto& p : frontier) on_frontier.insert(p.summary_id);
    Json points = Json::array();
    auto sorted = cands;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
      return std::tie(a.token_cost, a.visil, a.summary_id) <
             std::tie(b.token_cost, b.visil, b.summary_id);
    });
    for (const auto& p : sorted) {
      Json pj = to_json(p);
      const auto fmt = format_name(summary_of.at(p.summary_id)->format);
      pj["format"] = fmt;
      pj["on_frontier"] = on_frontier.contains(p.summary_id);
      std::string acc_cell = "";
      if (auto it = vqa.find(p.summary_id); it != vqa.end()) {
        const double acc = static_cast<double>(it->second.second) / it->second.first;
        pj["vqa_accuracy"] = acc;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", acc);
        acc_cell = buf;
      }
      points.push_back(pj);
      char line[512];
      std::snprintf(line, sizeof line, "%s\t%s\t%.*s\t%.17g\t%lld\t%d\t%s\n", vid.c_str(),
                    p.summary_id.c_str(), static_cast<int>(fmt.size()), fmt.data(), p.visil,
                    static_cast<long long>(p.token_cost), on_frontier.contains(p.summary_id) ? 1 : 0,
                    acc_cell.c_str());
      tsv += line;
    }
    Json fr = Json::array();
    for (const auto& p : frontier) fr.push_back(to_json(p));
    Json sel = Json::array();
    for (const auto& [alpha, p] : alpha_sweep(cands, alphas)) {
      Json sj = to_json(p);
      sj["alpha"] = alpha;
      sel.push_back(sj);
    }
    videos.push_back({{"video_id", vid}, {"points", points}, {"frontier", fr}, {"selections", sel}});
  }
  write_file_atomic(store("frontier.json"), Json{{"alphas", alphas}, {"videos", videos}}.dump(2) + "\n");
  write_file_atomic(store("frontier.tsv"), tsv);
  Json out = result("select", {store("frontier.json").string(), store("frontier.tsv").string()},
                    order.size(), warnings);
  out["videos"] = videos;
  return out;
}

Json App::cmd_stats(const Json& args) {
  const auto records = parse_records(read_file(store("scores.jsonl")));
  std::vector<CorrectnessLabel> labels;
  std::string label_source = arg_string(args, "labels");
  if (label_source.empty() && fs::exists(store("correctness.json"))) {
    label_source = store("correctness.json").string();
  }
  if (!label_source.empty()) {
    if (!fs::exists(label_source)) fail(ErrorCode::kUsage, "labels not found: " + label_source);
    labels = parse_correctness(read_file(label_source));
  } else if (fs::exists(store("vqa.jsonl"))) {
    label_source = store("vqa.jsonl").string();
    for_each_jsonl(read_file(store("vqa.jsonl")), [&](const Json& j) {
      labels.push_back({j.at("video_id").get<std::string>(), j.at("summary_id").get<std::string>(),
                        j.at("correct").get<bool>() ? 1 : 0});
    });
  } else {
    fail(ErrorCode::kUsage, "no correctness labels: pass --labels or run vqa first");
  }
  const bool force = arg_bool(args, "force");
  const int shuffles = static_cast<int>(arg_int(args, "shuffles", kDefaultShuffles));
  const bool trim = arg_bool(args, "trim_extremes");

  // Rows: all records, then one per dataset tag when a manifest names several.
  std::vector<std::pair<std::string, std::vector<ScoreRecord>>> groups = {{"all", records}};
  if (!arg_string(args, "manifest").empty()) {
    std::map<std::string, std::string> tag_of;
    std::vector<std::string> tags;
    for (const auto& v : load_manifest(args)) {
      tag_of[v.id] = v.dataset_tag;
      if (std::find(tags.begin(), tags.end(), v.dataset_tag) == tags.end()) tags.push_back(v.dataset_tag);
    }
    if (tags.size() > 1) {
      for (const auto& t : tags) {
        std::vector<ScoreRecord> sub;
        for (const auto& r : records) {
          if (auto it = tag_of.find(r.video_id); it != tag_of.end() && it->second == t) sub.push_back(r);
        }
        groups.emplace_back(t.empty() ? "(untagged)" : t, std::move(sub));
      }
    }
  }

  std::vector<std::pair<std::string, StatReport>> rows;
  std::vector<std::string> warnings;
  for (const auto& [name, recs] : groups) {
    auto sample = pool_records(recs, labels, force);
    if (trim) sample = trim_extremes(sample);
    try {
      rows.emplace_back(name, build_report(sample, shuffles, config_.seed,
                                           config_.dispatch.max_concurrent));
    } catch (const Error& e) {
      if (name == "all") throw;
      warnings.push_back(name + ": " + std::string(error_name(e.code())) + ": " + e.what());
    }
  }
  Json jrows = Json::array();
  for (const auto& [name, r] : rows) {
    Json j = to_json(r);
    j["dataset"] = name;
    jrows.push_back(j);
  }
  Json doc{{"labels", label_source},
           {"trim_extremes", trim},
           {"forced", force},
           {"rows", jrows}};
  write_file_atomic(store("stats.json"), doc.dump(2) + "\n");
  Json out = result("stats", {store("stats.json").string()}, rows.front().second.n, warnings);
  out["rows"] = jrows;
  out["table"] = format_report_table(rows, shuffles);
  return out;
}

Json App::cmd_synth(const Json& args) {
  const int n = static_cast<int>(arg_int(args, "n_videos", 200));
  const auto formats = parse_formats(
      args, {SummaryFormat::kTextOnly, SummaryFormat::kOneImage, SummaryFormat::kThreeImage});
  std::map<SummaryFormat, double> coverage = {{SummaryFormat::kTextOnly, 0.2},
                                              {SummaryFormat::kOneImage, 0.5},
                                              {SummaryFormat::kThreeImage, 0.8}};
  if (args.contains("coverage") && !args["coverage"].is_null()) {
    if (!args["coverage"].is_object()) fail(ErrorCode::kUsage, "coverage must map format to fraction");
    for (const auto& [name, value] : args["coverage"].items()) {
      if (!value.is_number()) fail(ErrorCode::kUsage, "coverage values must be numbers");
      try {
        coverage[parse_format(name)] = value.get<double>();
      } catch (const Error& e) {
        fail(ErrorCode::kUsage, e.what());
      }
    }
  }
  ScoringConfig cfg = config_.scoring;
  cfg.call_concurrency = 1;
  ToyWorld world = config_.world;
  auto ex = synthetic_experiment(world, n, formats, coverage, config_.seed, cfg);
  for (auto& r : ex.records) r.evaluator_model = config_.roles.evaluator;

  Json manifest = Json::array();
  for (const auto& v : ex.videos) manifest.push_back(to_json(v));
  Json labels = Json::array();
  for (const auto& l : ex.labels) labels.push_back(to_json(l));
  write_file_atomic(store("manifest.json"), manifest.dump(2) + "\n");
  write_file_atomic(store("captions.jsonl"), to_jsonl(ex.captions));
  write_file_atomic(store("summaries.jsonl"), to_jsonl(ex.summaries));
  write_file_atomic(store("scores.jsonl"), serialize_records(ex.records));
  write_file_atomic(store("correctness.json"), labels.dump(2) + "\n");
  return result("synth",
                {store("manifest.json").string(), store("captions.jsonl").string(),
                 store("summaries.jsonl").string(), store("scores.jsonl").string(),
                 store("correctness.json").string()},
                ex.records.size(), {});
}

}  // namespace visil
