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

// visil command-line front end. Exit status: 0 success, 2 usage error,
// 1 any other failure. Failures print {"error": {...}} on stderr.

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "visil/visil.h"

namespace {

using Json = nlohmann::json;

struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> strings;
  std::map<std::string, std::int64_t> ints;
  std::map<std::string, double> doubles;
  bool allow_shared_evaluator = false;
  std::vector<std::pair<std::string, CLI::Option*>> options;
};

void add_config_flags(CLI::App& app, ConfigFlags& f) {
  app.add_option("--config", f.config_path, "JSON config file (flags override it)");
  auto str = [&](const char* flag, const char* key, const char* help) {
    f.options.emplace_back(key, app.add_option(flag, f.strings[key], help));
  };
  auto integer = [&](const char* flag, const char* key, const char* help) {
    f.options.emplace_back(key, app.add_option(flag, f.ints[key], help));
  };
  auto real = [&](const char* flag, const char* key, const char* help) {
    f.options.emplace_back(key, app.add_option(flag, f.doubles[key], help));
  };
  str("--backend", "backend", "api | replay | record | synthetic [env VISIL_BACKEND]");
  str("--endpoint", "endpoint", "chat-completions URL [env VISIL_ENDPOINT]");
  str("--fixtures-dir", "fixtures_dir", "fixture directory for replay/record [env VISIL_FIXTURES_DIR]");
  str("--store-dir", "store_dir", "output store directory [env VISIL_STORE_DIR]");
  integer("--seed", "seed", "base seed [env VISIL_SEED]");
  integer("--jobs", "jobs", "concurrent items [env VISIL_JOBS]");
  integer("--rpm", "requests_per_minute", "request rate cap, 0 = none");
  integer("--runs", "runs", "repeated scoring runs");
  real("--epsilon-floor", "epsilon_floor", "probability floor");
  integer("--top-k", "top_k", "top_logprobs requested");
  integer("--retries", "retries", "retries after the first attempt");
  integer("--backoff-ms", "backoff_ms", "initial retry backoff");
  real("--temperature", "temperature", "sampling temperature");
  integer("--timeout", "timeout_s", "HTTP timeout in seconds");
  str("--media", "media", "reference | inline");
  str("--frame-extractor", "frame_extractor",
      "command template with {video} {index} {seconds} {output}");
  str("--captioner", "captioner", "captioner model id");
  str("--keyword-extractor", "keyword_extractor", "keyword extractor model id");
  str("--summarizer", "summarizer", "summarizer model id");
  str("--evaluator", "evaluator", "evaluator model id");
  str("--answerer", "answerer", "VQA answerer model id");
  str("--judge", "judge", "correspondence judge model id");
  f.options.emplace_back("allow_shared_evaluator",
                         app.add_flag("--allow-shared-evaluator", f.allow_shared_evaluator,
                                      "let the evaluator share a model with generators"));
  integer("--toy-facts", "toy_facts", "synthetic facts per video");
  real("--toy-p-hit", "toy_p_hit", "synthetic P(keyword | fact visible)");
  real("--toy-p-miss", "toy_p_miss", "synthetic P(keyword | fact hidden)");
}

Json collect_flags(const ConfigFlags& f) {
  Json flags = Json::object();
  for (const auto& [key, opt] : f.options) {
    if (opt->count() == 0) continue;
    if (key == "allow_shared_evaluator") {
      flags[key] = f.allow_shared_evaluator;
    } else if (auto s = f.strings.find(key); s != f.strings.end()) {
      flags[key] = s->second;
    } else if (auto i = f.ints.find(key); i != f.ints.end()) {
      flags[key] = i->second;
    } else if (auto d = f.doubles.find(key); d != f.doubles.end()) {
      flags[key] = d->second;
    }
  }
  return flags;
}

void print_error(int code, const std::string& name, const std::string& message) {
  std::cerr << Json{{"error", {{"code", code}, {"name", name}, {"message", message}}}}.dump()
            << "\n";
}

int exit_code(visil_status st) {
  return st == VISIL_E_USAGE || st == VISIL_E_ROLE_VIOLATION ? 2 : 1;
}

int report_failure(visil_status st) {
  std::cerr << Json{{"error", Json::parse(visil_last_error())}}.dump() << "\n";
  return exit_code(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"visil: information-loss scoring for video summaries"};
  app.require_subcommand(1);
  app.fallthrough();
  ConfigFlags cfg;
  add_config_flags(app, cfg);

  std::string manifest, items, labels;
  std::vector<std::string> formats, coverage;
  std::vector<double> alphas;
  bool force = false, trim = false, table = false;
  std::int64_t shuffles = 10000, n_videos = 200;

  auto with_manifest = [&](CLI::App* sub) {
    sub->add_option("--manifest", manifest, "dataset manifest (JSON array of videos)");
  };
  auto* caption = app.add_subcommand("caption", "caption videos and extract keywords");
  with_manifest(caption);
  app.add_subcommand("keywords", "re-extract keywords from stored captions");
  auto* summarize = app.add_subcommand("summarize", "build summaries in each format");
  with_manifest(summarize);
  summarize->add_option("--formats", formats, "text_only one_image three_image full_video");
  auto* score = app.add_subcommand("score", "score stored summaries against captions");
  with_manifest(score);
  auto* vqa = app.add_subcommand("vqa", "answer multiple-choice questions from summaries");
  with_manifest(vqa);
  vqa->add_option("--items", items, "VQA items (JSON array)");
  auto* correspond = app.add_subcommand("correspond", "run the distractor correspondence test");
  with_manifest(correspond);
  auto* select = app.add_subcommand("select", "Pareto frontier and alpha selection");
  select->add_option("--alpha", alphas, "trade-off weight(s) per token");
  auto* stats = app.add_subcommand("stats", "regress task correctness on scores");
  with_manifest(stats);
  stats->add_option("--labels", labels, "correctness labels (JSON array)");
  stats->add_flag("--force", force, "pool records from different evaluator models");
  stats->add_option("--shuffles", shuffles, "permutation shuffles");
  stats->add_flag("--trim-extremes", trim, "drop the highest and lowest score");
  stats->add_flag("--table", table, "print a text table instead of JSON");
  auto* synth = app.add_subcommand("synth", "generate and score a synthetic experiment");
  synth->add_option("--n-videos", n_videos, "number of toy videos");
  synth->add_option("--formats", formats, "formats assigned round-robin");
  synth->add_option("--coverage", coverage, "format=fraction (repeatable)");
  app.add_subcommand("config", "print the effective configuration and its sources");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error(VISIL_E_USAGE, visil_status_name(VISIL_E_USAGE), e.what());
    return 2;
  }

  Json opts{{"flags", collect_flags(cfg)}};
  if (!cfg.config_path.empty()) opts["config_path"] = cfg.config_path;
  visil_session* session = nullptr;
  if (auto st = visil_session_create(opts.dump().c_str(), &session); st != VISIL_OK) {
    return report_failure(st);
  }

  const std::string command = app.get_subcommands().front()->get_name();
  char* out = nullptr;
  visil_status st = VISIL_OK;
  if (command == "config") {
    st = visil_session_config(session, &out);
  } else {
    Json args = Json::object();
    if (!manifest.empty()) args["manifest"] = manifest;
    if (!items.empty()) args["items"] = items;
    if (!labels.empty()) args["labels"] = labels;
    if (!formats.empty()) args["formats"] = formats;
    if (!alphas.empty()) args["alphas"] = alphas;
    if (command == "stats") {
      args["force"] = force;
      args["shuffles"] = shuffles;
      args["trim_extremes"] = trim;
    }
    if (command == "synth") {
      args["n_videos"] = n_videos;
      if (!coverage.empty()) {
        Json cov = Json::object();
        for (const auto& c : coverage) {
          auto eq = c.find('=');
          try {
            if (eq == std::string::npos) throw std::invalid_argument(c);
            cov[c.substr(0, eq)] = std::stod(c.substr(eq + 1));
          } catch (const std::exception&) {
            print_error(VISIL_E_USAGE, visil_status_name(VISIL_E_USAGE), "--coverage expects format=fraction, got '" + c + "'");
            visil_session_destroy(session);
            return 2;
          }
        }
        args["coverage"] = cov;
      }
    }
    st = visil_run(session, command.c_str(), args.dump().c_str(), &out);
  }
  visil_session_destroy(session);
  if (st != VISIL_OK) return report_failure(st);

  Json result = Json::parse(out);
  visil_string_free(out);
  if (command == "stats" && table) {
    std::cout << result.at("table").get<std::string>();
  } else {
    std::cout << result.dump(2) << "\n";
  }
  return 0;
}
