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

// Subcommands over a store directory. Each command reads its inputs from the
// store (plus explicit argument files), writes its outputs atomically, and
// appends one line to run_manifest.jsonl.
//
// Store layout:
//   captions.jsonl, summaries.jsonl, scores.jsonl, vqa.jsonl,
//   correspondence_items.jsonl, correspondence.jsonl, correspondence_accuracy.json,
//   frontier.json, frontier.tsv, stats.json, manifest.json and correctness.json
//   (synth only), run_manifest.jsonl.

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "visil/backend.hpp"
#include "visil/config.hpp"
#include "visil/dispatch.hpp"
#include "visil/transport.hpp"

namespace visil {

const std::vector<std::string>& command_names();

class App {
 public:
  /// Validates the configuration; throws Usage or RoleViolation.
  explicit App(ResolvedConfig resolved);

  const RunConfig& config() const { return config_; }
  const ResolvedConfig& resolved() const { return resolved_; }

  /// Runs one subcommand with its command-specific options (manifest, items,
  /// labels, formats, alphas, ...). Returns a JSON summary of what was written.
  Json run(std::string_view command, const Json& args);

 private:
  const Backend& backend(const std::string& model_id);
  std::filesystem::path store(std::string_view name) const;

  Json cmd_caption(const Json& args);
  Json cmd_keywords(const Json& args);
  Json cmd_summarize(const Json& args);
  Json cmd_score(const Json& args);
  Json cmd_vqa(const Json& args);
  Json cmd_correspond(const Json& args);
  Json cmd_select(const Json& args);
  Json cmd_stats(const Json& args);
  Json cmd_synth(const Json& args);

  ResolvedConfig resolved_;
  RunConfig config_;
  std::mutex mu_;
  std::map<std::string, std::unique_ptr<Backend>> backends_;
  std::shared_ptr<const Transport> transport_;
  std::shared_ptr<RateLimiter> limiter_;
};

}  // namespace visil
