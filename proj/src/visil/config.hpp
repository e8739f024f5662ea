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

// Run configuration. Every key resolves from exactly one source, in order of
// precedence: command-line flag, JSON config file, environment, default.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "visil/api.hpp"
#include "visil/scoring.hpp"
#include "visil/synthetic.hpp"

namespace visil {

enum class BackendKind { kApi, kReplay, kRecord, kSynthetic };

std::string_view backend_name(BackendKind kind);
BackendKind parse_backend(std::string_view name);

enum class ConfigType { kString, kInt, kDouble, kBool };

struct ConfigKey {
  std::string name;
  ConfigType type;
  Json default_value;
  std::string env;  // empty: not settable from the environment
  bool secret = false;
};

/// The recognised keys, in a fixed order.
const std::vector<ConfigKey>& config_keys();

enum class ConfigSource { kDefault, kEnv, kFile, kFlag };

std::string_view source_name(ConfigSource source);

struct ResolvedConfig {
  Json values;  // object with one entry per key
  std::map<std::string, ConfigSource> sources;
};

/// Unknown keys in `flags` or `file` throw Usage; values of the wrong type
/// throw Usage naming the source.
ResolvedConfig resolve_config(const Json& flags, const Json& file,
                              const std::map<std::string, std::string>& env);

struct RunConfig {
  BackendKind backend = BackendKind::kSynthetic;
  std::string endpoint;
  std::string api_key;
  ModelRoles roles;
  bool allow_shared_evaluator = false;
  ScoringConfig scoring;
  DispatchLimits dispatch;
  std::string fixtures_dir;
  std::string store_dir = "visil_store";
  std::int64_t seed = 0;
  ToyWorld world;
  int retries = 3;
  int backoff_ms = 1000;
  double temperature = 0.0;
  MediaEncoding media = MediaEncoding::kReference;
  int timeout_s = 120;
  std::optional<std::string> frame_extractor;

  /// Replay and record need fixtures_dir; api and record need an endpoint
  /// and a key; roles must respect evaluator separation.
  void validate() const;
};

RunConfig run_config_from(const Json& values);

/// Effective configuration with secrets removed.
Json public_config(const ResolvedConfig& resolved);

/// sha256 of the canonical public configuration.
std::string config_hash(const ResolvedConfig& resolved);

}  // namespace visil
