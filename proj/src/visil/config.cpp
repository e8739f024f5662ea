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

#include "visil/config.hpp"

#include <charconv>
#include <cmath>

#include "visil/io.hpp"

namespace visil {
namespace {

bool type_matches(ConfigType type, const Json& v) {
  switch (type) {
    case ConfigType::kString:
      return v.is_string();
    case ConfigType::kInt:
      return v.is_number_integer();
    case ConfigType::kDouble:
      return v.is_number();
    case ConfigType::kBool:
      return v.is_boolean();
  }
  return false;
}

Json parse_env_value(const ConfigKey& key, const std::string& raw) {
  auto bad = [&]() -> Json {
    fail(ErrorCode::kUsage, "environment variable " + key.env + "='" + raw + "' is not a valid " +
                                key.name);
  };
  switch (key.type) {
    case ConfigType::kString:
      return raw;
    case ConfigType::kInt: {
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
      if (ec != std::errc{} || p != raw.data() + raw.size()) return bad();
      return v;
    }
    case ConfigType::kDouble: {
      try {
        std::size_t used = 0;
        double v = std::stod(raw, &used);
        if (used != raw.size() || !std::isfinite(v)) return bad();
        return v;
      } catch (const std::exception&) {
        return bad();
      }
    }
    case ConfigType::kBool:
      if (raw == "1" || raw == "true") return true;
      if (raw == "0" || raw == "false") return false;
      return bad();
  }
  return bad();
}

void check_object(const Json& j, std::string_view what) {
  if (!j.is_null() && !j.is_object()) {
    fail(ErrorCode::kUsage, std::string(what) + " must be a JSON object");
  }
}

const ConfigKey* find_key(std::string_view name) {
  for (const auto& k : config_keys()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

}  // namespace

std::string_view backend_name(BackendKind kind) {
  switch (kind) {
    case BackendKind::kApi:
      return "api";
    case BackendKind::kReplay:
      return "replay";
    case BackendKind::kRecord:
      return "record";
    case BackendKind::kSynthetic:
      return "synthetic";
  }
  return "";
}

BackendKind parse_backend(std::string_view name) {
  for (auto k : {BackendKind::kApi, BackendKind::kReplay, BackendKind::kRecord,
                 BackendKind::kSynthetic}) {
    if (backend_name(k) == name) return k;
  }
  fail(ErrorCode::kUsage, "unknown backend '" + std::string(name) +
                              "' (expected api, replay, record or synthetic)");
}

std::string_view source_name(ConfigSource source) {
  switch (source) {
    case ConfigSource::kDefault:
      return "default";
    case ConfigSource::kEnv:
      return "env";
    case ConfigSource::kFile:
      return "file";
    case ConfigSource::kFlag:
      return "flag";
  }
  return "";
}

const std::vector<ConfigKey>& config_keys() {
  using T = ConfigType;
  static const std::vector<ConfigKey> keys = {
      {"backend", T::kString, "synthetic", "VISIL_BACKEND"},
      {"endpoint", T::kString, "", "VISIL_ENDPOINT"},
      {"api_key", T::kString, "", "VISIL_API_KEY", true},
      {"fixtures_dir", T::kString, "", "VISIL_FIXTURES_DIR"},
      {"store_dir", T::kString, "visil_store", "VISIL_STORE_DIR"},
      {"seed", T::kInt, 0, "VISIL_SEED"},
      {"jobs", T::kInt, 1, "VISIL_JOBS"},
      {"requests_per_minute", T::kInt, 0, ""},
      {"runs", T::kInt, 3, ""},
      {"epsilon_floor", T::kDouble, kDefaultEpsilonFloor, ""},
      {"top_k", T::kInt, kDefaultTopK, ""},
      {"retries", T::kInt, 3, ""},
      {"backoff_ms", T::kInt, 1000, ""},
      {"temperature", T::kDouble, 0.0, ""},
      {"timeout_s", T::kInt, 120, ""},
      {"media", T::kString, "reference", ""},
      {"frame_extractor", T::kString, "", ""},
      {"captioner", T::kString, "captioner", ""},
      {"keyword_extractor", T::kString, "keyword-extractor", ""},
      {"summarizer", T::kString, "summarizer", ""},
      {"evaluator", T::kString, "evaluator", ""},
      {"answerer", T::kString, "answerer", ""},
      {"judge", T::kString, "judge", ""},
      {"allow_shared_evaluator", T::kBool, false, ""},
      {"toy_facts", T::kInt, 10, ""},
      {"toy_p_hit", T::kDouble, 0.9, ""},
      {"toy_p_miss", T::kDouble, 0.1, ""},
  };
  return keys;
}

ResolvedConfig resolve_config(const Json& flags, const Json& file,
                              const std::map<std::string, std::string>& env) {
  check_object(flags, "flags");
  check_object(file, "config file");
  for (const auto* src : {&flags, &file}) {
    if (src->is_null()) continue;
    for (const auto& [name, value] : src->items()) {
      const ConfigKey* key = find_key(name);
      const char* where = src == &flags ? "flag" : "config file";
      if (!key) fail(ErrorCode::kUsage, std::string("unknown ") + where + " key '" + name + "'");
      if (!type_matches(key->type, value)) {
        fail(ErrorCode::kUsage, std::string(where) + " value for '" + name + "' has the wrong type");
      }
    }
  }
  ResolvedConfig out;
  out.values = Json::object();
  for (const auto& key : config_keys()) {
    Json value = key.default_value;
    ConfigSource source = ConfigSource::kDefault;
    if (flags.is_object() && flags.contains(key.name)) {
      value = flags[key.name];
      source = ConfigSource::kFlag;
    } else if (file.is_object() && file.contains(key.name)) {
      value = file[key.name];
      source = ConfigSource::kFile;
    } else if (!key.env.empty()) {
      if (auto it = env.find(key.env); it != env.end()) {
        value = parse_env_value(key, it->second);
        source = ConfigSource::kEnv;
      }
    }
    if (key.type == ConfigType::kDouble) value = value.get<double>();
    out.values[key.name] = std::move(value);
    out.sources[key.name] = source;
  }
  return out;
}

void RunConfig::validate() const {
  if (backend == BackendKind::kReplay || backend == BackendKind::kRecord) {
    if (fixtures_dir.empty()) {
      fail(ErrorCode::kUsage, std::string(backend_name(backend)) + " backend needs fixtures_dir");
    }
  }
  if (backend == BackendKind::kApi || backend == BackendKind::kRecord) {
    if (endpoint.empty()) fail(ErrorCode::kUsage, "api backend needs an endpoint");
    if (api_key.empty()) fail(ErrorCode::kUsage, "api backend needs VISIL_API_KEY");
  }
  if (store_dir.empty()) fail(ErrorCode::kUsage, "store_dir is empty");
  if (dispatch.max_concurrent < 1) fail(ErrorCode::kUsage, "jobs must be >= 1");
  if (retries < 0 || backoff_ms < 0 || timeout_s <= 0) {
    fail(ErrorCode::kUsage, "retries and backoff_ms must be >= 0, timeout_s > 0");
  }
  try {
    scoring.validate();
    world.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kUsage, e.what());
  }
  roles.validate(allow_shared_evaluator);
}

RunConfig run_config_from(const Json& v) {
  RunConfig c;
  c.backend = parse_backend(v.at("backend").get<std::string>());
  c.endpoint = v.at("endpoint").get<std::string>();
  c.api_key = v.at("api_key").get<std::string>();
  c.fixtures_dir = v.at("fixtures_dir").get<std::string>();
  c.store_dir = v.at("store_dir").get<std::string>();
  c.seed = v.at("seed").get<std::int64_t>();
  c.dispatch.max_concurrent = v.at("jobs").get<int>();
  if (int rpm = v.at("requests_per_minute").get<int>(); rpm > 0) c.dispatch.requests_per_minute = rpm;
  c.scoring.runs = v.at("runs").get<int>();
  c.scoring.seed = c.seed;
  c.scoring.epsilon_floor = v.at("epsilon_floor").get<double>();
  c.scoring.top_k = v.at("top_k").get<int>();
  c.retries = v.at("retries").get<int>();
  c.backoff_ms = v.at("backoff_ms").get<int>();
  c.temperature = v.at("temperature").get<double>();
  c.timeout_s = v.at("timeout_s").get<int>();
  const auto media = v.at("media").get<std::string>();
  if (media == "reference") c.media = MediaEncoding::kReference;
  else if (media == "inline") c.media = MediaEncoding::kInline;
  else fail(ErrorCode::kUsage, "media must be 'reference' or 'inline'");
  if (auto fx = v.at("frame_extractor").get<std::string>(); !fx.empty()) c.frame_extractor = fx;
  c.roles.captioner = v.at("captioner").get<std::string>();
  c.roles.keyword_extractor = v.at("keyword_extractor").get<std::string>();
  c.roles.summarizer = v.at("summarizer").get<std::string>();
  c.roles.evaluator = v.at("evaluator").get<std::string>();
  c.roles.answerer = v.at("answerer").get<std::string>();
  c.roles.judge = v.at("judge").get<std::string>();
  c.allow_shared_evaluator = v.at("allow_shared_evaluator").get<bool>();
  c.world.facts_per_video = v.at("toy_facts").get<int>();
  c.world.p_hit = v.at("toy_p_hit").get<double>();
  c.world.p_miss = v.at("toy_p_miss").get<double>();
  c.world.seed = c.seed;
  return c;
}

Json public_config(const ResolvedConfig& resolved) {
  Json out = Json::object();
  for (const auto& key : config_keys()) {
    if (key.secret) continue;
    out[key.name] = resolved.values.at(key.name);
  }
  return out;
}

std::string config_hash(const ResolvedConfig& resolved) {
  return sha256_hex(public_config(resolved).dump());
}

}  // namespace visil
