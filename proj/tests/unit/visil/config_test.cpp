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

#include <gtest/gtest.h>

#include <random>

#include "visil/config.hpp"

namespace visil {
namespace {

Json sample_value(const ConfigKey& key, std::mt19937_64& gen, int tag) {
  switch (key.type) {
    case ConfigType::kString:
      return key.name + "-" + std::to_string(tag);
    case ConfigType::kInt:
      return static_cast<std::int64_t>(gen() % 1000) + tag;
    case ConfigType::kDouble:
      return static_cast<double>(gen() % 1000) / 8.0 + tag;
    case ConfigType::kBool:
      return tag % 2 == 0;
  }
  return nullptr;
}

std::string env_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

// Each key independently present or absent in flags, file and env; the
// winner must be the highest-precedence source present.
TEST(Config, PrecedenceFuzz) {
  std::mt19937_64 gen(20261016);
  for (int trial = 0; trial < 300; ++trial) {
    Json flags = Json::object(), file = Json::object();
    std::map<std::string, std::string> env;
    Json expected = Json::object();
    std::map<std::string, ConfigSource> expected_src;
    for (const auto& key : config_keys()) {
      const bool in_flag = gen() % 3 == 0, in_file = gen() % 2 == 0;
      const bool in_env = !key.env.empty() && gen() % 2 == 0;
      Json fv = sample_value(key, gen, 1), filev = sample_value(key, gen, 2),
           ev = sample_value(key, gen, 3);
      if (in_flag) flags[key.name] = fv;
      if (in_file) file[key.name] = filev;
      if (in_env) env[key.env] = env_text(ev);
      if (in_flag) {
        expected[key.name] = fv;
        expected_src[key.name] = ConfigSource::kFlag;
      } else if (in_file) {
        expected[key.name] = filev;
        expected_src[key.name] = ConfigSource::kFile;
      } else if (in_env) {
        expected[key.name] = ev;
        expected_src[key.name] = ConfigSource::kEnv;
      } else {
        expected[key.name] = key.default_value;
        expected_src[key.name] = ConfigSource::kDefault;
      }
    }
    // Unrelated environment variables are ignored.
    env["VISIL_UNUSED"] = "x";
    auto r = resolve_config(flags, file, env);
    for (const auto& key : config_keys()) {
      ASSERT_EQ(r.sources.at(key.name), expected_src[key.name]) << key.name;
      if (key.type == ConfigType::kDouble) {
        ASSERT_EQ(r.values[key.name].get<double>(), expected[key.name].get<double>()) << key.name;
      } else {
        ASSERT_EQ(r.values[key.name], expected[key.name]) << key.name;
      }
    }
  }
}

TEST(Config, Defaults) {
  auto r = resolve_config(Json(), Json(), {});
  auto c = run_config_from(r.values);
  EXPECT_EQ(c.backend, BackendKind::kSynthetic);
  EXPECT_EQ(c.scoring.runs, 3);
  EXPECT_EQ(c.scoring.epsilon_floor, 1e-6);
  EXPECT_EQ(c.store_dir, "visil_store");
  EXPECT_EQ(c.dispatch.max_concurrent, 1);
  EXPECT_FALSE(c.dispatch.requests_per_minute.has_value());
  EXPECT_NO_THROW(c.validate());
  for (const auto& key : config_keys()) EXPECT_EQ(r.sources.at(key.name), ConfigSource::kDefault);
}

TEST(Config, Rejections) {
  auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kOk;
  };
  EXPECT_EQ(code([] { resolve_config(Json{{"nope", 1}}, Json(), {}); }), ErrorCode::kUsage);
  EXPECT_EQ(code([] { resolve_config(Json(), Json{{"seed", "7"}}, {}); }), ErrorCode::kUsage);
  EXPECT_EQ(code([] { resolve_config(Json{{"runs", 1.5}}, Json(), {}); }), ErrorCode::kUsage);
  EXPECT_EQ(code([] { resolve_config(Json::array(), Json(), {}); }), ErrorCode::kUsage);
  EXPECT_EQ(code([] { resolve_config(Json(), Json(), {{"VISIL_SEED", "7x"}}); }), ErrorCode::kUsage);
  EXPECT_EQ(code([] { resolve_config(Json(), Json(), {{"VISIL_JOBS", ""}}); }), ErrorCode::kUsage);
  // An integer is acceptable where a double is expected.
  EXPECT_EQ(resolve_config(Json{{"temperature", 1}}, Json(), {}).values["temperature"], 1.0);
  EXPECT_EQ(code([] { parse_backend("grpc"); }), ErrorCode::kUsage);

  auto validate = [&](const Json& flags, const std::map<std::string, std::string>& env = {}) {
    return code([&] { run_config_from(resolve_config(flags, Json(), env).values).validate(); });
  };
  EXPECT_EQ(validate({{"backend", "replay"}}), ErrorCode::kUsage);
  EXPECT_EQ(validate({{"backend", "replay"}, {"fixtures_dir", "f"}}), ErrorCode::kOk);
  EXPECT_EQ(validate({{"backend", "api"}, {"endpoint", "http://x"}}), ErrorCode::kUsage);
  EXPECT_EQ(validate({{"backend", "api"}, {"endpoint", "http://x"}}, {{"VISIL_API_KEY", "k"}}),
            ErrorCode::kOk);
  EXPECT_EQ(validate({{"jobs", 0}}), ErrorCode::kUsage);
  EXPECT_EQ(validate({{"runs", 0}}), ErrorCode::kUsage);
  EXPECT_EQ(validate({{"epsilon_floor", 0.0}}), ErrorCode::kUsage);
  EXPECT_EQ(validate({{"toy_p_hit", 0.1}, {"toy_p_miss", 0.9}}), ErrorCode::kUsage);
  EXPECT_EQ(validate({{"toy_p_hit", 0.6}, {"toy_p_miss", 0.3}}), ErrorCode::kOk);
  EXPECT_EQ(validate({{"media", "base64"}}), ErrorCode::kUsage);
  EXPECT_EQ(validate({{"evaluator", "m"}, {"summarizer", "m"}}), ErrorCode::kRoleViolation);
  EXPECT_EQ(validate({{"evaluator", "m"}, {"summarizer", "m"}, {"allow_shared_evaluator", true}}),
            ErrorCode::kOk);
}

TEST(Config, SecretsOmittedAndHashTracksValues) {
  auto a = resolve_config(Json{{"seed", 1}}, Json(), {{"VISIL_API_KEY", "secret-1"}});
  auto b = resolve_config(Json{{"seed", 1}}, Json(), {{"VISIL_API_KEY", "secret-2"}});
  auto c = resolve_config(Json{{"seed", 2}}, Json(), {});
  EXPECT_FALSE(public_config(a).contains("api_key"));
  EXPECT_EQ(public_config(a).size(), config_keys().size() - 1);
  EXPECT_EQ(a.values["api_key"], "secret-1");
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_NE(config_hash(a), config_hash(c));
  EXPECT_EQ(config_hash(a).size(), 64u);
}

TEST(Config, EnvParsing) {
  auto r = resolve_config(Json(), Json(),
                          {{"VISIL_SEED", "-4"}, {"VISIL_BACKEND", "replay"}, {"VISIL_JOBS", "8"}});
  EXPECT_EQ(r.values["seed"], -4);
  EXPECT_EQ(r.values["jobs"], 8);
  EXPECT_EQ(r.sources["backend"], ConfigSource::kEnv);
  auto c = run_config_from(r.values);
  EXPECT_EQ(c.scoring.seed, -4);
  EXPECT_EQ(c.world.seed, -4);
}

}  // namespace
}  // namespace visil
