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

#include "visil/visil.h"

#include <cstdlib>
#include <cstring>
#include <map>
#include <memory>
#include <string>

#include "visil/app.hpp"
#include "visil/harness.hpp"
#include "visil/io.hpp"
#include "visil/masking.hpp"
#include "visil/prompts.hpp"

extern "C" char** environ;

struct visil_session {
  std::unique_ptr<visil::App> app;
};

namespace {

thread_local std::string g_last_error = "{}";

void set_error(visil::ErrorCode code, const std::string& message) {
  g_last_error = visil::Json{{"code", static_cast<int>(code)},
                             {"name", visil::error_name(code)},
                             {"message", message}}
                     .dump();
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
visil_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error = "{}";
    return VISIL_OK;
  } catch (const visil::Error& e) {
    set_error(e.code(), e.what());
    return static_cast<visil_status>(e.code());
  } catch (const visil::Json::exception& e) {
    set_error(visil::ErrorCode::kParseError, e.what());
    return VISIL_E_PARSE;
  } catch (const std::exception& e) {
    set_error(visil::ErrorCode::kInternal, e.what());
    return VISIL_E_INTERNAL;
  } catch (...) {
    set_error(visil::ErrorCode::kInternal, "unknown exception");
    return VISIL_E_INTERNAL;
  }
}

visil::Json parse_json_arg(const char* text, const char* what) {
  if (!text) return visil::Json();
  try {
    return visil::Json::parse(text);
  } catch (const visil::Json::exception& e) {
    visil::fail(visil::ErrorCode::kUsage, std::string(what) + " is not valid JSON: " + e.what());
  }
}

std::map<std::string, std::string> process_env() {
  std::map<std::string, std::string> out;
  for (char** e = environ; e && *e; ++e) {
    std::string kv = *e;
    auto eq = kv.find('=');
    if (eq == std::string::npos || kv.rfind("VISIL_", 0) != 0) continue;
    out[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return out;
}

}  // namespace

extern "C" {

int visil_abi_version(void) { return VISIL_ABI_VERSION; }

const char* visil_status_name(visil_status status) {
  static thread_local std::string name;
  name = std::string(visil::error_name(static_cast<visil::ErrorCode>(status)));
  return name.c_str();
}

const char* visil_last_error(void) { return g_last_error.c_str(); }

void visil_string_free(char* s) { std::free(s); }

visil_status visil_session_create(const char* options_json, visil_session** out) {
  return guarded([&] {
    if (!out) visil::fail(visil::ErrorCode::kInvalidArgument, "out is NULL");
    *out = nullptr;
    const visil::Json opts = parse_json_arg(options_json, "session options");
    if (!opts.is_null() && !opts.is_object()) {
      visil::fail(visil::ErrorCode::kUsage, "session options must be a JSON object");
    }
    visil::Json flags = opts.value("flags", visil::Json::object());
    visil::Json file;
    if (opts.contains("config_path") && !opts["config_path"].is_null()) {
      const auto path = opts["config_path"].get<std::string>();
      std::string text;
      try {
        text = visil::read_file(path);
      } catch (const visil::Error& e) {
        visil::fail(visil::ErrorCode::kUsage, e.what());
      }
      file = parse_json_arg(text.c_str(), "config file");
    }
    std::map<std::string, std::string> env;
    if (opts.contains("env")) {
      env = opts["env"].get<std::map<std::string, std::string>>();
    } else {
      env = process_env();
    }
    auto session = std::make_unique<visil_session>();
    session->app = std::make_unique<visil::App>(visil::resolve_config(flags, file, env));
    *out = session.release();
  });
}

void visil_session_destroy(visil_session* session) { delete session; }

visil_status visil_session_config(const visil_session* session, char** out_json) {
  return guarded([&] {
    if (!session || !out_json) visil::fail(visil::ErrorCode::kInvalidArgument, "NULL argument");
    const auto& r = session->app->resolved();
    visil::Json sources = visil::Json::object();
    for (const auto& key : visil::config_keys()) {
      sources[key.name] = visil::source_name(r.sources.at(key.name));
    }
    visil::Json doc{{"values", visil::public_config(r)},
                    {"sources", sources},
                    {"hash", visil::config_hash(r)}};
    *out_json = dup_string(doc.dump());
  });
}

visil_status visil_run(visil_session* session, const char* command, const char* args_json,
                       char** out_json) {
  return guarded([&] {
    if (!session || !command || !out_json) {
      visil::fail(visil::ErrorCode::kInvalidArgument, "NULL argument");
    }
    *out_json = nullptr;
    auto result = session->app->run(command, parse_json_arg(args_json, "args"));
    *out_json = dup_string(result.dump());
  });
}

const char* visil_prompt(const char* name) {
  if (!name) return nullptr;
  for (auto id : visil::all_prompt_ids()) {
    if (visil::prompt_name(id) == name) return visil::prompt_text(id).data();
  }
  return nullptr;
}

visil_status visil_parse_timecode(const char* timecode, double fps, int64_t* out_index) {
  return guarded([&] {
    if (!timecode || !out_index) visil::fail(visil::ErrorCode::kInvalidArgument, "NULL argument");
    *out_index = visil::parse_timecode(timecode, fps);
  });
}

visil_status visil_parse_keywords(const char* response, char** out_json) {
  return guarded([&] {
    if (!response || !out_json) visil::fail(visil::ErrorCode::kInvalidArgument, "NULL argument");
    auto kl = visil::parse_keywords(response);
    *out_json = dup_string(visil::Json{{"keywords", kl.keywords}, {"warnings", kl.warnings}}.dump());
  });
}

}  // extern "C"
