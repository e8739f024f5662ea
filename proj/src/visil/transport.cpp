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

#include "visil/transport.hpp"

#include "httplib.h"

#include "visil/io.hpp"

namespace visil {

namespace fs = std::filesystem;

HttpTransport::HttpTransport(std::string endpoint, std::string api_key, int timeout_s)
    : api_key_(std::move(api_key)), timeout_s_(timeout_s) {
  auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    fail(ErrorCode::kInvalidArgument, "endpoint must be an absolute URL: " + endpoint);
  }
  auto path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    base_ = endpoint;
    path_ = "/";
  } else {
    base_ = endpoint.substr(0, path_start);
    path_ = endpoint.substr(path_start);
  }
}

HttpResult HttpTransport::post(const Json& payload) const {
  httplib::Client client(base_);
  client.set_connection_timeout(timeout_s_, 0);
  client.set_read_timeout(timeout_s_, 0);
  client.set_write_timeout(timeout_s_, 0);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  auto res = client.Post(path_, headers, payload.dump(), "application/json");
  if (!res) {
    fail(ErrorCode::kBackendUnavailable,
         "request to " + base_ + path_ + " failed: " + httplib::to_string(res.error()));
  }
  return HttpResult{res->status, res->body};
}

std::string fixture_key(const Json& payload) {
  Json key{{"model_id", payload.value("model", "")},
           {"payload", payload},
           {"seed", payload.contains("seed") ? payload["seed"] : Json()}};
  return sha256_hex(key.dump());
}

fs::path fixture_path(const fs::path& dir, const Json& payload) {
  return dir / (fixture_key(payload) + ".json");
}

ReplayTransport::ReplayTransport(fs::path dir) : dir_(std::move(dir)) {}

HttpResult ReplayTransport::post(const Json& payload) const {
  const auto key = fixture_key(payload);
  const auto path = dir_ / (key + ".json");
  if (!fs::exists(path)) {
    fail(ErrorCode::kFixtureMiss, "no fixture for request " + key + " in " + dir_.string());
  }
  Json fixture;
  try {
    fixture = Json::parse(read_file(path));
    const auto& res = fixture.at("response");
    const auto& body = res.at("body");
    return HttpResult{res.at("status").get<int>(),
                      body.is_string() ? body.get<std::string>() : body.dump()};
  } catch (const Json::exception& e) {
    fail(ErrorCode::kParseError, "fixture " + path.string() + ": " + e.what());
  }
}

RecordingTransport::RecordingTransport(std::shared_ptr<const Transport> inner, fs::path dir)
    : inner_(std::move(inner)), dir_(std::move(dir)) {}

HttpResult RecordingTransport::post(const Json& payload) const {
  HttpResult res = inner_->post(payload);
  Json body;
  try {
    body = Json::parse(res.body);
  } catch (const Json::exception&) {
    body = res.body;
  }
  Json fixture{{"key", fixture_key(payload)},
               {"request", payload},
               {"response", {{"status", res.status}, {"body", std::move(body)}}}};
  write_file_atomic(fixture_path(dir_, payload), fixture.dump(2) + "\n");
  return res;
}

}  // namespace visil
