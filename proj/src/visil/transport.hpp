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

// Request transports for the chat-completions client. Fixtures are one JSON
// file per request, named by the SHA-256 of the canonical request key.

#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "visil/core.hpp"

namespace visil {

struct HttpResult {
  int status = 0;
  std::string body;
};

class Transport {
 public:
  virtual ~Transport() = default;
  /// Throws BackendUnavailable when the endpoint cannot be reached.
  virtual HttpResult post(const Json& payload) const = 0;
};

class HttpTransport final : public Transport {
 public:
  /// `endpoint` is a full URL, e.g. https://host/v1/chat/completions.
  HttpTransport(std::string endpoint, std::string api_key, int timeout_s = 120);
  HttpResult post(const Json& payload) const override;

 private:
  std::string base_;
  std::string path_;
  std::string api_key_;
  int timeout_s_;
};

/// Canonical fixture key: sha256 over {"model_id", "payload", "seed"} dumped
/// with sorted keys and no whitespace.
std::string fixture_key(const Json& payload);

class ReplayTransport final : public Transport {
 public:
  explicit ReplayTransport(std::filesystem::path dir);
  /// Throws FixtureMiss naming the hash when no fixture exists.
  HttpResult post(const Json& payload) const override;

 private:
  std::filesystem::path dir_;
};

class RecordingTransport final : public Transport {
 public:
  RecordingTransport(std::shared_ptr<const Transport> inner, std::filesystem::path dir);
  HttpResult post(const Json& payload) const override;

 private:
  std::shared_ptr<const Transport> inner_;
  std::filesystem::path dir_;
};

std::filesystem::path fixture_path(const std::filesystem::path& dir, const Json& payload);

}  // namespace visil
