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

#include <filesystem>

#include "support/fake_chat.hpp"
#include "support/mock_server.hpp"
#include "visil/api.hpp"
#include "visil/io.hpp"
#include "visil/transport.hpp"

namespace visil {
namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("visil_transport_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

TEST(FixtureKey, CanonicalAndSensitive) {
  Json a{{"model", "m"}, {"seed", 1}, {"messages", Json::array()}};
  Json b = Json::parse(R"({"messages": [], "seed": 1, "model": "m"})");
  EXPECT_EQ(fixture_key(a), fixture_key(b));
  Json c = a;
  c["seed"] = 2;
  EXPECT_NE(fixture_key(a), fixture_key(c));
  EXPECT_EQ(fixture_key(a).size(), 64u);
  // sha256 of the documented key object.
  Json key{{"model_id", "m"}, {"payload", a}, {"seed", 1}};
  EXPECT_EQ(fixture_key(a), sha256_hex(key.dump()));
}

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(base64_encode("foobar"), "Zm9vYmFy");
  EXPECT_EQ(base64_encode("fo"), "Zm8=");
}

TEST(Replay, RecordThenReplay) {
  const auto dir = temp_dir("rr");
  auto inner = std::make_shared<testing::FunctionTransport>(
      [](const Json& p) { return HttpResult{200, Json{{"echo", p["seed"]}}.dump()}; });
  RecordingTransport rec(inner, dir);
  Json payload{{"model", "m"}, {"seed", 5}};
  auto live = rec.post(payload);
  EXPECT_TRUE(fs::exists(fixture_path(dir, payload)));
  auto fixture = Json::parse(read_file(fixture_path(dir, payload)));
  EXPECT_EQ(fixture["request"], payload);
  EXPECT_EQ(fixture["key"], fixture_key(payload));

  ReplayTransport replay(dir);
  auto again = replay.post(payload);
  EXPECT_EQ(again.status, 200);
  EXPECT_EQ(Json::parse(again.body), Json::parse(live.body));

  payload["seed"] = 6;
  try {
    replay.post(payload);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFixtureMiss);
    EXPECT_NE(std::string(e.what()).find(fixture_key(payload)), std::string::npos);
  }
  fs::remove_all(dir);
}

TEST(Http, MockServerRoundTripWithBearerKey) {
  testing::MockChatServer server([](const Json& p, int) {
    return HttpResult{200, Json{{"model", p["model"]}}.dump()};
  }, "secret");
  HttpTransport http(server.endpoint(), "secret", 5);
  auto res = http.post(Json{{"model", "m"}});
  EXPECT_EQ(res.status, 200);
  EXPECT_EQ(Json::parse(res.body)["model"], "m");
  EXPECT_EQ(server.auth_headers().at(0), "Bearer secret");

  HttpTransport wrong(server.endpoint(), "nope", 5);
  EXPECT_EQ(wrong.post(Json{{"model", "m"}}).status, 401);
}

TEST(Http, UnreachableIsBackendUnavailable) {
  int port;
  {
    testing::MockChatServer s([](const Json&, int) { return HttpResult{200, "{}"}; });
    port = s.port();
  }
  HttpTransport http("http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions", "k", 2);
  try {
    http.post(Json{{"model", "m"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBackendUnavailable);
  }
  EXPECT_THROW(HttpTransport("no-scheme", "k"), Error);
}

TEST(Http, ApiBackendOverHttpWithFakeChat) {
  testing::FakeChatOptions fo;
  testing::MockChatServer server(
      [fo](const Json& p, int) { return HttpResult{200, testing::fake_chat_body(p, fo).dump()}; },
      "k");
  ApiOptions o;
  o.model_id = "evaluator";
  o.backoff_base = std::chrono::milliseconds(0);
  ApiBackend be(std::make_shared<HttpTransport>(server.endpoint(), "k", 5), o);
  auto r = be.generate_text(MediaContext{"v", {TextPart{"x"}}}, "hello", 0, Task::kOther);
  EXPECT_EQ(r.text, "ok");
  EXPECT_EQ(server.calls(), 1);
}

}  // namespace
}  // namespace visil
