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

#include "visil/backend.hpp"

namespace visil {

void ModelRoles::validate(bool allow_shared_evaluator) const {
  for (const auto* id : {&captioner, &keyword_extractor, &summarizer, &evaluator, &answerer,
                         &judge}) {
    if (id->empty()) fail(ErrorCode::kRoleViolation, "every model role needs a model id");
  }
  if (allow_shared_evaluator) return;
  if (evaluator == captioner) {
    fail(ErrorCode::kRoleViolation,
         "evaluator and captioner are the same model '" + evaluator +
             "'; pass --allow-shared-evaluator to override");
  }
  if (evaluator == summarizer) {
    fail(ErrorCode::kRoleViolation,
         "evaluator and summarizer are the same model '" + evaluator +
             "'; pass --allow-shared-evaluator to override");
  }
}

Json to_json(const ModelRoles& r) {
  return Json{{"captioner", r.captioner},   {"keyword_extractor", r.keyword_extractor},
              {"summarizer", r.summarizer}, {"evaluator", r.evaluator},
              {"answerer", r.answerer},     {"judge", r.judge}};
}

ModelRoles roles_from_json(const Json& j, ModelRoles r) {
  if (!j.is_object()) fail(ErrorCode::kParseError, "roles must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!value.is_string()) fail(ErrorCode::kParseError, "role '" + key + "' must be a string");
    auto v = value.get<std::string>();
    if (key == "captioner") {
      r.captioner = v;
    } else if (key == "keyword_extractor") {
      r.keyword_extractor = v;
    } else if (key == "summarizer") {
      r.summarizer = v;
    } else if (key == "evaluator") {
      r.evaluator = v;
    } else if (key == "answerer") {
      r.answerer = v;
    } else if (key == "judge") {
      r.judge = v;
    } else {
      fail(ErrorCode::kParseError, "unknown role '" + key + "'");
    }
  }
  return r;
}

}  // namespace visil
