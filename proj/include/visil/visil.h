/* Copyright 2026 The visil Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the visil library.
 *
 * All strings are UTF-8 and NUL-terminated. Strings returned through `char**`
 * out-parameters are owned by the caller and must be released with
 * visil_string_free. On any status other than VISIL_OK, visil_last_error()
 * returns a JSON object {"code": <int>, "name": <text>, "message": <text>}
 * describing the most recent failure on the calling thread.
 */

#ifndef VISIL_VISIL_H_
#define VISIL_VISIL_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define VISIL_API __declspec(dllexport)
#else
#define VISIL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define VISIL_ABI_VERSION 1

typedef enum visil_status {
  VISIL_OK = 0,
  VISIL_E_INVALID_ARGUMENT = 1,
  VISIL_E_USAGE = 2,
  VISIL_E_IO = 3,
  VISIL_E_PARSE = 4,
  VISIL_E_COST_UNAVAILABLE = 5,
  VISIL_E_BACKEND_UNAVAILABLE = 6,
  VISIL_E_EMPTY_RECOVERY = 7,
  VISIL_E_UNKNOWN_FACT = 8,
  VISIL_E_FIXTURE_MISS = 9,
  VISIL_E_KEYWORD_PARSE = 10,
  VISIL_E_NOTHING_TO_MASK = 11,
  VISIL_E_DOMAIN = 12,
  VISIL_E_IDENTITY_MISMATCH = 13,
  VISIL_E_EMPTY_INPUT = 14,
  VISIL_E_DEGENERATE_INPUT = 15,
  VISIL_E_EVALUATOR_MISMATCH = 16,
  VISIL_E_CAPTION_UNAVAILABLE = 17,
  VISIL_E_INVALID_FRAME_FIELD = 18,
  VISIL_E_TIMECODE_PARSE = 19,
  VISIL_E_KEYFRAME_PARSE = 20,
  VISIL_E_DISTRACTOR_SHORTFALL = 21,
  VISIL_E_ROLE_VIOLATION = 22,
  VISIL_E_INTERNAL = 99
} visil_status;

typedef struct visil_session visil_session;

VISIL_API int visil_abi_version(void);

/* Stable name of a status, e.g. "EvaluatorMismatch". */
VISIL_API const char* visil_status_name(visil_status status);

/* Thread-local JSON description of the last failure; "{}" if none. */
VISIL_API const char* visil_last_error(void);

VISIL_API void visil_string_free(char* s);

/* Creates a session from
 *   {"flags": {...}, "config_path": "...", "env": {"VISIL_SEED": "7", ...}}
 * Every member is optional. Keys in "flags" take precedence over the config
 * file, which takes precedence over "env". When "env" is absent the process
 * environment is read. */
VISIL_API visil_status visil_session_create(const char* options_json, visil_session** out);

VISIL_API void visil_session_destroy(visil_session* session);

/* {"values": {...}, "sources": {key: "flag"|"file"|"env"|"default"}, "hash": "..."}
 * with secrets omitted. */
VISIL_API visil_status visil_session_config(const visil_session* session, char** out_json);

/* Runs a subcommand: caption, keywords, summarize, score, vqa, correspond,
 * select, stats or synth. `args_json` may be NULL. */
VISIL_API visil_status visil_run(visil_session* session, const char* command,
                                 const char* args_json, char** out_json);

/* Prompt asset text by name (captioning, keywords, keyframes, summary,
 * distractors, correspondence, visil_score, vqa); NULL if unknown. The
 * returned pointer is static. */
VISIL_API const char* visil_prompt(const char* name);

/* HH:MM:SS:FF at `fps` to a frame index. */
VISIL_API visil_status visil_parse_timecode(const char* timecode, double fps, int64_t* out_index);

/* Keyword response text to {"keywords": [...], "warnings": [...]}. */
VISIL_API visil_status visil_parse_keywords(const char* response, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* VISIL_VISIL_H_ */
